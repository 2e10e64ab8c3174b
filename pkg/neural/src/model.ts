/**
 * Toy stand-in for a pretrained encoder with two task heads.
 *
 * The encoder pools learned token embeddings into a fixed-size
 * representation (the pooled-token analogue): the concatenation of the
 * per-dimension mean and max over the sequence. The max path lets a
 * single distinctive token register regardless of window length, which
 * mean-pooling alone dilutes away. Two heads read the pooled vector:
 *
 * - morphology head: 2d -> d/2 (ReLU, dropout) -> K logits z, with
 *   multi-label probabilities sigmoid(z / tau) under a learnable
 *   temperature tau;
 * - confidence head: 2d -> d/4 (ReLU, dropout) -> 1, sigmoid to [0, 1],
 *   trained to predict whether the thresholded morphology output matches
 *   the target exactly.
 *
 * Everything is Float64Array math with hand-written gradients so the
 * finite-difference check can run at tight tolerances.
 */
import { Rng } from "./rng.js";
import type { ModelConfig } from "./schema.js";

export interface Example {
  tokenIds: Int32Array;
  /** multi-hot target over features, values 0 or 1 */
  target: Float64Array;
  /** per-example loss weight (weak-label confidence) */
  weight: number;
}

export interface ForwardResult {
  pooled: Float64Array;
  morphProbs: Float64Array;
  logits: Float64Array;
  confidence: number;
}

/** One trainable tensor with its gradient and Adam state. */
export class Param {
  value: Float64Array;
  grad: Float64Array;
  private m: Float64Array;
  private v: Float64Array;

  constructor(size: number) {
    this.value = new Float64Array(size);
    this.grad = new Float64Array(size);
    this.m = new Float64Array(size);
    this.v = new Float64Array(size);
  }

  zeroGrad(): void {
    this.grad.fill(0);
  }

  adamStep(lr: number, t: number, beta1 = 0.9, beta2 = 0.999, eps = 1e-8): void {
    const bc1 = 1 - Math.pow(beta1, t);
    const bc2 = 1 - Math.pow(beta2, t);
    for (let i = 0; i < this.value.length; i++) {
      const g = this.grad[i];
      this.m[i] = beta1 * this.m[i] + (1 - beta1) * g;
      this.v[i] = beta2 * this.v[i] + (1 - beta2) * g * g;
      this.value[i] -= (lr * (this.m[i] / bc1)) / (Math.sqrt(this.v[i] / bc2) + eps);
    }
  }
}

function sigmoid(x: number): number {
  return x >= 0 ? 1 / (1 + Math.exp(-x)) : Math.exp(x) / (1 + Math.exp(x));
}

/** Numerically stable BCE on a logit: max(u,0) - u*y + log(1+exp(-|u|)). */
function bceFromLogit(u: number, y: number): number {
  return Math.max(u, 0) - u * y + Math.log1p(Math.exp(-Math.abs(u)));
}

interface HeadActivations {
  hidden: Float64Array; // post-ReLU, post-dropout
  preact: Float64Array;
  mask: Float64Array; // dropout keep scaling per unit (1/(1-rate) or 0)
}

export class Model {
  readonly config: ModelConfig;
  readonly d: number;
  readonly pooledDim: number;
  readonly d2: number;
  readonly d4: number;
  readonly K: number;

  emb: Param;
  w1: Param;
  b1: Param;
  w2: Param;
  b2: Param;
  c1: Param;
  cb1: Param;
  c2: Param;
  cb2: Param;
  tau: Param;

  private rng: Rng;
  private step = 0;
  private truncationWarned = false;

  constructor(config: ModelConfig) {
    this.config = config;
    this.d = config.hiddenDim;
    this.pooledDim = 2 * this.d;
    this.d2 = Math.max(1, Math.floor(this.d / 2));
    this.d4 = Math.max(1, Math.floor(this.d / 4));
    this.K = config.numFeatures;
    this.rng = new Rng(config.seed);

    this.emb = this.init(config.vocabSize * this.d, this.d);
    this.w1 = this.init(this.d2 * this.pooledDim, this.pooledDim);
    this.b1 = new Param(this.d2);
    this.w2 = this.init(this.K * this.d2, this.d2);
    this.b2 = new Param(this.K);
    this.c1 = this.init(this.d4 * this.pooledDim, this.pooledDim);
    this.cb1 = new Param(this.d4);
    this.c2 = this.init(this.d4, this.d4);
    this.cb2 = new Param(1);
    this.tau = new Param(1);
    this.tau.value[0] = config.temperatureInit;
  }

  private init(size: number, fanIn: number): Param {
    const p = new Param(size);
    const scale = 1 / Math.sqrt(fanIn);
    for (let i = 0; i < size; i++) p.value[i] = this.rng.gaussian() * scale;
    return p;
  }

  params(): Record<string, Param> {
    return {
      emb: this.emb,
      w1: this.w1,
      b1: this.b1,
      w2: this.w2,
      b2: this.b2,
      c1: this.c1,
      cb1: this.cb1,
      c2: this.c2,
      cb2: this.cb2,
      tau: this.tau,
    };
  }

  /** Truncate to maxSequenceLength, warning once. */
  clampSequence(tokenIds: Int32Array): Int32Array {
    const L = this.config.maxSequenceLength;
    if (tokenIds.length <= L) return tokenIds;
    if (!this.truncationWarned) {
      console.warn(
        `sequence of ${tokenIds.length} tokens truncated to ${L}; further truncations are silent`,
      );
      this.truncationWarned = true;
    }
    return tokenIds.subarray(0, L);
  }

  private pool(tokenIds: Int32Array): Float64Array {
    const h = new Float64Array(this.d);
    if (tokenIds.length === 0) return h;
    for (const id of tokenIds) {
      const base = id * this.d;
      for (let j = 0; j < this.d; j++) h[j] += this.emb.value[base + j];
    }
    for (let j = 0; j < this.d; j++) h[j] /= tokenIds.length;
    return h;
  }

  private headForward(
    h: Float64Array,
    w: Param,
    b: Param,
    units: number,
    train: boolean,
  ): HeadActivations {
    const preact = new Float64Array(units);
    for (let i = 0; i < units; i++) {
      let acc = b.value[i];
      const row = i * this.d;
      for (let j = 0; j < this.d; j++) acc += w.value[row + j] * h[j];
      preact[i] = acc;
    }
    const mask = new Float64Array(units);
    const hidden = new Float64Array(units);
    const rate = this.config.dropout;
    for (let i = 0; i < units; i++) {
      const keep = !train || rate === 0 || this.rng.next() >= rate;
      mask[i] = keep ? (train && rate > 0 ? 1 / (1 - rate) : 1) : 0;
      hidden[i] = preact[i] > 0 ? preact[i] * mask[i] : 0;
    }
    return { preact, hidden, mask };
  }

  forward(tokenIds: Int32Array, train = false): ForwardResult & {
    morph: HeadActivations;
    conf: HeadActivations;
    confLogit: number;
  } {
    const ids = this.clampSequence(tokenIds);
    const pooled = this.pool(ids);
    const morph = this.headForward(pooled, this.w1, this.b1, this.d2, train);
    const logits = new Float64Array(this.K);
    for (let k = 0; k < this.K; k++) {
      let acc = this.b2.value[k];
      const row = k * this.d2;
      for (let j = 0; j < this.d2; j++) acc += this.w2.value[row + j] * morph.hidden[j];
      logits[k] = acc;
    }
    const tau = this.tau.value[0];
    const morphProbs = new Float64Array(this.K);
    for (let k = 0; k < this.K; k++) morphProbs[k] = sigmoid(logits[k] / tau);

    const conf = this.headForward(pooled, this.c1, this.cb1, this.d4, train);
    let confLogit = this.cb2.value[0];
    for (let j = 0; j < this.d4; j++) confLogit += this.c2.value[j] * conf.hidden[j];
    const confidence = sigmoid(confLogit);
    return { pooled, morphProbs, logits, confidence, morph, conf, confLogit };
  }

  /**
   * Mean training loss over a batch: confidence-weighted multi-label BCE
   * on the morphology head plus BCE on the correctness-prediction head.
   * Accumulates gradients into every parameter when ``accumulate``.
   */
  lossAndGrad(batch: Example[], train: boolean, accumulate = true): {
    loss: number;
    morphLoss: number;
    confLoss: number;
    accuracy: number;
  } {
    const B = batch.length;
    if (B === 0) throw new Error("empty batch");
    let morphLoss = 0;
    let confLoss = 0;
    let correctExamples = 0;
    const tau = this.tau.value[0];

    for (const ex of batch) {
      const ids = this.clampSequence(ex.tokenIds);
      const out = this.forward(ids, train);
      const { pooled, logits, morphProbs, morph, conf, confLogit } = out;

      let allMatch = true;
      for (let k = 0; k < this.K; k++) {
        const u = logits[k] / tau;
        morphLoss += (ex.weight / (B * this.K)) * bceFromLogit(u, ex.target[k]);
        if ((morphProbs[k] > 0.5) !== (ex.target[k] > 0.5)) allMatch = false;
      }
      const g = allMatch ? 1 : 0;
      if (allMatch) correctExamples += 1;
      confLoss += bceFromLogit(confLogit, g) / B;

      if (!accumulate) continue;

      // ---- backward: morphology head ----
      const dLogits = new Float64Array(this.K);
      let dTau = 0;
      for (let k = 0; k < this.K; k++) {
        const u = logits[k] / tau;
        const dU = (ex.weight / (B * this.K)) * (sigmoid(u) - ex.target[k]);
        dLogits[k] = dU / tau;
        dTau += dU * (-logits[k] / (tau * tau));
      }
      this.tau.grad[0] += dTau;

      const dMorphHidden = new Float64Array(this.d2);
      for (let k = 0; k < this.K; k++) {
        const row = k * this.d2;
        const dz = dLogits[k];
        this.b2.grad[k] += dz;
        for (let j = 0; j < this.d2; j++) {
          this.w2.grad[row + j] += dz * morph.hidden[j];
          dMorphHidden[j] += dz * this.w2.value[row + j];
        }
      }
      const dPooled = new Float64Array(this.d);
      for (let i = 0; i < this.d2; i++) {
        if (morph.preact[i] <= 0 || morph.mask[i] === 0) continue;
        const da = dMorphHidden[i] * morph.mask[i];
        this.b1.grad[i] += da;
        const row = i * this.d;
        for (let j = 0; j < this.d; j++) {
          this.w1.grad[row + j] += da * pooled[j];
          dPooled[j] += da * this.w1.value[row + j];
        }
      }

      // ---- backward: confidence head (target treated as constant) ----
      const dS = (sigmoid(confLogit) - g) / B;
      this.cb2.grad[0] += dS;
      const dConfHidden = new Float64Array(this.d4);
      for (let j = 0; j < this.d4; j++) {
        this.c2.grad[j] += dS * conf.hidden[j];
        dConfHidden[j] = dS * this.c2.value[j];
      }
      for (let i = 0; i < this.d4; i++) {
        if (conf.preact[i] <= 0 || conf.mask[i] === 0) continue;
        const da = dConfHidden[i] * conf.mask[i];
        this.cb1.grad[i] += da;
        const row = i * this.d;
        for (let j = 0; j < this.d; j++) {
          this.c1.grad[row + j] += da * pooled[j];
          dPooled[j] += da * this.c1.value[row + j];
        }
      }

      // ---- backward: mean-pooled embeddings ----
      if (ids.length > 0) {
        for (const id of ids) {
          const base = id * this.d;
          for (let j = 0; j < this.d; j++) {
            this.emb.grad[base + j] += dPooled[j] / ids.length;
          }
        }
      }
    }
    return {
      loss: morphLoss + confLoss,
      morphLoss,
      confLoss,
      accuracy: correctExamples / B,
    };
  }

  zeroGrads(): void {
    for (const p of Object.values(this.params())) p.zeroGrad();
  }

  adamStep(lr: number): void {
    this.step += 1;
    for (const p of Object.values(this.params())) p.adamStep(lr, this.step);
    // temperature stays positive
    if (this.tau.value[0] < 1e-3) this.tau.value[0] = 1e-3;
  }

  /** Multi-label exact-match accuracy over a dataset (eval mode). */
  exactMatchAccuracy(examples: Example[]): number {
    let correct = 0;
    for (const ex of examples) {
      const out = this.forward(ex.tokenIds, false);
      let ok = true;
      for (let k = 0; k < this.K; k++) {
        if ((out.morphProbs[k] > 0.5) !== (ex.target[k] > 0.5)) ok = false;
      }
      if (ok) correct += 1;
    }
    return correct / examples.length;
  }

  serialize(): object {
    const dump: Record<string, number[] | object> = { config: this.config };
    for (const [name, p] of Object.entries(this.params())) {
      dump[name] = Array.from(p.value);
    }
    return dump;
  }

  static deserialize(doc: { config: ModelConfig } & Record<string, unknown>): Model {
    const model = new Model(doc.config);
    for (const [name, p] of Object.entries(model.params())) {
      const stored = doc[name];
      if (!Array.isArray(stored) || stored.length !== p.value.length) {
        throw new Error(`model file: bad or missing tensor ${name}`);
      }
      p.value.set(stored as number[]);
    }
    return model;
  }
}
