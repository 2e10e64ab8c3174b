/**
 * Temperature calibration: pick tau minimizing held-out binary
 * cross-entropy of sigmoid(z / tau).
 *
 * One-dimensional golden-section search over log(tau); degenerate
 * held-out splits (single class) keep tau = 1 with a warning.
 */
import { Model, type Example } from "./model.js";

function bceFromLogit(u: number, y: number): number {
  return Math.max(u, 0) - u * y + Math.log1p(Math.exp(-Math.abs(u)));
}

/** Mean BCE of sigmoid(logit / tau) against 0/1 targets. */
export function scaledBce(
  logits: Float64Array[] | number[][],
  targets: Float64Array[] | number[][],
  tau: number,
): number {
  let total = 0;
  let count = 0;
  for (let i = 0; i < logits.length; i++) {
    const z = logits[i];
    const y = targets[i];
    for (let k = 0; k < z.length; k++) {
      total += bceFromLogit(z[k] / tau, y[k]);
      count += 1;
    }
  }
  if (count === 0) throw new Error("empty calibration set");
  return total / count;
}

export interface CalibrationResult {
  tau: number;
  bce: number;
  degenerate: boolean;
}

/**
 * Golden-section minimization of the scaled BCE over tau in
 * [lo, hi] (log domain).
 */
export function searchTemperature(
  logits: Float64Array[] | number[][],
  targets: Float64Array[] | number[][],
  lo = 0.01,
  hi = 100,
  iterations = 200,
): CalibrationResult {
  let sawPositive = false;
  let sawNegative = false;
  for (const row of targets) {
    for (const y of row) {
      if (y > 0.5) sawPositive = true;
      else sawNegative = true;
    }
  }
  if (!sawPositive || !sawNegative) {
    console.warn("calibration split is single-class; keeping tau = 1");
    return { tau: 1.0, bce: scaledBce(logits, targets, 1.0), degenerate: true };
  }
  const phi = (Math.sqrt(5) - 1) / 2;
  let a = Math.log(lo);
  let b = Math.log(hi);
  let c = b - phi * (b - a);
  let d = a + phi * (b - a);
  let fc = scaledBce(logits, targets, Math.exp(c));
  let fd = scaledBce(logits, targets, Math.exp(d));
  for (let i = 0; i < iterations && Math.abs(b - a) > 1e-10; i++) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = scaledBce(logits, targets, Math.exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = scaledBce(logits, targets, Math.exp(d));
    }
  }
  const tau = Math.exp((a + b) / 2);
  return { tau, bce: scaledBce(logits, targets, tau), degenerate: false };
}

/**
 * Calibrate a trained model's temperature on held-out examples,
 * updating the model in place and returning the chosen tau.
 */
export function calibrateTemperature(
  model: Model,
  heldout: Example[],
): CalibrationResult {
  if (heldout.length === 0) throw new Error("empty held-out split");
  const logits: Float64Array[] = [];
  const targets: Float64Array[] = [];
  for (const ex of heldout) {
    logits.push(model.forward(ex.tokenIds, false).logits);
    targets.push(ex.target);
  }
  const result = searchTemperature(logits, targets);
  model.tau.value[0] = result.tau;
  return result;
}
