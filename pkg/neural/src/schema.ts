/**
 * Wire formats shared with the primary pipeline, validated with zod.
 *
 * - weak labels: JSONL, one {text_id, word_index, word, context,
 *   feature_id, confidence} fact per line, plus a sidecar header mapping
 *   feature ids to multi-hot target columns;
 * - predictions: JSONL of {text_id, feature_id, frequency, confidence};
 * - corpus cache: the primary ingest command's tokenized document dump;
 * - model config: hyperparameters, loadable from a JSON file.
 */
import { z } from "zod";

export const weakLabelSchema = z.object({
  text_id: z.string(),
  word_index: z.number().int().nonnegative(),
  word: z.string(),
  context: z.string(),
  feature_id: z.string(),
  confidence: z.number().min(0.4).max(0.95),
});
export type WeakLabel = z.infer<typeof weakLabelSchema>;

export const labelHeaderSchema = z.object({
  catalog_version: z.string(),
  corpus_hash: z.string(),
  num_features: z.number().int().positive(),
  feature_index: z.record(z.string(), z.number().int().nonnegative()),
});
export type LabelHeader = z.infer<typeof labelHeaderSchema>;

export const predictionSchema = z.object({
  text_id: z.string(),
  feature_id: z.string(),
  frequency: z.number().nonnegative().finite(),
  confidence: z.number().min(0).max(1),
});
export type Prediction = z.infer<typeof predictionSchema>;

export const corpusCacheSchema = z.object({
  documents: z.array(
    z.object({
      id: z.string(),
      period: z.string(),
      chrono_index: z.number().int().nonnegative(),
      word_count: z.number().int().nonnegative(),
      tokens: z.array(z.tuple([z.string(), z.number(), z.number()])),
    }),
  ),
});
export type CorpusCache = z.infer<typeof corpusCacheSchema>;

export const modelConfigSchema = z.object({
  hiddenDim: z.number().int().positive().default(32),
  numFeatures: z.number().int().positive(),
  dropout: z.number().min(0).max(0.9).default(0.1),
  temperatureInit: z.number().positive().default(1.0),
  maxSequenceLength: z.number().int().positive().default(128),
  vocabSize: z.number().int().positive().default(4096),
  windowSize: z.number().int().positive().default(64),
  windowStride: z.number().int().positive().default(32),
  seed: z.number().int().default(12345),
});
export type ModelConfig = z.infer<typeof modelConfigSchema>;

/** Parse one JSONL document per non-empty line through a zod schema. */
export function parseJsonl<T>(content: string, schema: z.ZodType<T>): T[] {
  const out: T[] = [];
  const lines = content.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const result = schema.safeParse(JSON.parse(line));
    if (!result.success) {
      throw new Error(`line ${i + 1}: ${result.error.message}`);
    }
    out.push(result.data);
  }
  return out;
}
