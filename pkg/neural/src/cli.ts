/**
 * Minimal command line:
 *
 *   node dist/cli.js train   --labels L.jsonl --config cfg.json --out model.json
 *   node dist/cli.js predict --model model.json --corpus-cache cache.json --out preds.jsonl
 *
 * The labels file comes from the primary pipeline's `labels` command,
 * the corpus cache from its `ingest` command; the prediction output
 * feeds its `ensemble` command.
 */
import * as fs from "node:fs";

import { modelConfigSchema } from "./schema.js";
import { groupLabels, loadLabels, loadModel, saveModel, train } from "./train.js";
import { loadCorpusCache, predictCorpus, writePredictions } from "./predict.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (!value) throw new Error(`missing required flag --${name}`);
  return value;
}

function cmdTrain(flags: Map<string, string>): void {
  const data = loadLabels(need(flags, "labels"));
  const grouped = groupLabels(data);
  const overrides = flags.has("config")
    ? JSON.parse(fs.readFileSync(flags.get("config")!, "utf-8"))
    : {};
  const config = modelConfigSchema.parse({
    numFeatures: data.header.num_features,
    ...overrides,
  });
  const epochs = Number(flags.get("epochs") ?? 20);
  const result = train(grouped, config, { epochs, verbose: true });
  saveModel(need(flags, "out"), result);
  console.log(
    `trained on ${grouped.length} grouped examples; ` +
      `training exact-match accuracy ${(result.trainAccuracy * 100).toFixed(1)}%`,
  );
}

function cmdPredict(flags: Map<string, string>): void {
  const { model, vocab } = loadModel(need(flags, "model"));
  const cache = loadCorpusCache(need(flags, "corpus-cache"));
  const featureIds = flags.has("features")
    ? (JSON.parse(fs.readFileSync(flags.get("features")!, "utf-8")) as string[])
    : orderFromHeader(need(flags, "labels"));
  const predictions = predictCorpus(model, vocab, cache, featureIds);
  writePredictions(need(flags, "out"), predictions);
  console.log(`wrote ${predictions.length} prediction records`);
}

function orderFromHeader(labelPath: string): string[] {
  const header = JSON.parse(
    fs.readFileSync(`${labelPath}.header.json`, "utf-8"),
  ) as { feature_index: Record<string, number> };
  return Object.entries(header.feature_index)
    .sort((a, b) => a[1] - b[1])
    .map(([fid]) => fid);
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  try {
    const flags = parseFlags(rest);
    if (command === "train") cmdTrain(flags);
    else if (command === "predict") cmdPredict(flags);
    else {
      console.error("usage: cli.js {train|predict} --flag value ...");
      return 1;
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exit(main());
