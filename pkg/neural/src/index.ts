export { Model, Param, type Example, type ForwardResult } from "./model.js";
export { Rng } from "./rng.js";
export { Vocabulary, UNK_ID } from "./tokenizer.js";
export {
  calibrateTemperature,
  scaledBce,
  searchTemperature,
  type CalibrationResult,
} from "./calibrate.js";
export {
  groupLabels,
  loadLabels,
  loadModel,
  saveModel,
  toExamples,
  train,
  type GroupedExample,
  type TrainOptions,
  type TrainResult,
} from "./train.js";
export {
  loadCorpusCache,
  predictCorpus,
  validatePredictionFile,
  writePredictions,
} from "./predict.js";
export {
  corpusCacheSchema,
  labelHeaderSchema,
  modelConfigSchema,
  parseJsonl,
  predictionSchema,
  weakLabelSchema,
  type CorpusCache,
  type LabelHeader,
  type ModelConfig,
  type Prediction,
  type WeakLabel,
} from "./schema.js";
