export { Mat, jacobiSvd, matmul, transpose, scaleColumns, frobenius, sub, svdResidual } from "./linalg";
export { readMft, writeMft, Tensor } from "./mft";
export {
  SnapshotFactors,
  DataSplit,
  DatasetPair,
  chronologicalSplit,
  preparePair,
  snapshotCount,
  snapshotFactorize,
  snapshotMatrix,
} from "./data";
export {
  DecoderModel,
  ModelConfig,
  ModelGrads,
  batchLossAndGrads,
  cloneModel,
  forwardSnapshot,
  gradientArrays,
  initModel,
  modelFromJson,
  modelToJson,
  parameterArrays,
  predictSnapshot,
  zeroModelGrads,
} from "./model";
export {
  DEFAULT_TRAIN,
  EpochStats,
  TrainConfig,
  TrainOutcome,
  TrainingDivergedError,
  evaluate,
  trainModel,
} from "./train";
export { DEFAULT_SPACE, SearchSpace, Trial, TuneOutcome, tune } from "./tune";
export { Rng, deriveSeed } from "./rng";
