/** Random hyperparameter search with a reproducible trial sequence: trial i
 * is fully determined by (seed, i), so a larger budget extends, never
 * reshuffles, a smaller run's trials. */
import { DatasetPair } from "./data";
import { TrainConfig, trainModel } from "./train";
import { Rng, deriveSeed } from "./rng";

export interface SearchSpace {
  hiddenW: number[][];
  hiddenT: number[][];
  learningRate: number[];
  batchSize: number[];
}

export const DEFAULT_SPACE: SearchSpace = {
  hiddenW: [[32], [64], [64, 64], [96, 48]],
  hiddenT: [[24], [48], [48, 24]],
  learningRate: [5e-4, 1e-3, 2e-3, 5e-3],
  batchSize: [4, 8, 16],
};

export interface Trial {
  index: number;
  config: TrainConfig;
  valLoss: number;
  bestEpoch: number;
}

export interface TuneOutcome {
  best: Trial;
  trials: Trial[];
}

function sampleConfig(space: SearchSpace, base: TrainConfig, rng: Rng, trialSeed: number): TrainConfig {
  return {
    ...base,
    hiddenW: rng.pick(space.hiddenW).slice(),
    hiddenT: rng.pick(space.hiddenT).slice(),
    learningRate: rng.pick(space.learningRate),
    batchSize: rng.pick(space.batchSize),
    seed: trialSeed,
  };
}

export function tune(
  pair: DatasetPair,
  space: SearchSpace,
  budget: number,
  base: TrainConfig,
  seed: number,
): TuneOutcome {
  if (budget < 1) throw new Error("budget must be >= 1");
  if (!space.hiddenW.length || !space.hiddenT.length || !space.learningRate.length || !space.batchSize.length) {
    throw new Error("empty search space");
  }
  const trials: Trial[] = [];
  for (let i = 0; i < budget; i++) {
    const trialSeed = deriveSeed(seed, i);
    const rng = new Rng(trialSeed);
    const config = sampleConfig(space, base, rng, trialSeed);
    const outcome = trainModel(pair, config);
    trials.push({ index: i, config, valLoss: outcome.bestValLoss, bestEpoch: outcome.bestEpoch });
  }
  let best = trials[0];
  for (const trial of trials) {
    if (trial.valLoss < best.valLoss) best = trial;
  }
  return { best, trials };
}
