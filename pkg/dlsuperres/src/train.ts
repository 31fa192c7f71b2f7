/** Training loop: Adam on the relative-RMSE loss, chronological splits,
 * per-epoch history and monotone-best validation checkpointing. */
import { DatasetPair, DataSplit, chronologicalSplit } from "./data";
import {
  DecoderModel,
  ModelGrads,
  batchLossAndGrads,
  cloneModel,
  gradientArrays,
  initModel,
  parameterArrays,
  zeroModelGrads,
} from "./model";
import { Rng } from "./rng";

export interface TrainConfig {
  epochs: number;
  batchSize: number;
  learningRate: number;
  hiddenW: number[];
  hiddenT: number[];
  seed: number;
  patience: number; // epochs without validation improvement before stopping
}

export const DEFAULT_TRAIN: TrainConfig = {
  epochs: 300,
  batchSize: 16,
  learningRate: 1e-3,
  hiddenW: [64, 64],
  hiddenT: [48],
  seed: 0,
  patience: 60,
};

export interface EpochStats {
  epoch: number;
  trainLoss: number;
  valLoss: number;
}

export interface TrainOutcome {
  model: DecoderModel; // best-validation weights
  history: EpochStats[];
  bestEpoch: number;
  bestValLoss: number;
  split: DataSplit;
}

export class TrainingDivergedError extends Error {
  readonly history: EpochStats[];

  constructor(epoch: number, history: EpochStats[]) {
    super(`training loss became non-finite at epoch ${epoch}`);
    this.history = history;
  }
}

class Adam {
  private readonly m: Float64Array[];
  private readonly v: Float64Array[];
  private step = 0;

  constructor(
    private readonly params: Float64Array[],
    private readonly lr: number,
    private readonly beta1 = 0.9,
    private readonly beta2 = 0.999,
    private readonly eps = 1e-8,
  ) {
    this.m = params.map((p) => new Float64Array(p.length));
    this.v = params.map((p) => new Float64Array(p.length));
  }

  update(grads: Float64Array[]): void {
    this.step += 1;
    const c1 = 1 - Math.pow(this.beta1, this.step);
    const c2 = 1 - Math.pow(this.beta2, this.step);
    for (let a = 0; a < this.params.length; a++) {
      const p = this.params[a];
      const g = grads[a];
      const m = this.m[a];
      const v = this.v[a];
      for (let i = 0; i < p.length; i++) {
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g[i];
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * g[i] * g[i];
        p[i] -= (this.lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + this.eps);
      }
    }
  }
}

export function evaluate(model: DecoderModel, pair: DatasetPair, indices: number[]): number {
  return batchLossAndGrads(
    model,
    indices.map((i) => pair.factors[i]),
    indices.map((i) => pair.targets[i]),
  );
}

export function trainModel(pair: DatasetPair, cfg: TrainConfig): TrainOutcome {
  const n = pair.factors.length;
  const split = chronologicalSplit(n);
  const p = pair.factors[0].sigma.length;
  const model = initModel(
    {
      inputW: pair.factors[0].w.rows,
      outputW: pair.targets[0].rows,
      hiddenW: cfg.hiddenW,
      inputT: pair.factors[0].t.rows,
      outputT: pair.targets[0].cols,
      hiddenT: cfg.hiddenT,
      pPrime: p,
    },
    cfg.seed,
  );
  const optimizer = new Adam(parameterArrays(model), cfg.learningRate);
  const rng = new Rng(cfg.seed ^ 0x51ed2701);
  const history: EpochStats[] = [];
  let best = cloneModel(model);
  let bestValLoss = Infinity;
  let bestEpoch = 0;
  let sinceBest = 0;

  for (let epoch = 1; epoch <= cfg.epochs; epoch++) {
    const order = split.train.slice();
    rng.shuffle(order);
    for (let start = 0; start < order.length; start += cfg.batchSize) {
      const batch = order.slice(start, start + cfg.batchSize);
      const grads: ModelGrads = zeroModelGrads(model);
      const loss = batchLossAndGrads(
        model,
        batch.map((i) => pair.factors[i]),
        batch.map((i) => pair.targets[i]),
        grads,
      );
      if (!Number.isFinite(loss)) throw new TrainingDivergedError(epoch, history);
      optimizer.update(gradientArrays(grads));
    }
    const trainLoss = evaluate(model, pair, split.train);
    const valLoss = split.validation.length ? evaluate(model, pair, split.validation) : trainLoss;
    if (!Number.isFinite(trainLoss) || !Number.isFinite(valLoss)) {
      throw new TrainingDivergedError(epoch, history);
    }
    history.push({ epoch, trainLoss, valLoss });
    if (valLoss < bestValLoss) {
      bestValLoss = valLoss;
      bestEpoch = epoch;
      best = cloneModel(model);
      sinceBest = 0;
    } else {
      sinceBest += 1;
      if (sinceBest >= cfg.patience) break;
    }
  }
  return { model: best, history, bestEpoch, bestValLoss, split };
}
