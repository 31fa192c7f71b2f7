import * as path from "path";

import { beforeAll, describe, expect, it } from "vitest";

import { DatasetPair, chronologicalSplit, preparePair } from "../src/data";
import { readMft } from "../src/mft";
import { DEFAULT_TRAIN, trainModel } from "../src/train";
import { DEFAULT_SPACE, tune } from "../src/tune";

const FIXTURES = path.join(__dirname, "..", "fixtures");

let pair: DatasetPair;

beforeAll(() => {
  pair = preparePair(readMft(path.join(FIXTURES, "lowres.mft")), readMft(path.join(FIXTURES, "highres.mft")));
});

describe("chronologicalSplit", () => {
  it("is disjoint, exhaustive and ordered with a 20% test share", () => {
    const split = chronologicalSplit(120);
    expect(split.train.length + split.validation.length + split.test.length).toBe(120);
    expect(split.test.length).toBe(24);
    expect(split.train[split.train.length - 1]).toBeLessThan(split.validation[0]);
    expect(split.validation[split.validation.length - 1]).toBeLessThan(split.test[0]);
  });

  it("rejects impossible splits", () => {
    expect(() => chronologicalSplit(10, [0.5, 0.2, 0.2])).toThrow(/sum/);
  });
});

describe("trainModel", () => {
  it("a single epoch yields history of length one", () => {
    const out = trainModel(pair, { ...DEFAULT_TRAIN, epochs: 1 });
    expect(out.history.length).toBe(1);
    expect(out.bestEpoch).toBe(1);
  });

  it("is deterministic under a fixed seed", () => {
    const cfg = { ...DEFAULT_TRAIN, epochs: 5, seed: 42 };
    const a = trainModel(pair, cfg);
    const b = trainModel(pair, cfg);
    expect(a.history).toEqual(b.history);
  });

  it("keeps the best-validation checkpoint", () => {
    const out = trainModel(pair, { ...DEFAULT_TRAIN, epochs: 25 });
    const recordedBest = Math.min(...out.history.map((h) => h.valLoss));
    expect(out.bestValLoss).toBeCloseTo(recordedBest, 12);
    expect(out.history[out.bestEpoch - 1].valLoss).toBeCloseTo(recordedBest, 12);
  });
});

describe("tune", () => {
  it("budget one returns the single sampled trial", () => {
    const base = { ...DEFAULT_TRAIN, epochs: 2 };
    const out = tune(pair, DEFAULT_SPACE, 1, base, 0);
    expect(out.trials.length).toBe(1);
    expect(out.best).toBe(out.trials[0]);
  });

  it("returned best equals the argmin of the trial log", () => {
    const base = { ...DEFAULT_TRAIN, epochs: 3 };
    const out = tune(pair, DEFAULT_SPACE, 4, base, 1);
    const minLoss = Math.min(...out.trials.map((t) => t.valLoss));
    expect(out.best.valLoss).toBe(minLoss);
  });

  it("larger budgets share the leading trials and never do worse", () => {
    const base = { ...DEFAULT_TRAIN, epochs: 3 };
    const small = tune(pair, DEFAULT_SPACE, 2, base, 7);
    const large = tune(pair, DEFAULT_SPACE, 5, base, 7);
    for (let i = 0; i < 2; i++) {
      expect(large.trials[i].config).toEqual(small.trials[i].config);
      expect(large.trials[i].valLoss).toBe(small.trials[i].valLoss);
    }
    expect(large.best.valLoss).toBeLessThanOrEqual(small.best.valLoss);
  });

  it("rejects an empty space", () => {
    expect(() =>
      tune(pair, { hiddenW: [], hiddenT: [], learningRate: [], batchSize: [] }, 1, DEFAULT_TRAIN, 0),
    ).toThrow(/empty/);
  });
});
