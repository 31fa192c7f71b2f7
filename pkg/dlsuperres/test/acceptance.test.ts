/** Acceptance checks for the decoder superresolution component; each test
 * logs a [PASS]/[FAIL] line. */
import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterEach, describe, expect, it } from "vitest";

import { DatasetPair, preparePair } from "../src/data";
import { Mat } from "../src/linalg";
import { readMft, writeMft } from "../src/mft";
import {
  batchLossAndGrads,
  gradientArrays,
  initModel,
  parameterArrays,
  predictSnapshot,
  zeroModelGrads,
} from "../src/model";
import { Rng } from "../src/rng";
import { DEFAULT_TRAIN, evaluate, trainModel } from "../src/train";

const FIXTURES = path.join(__dirname, "..", "fixtures");
const PRIMARY_SRC = path.join(__dirname, "..", "..", "src");

let currentTag = "";
let failed = false;

function tag(name: string) {
  currentTag = name;
  failed = false;
}

afterEach(() => {
  if (currentTag) {
    console.log(failed ? `[FAIL] ${currentTag}` : `[PASS] ${currentTag}`);
    currentTag = "";
  }
});

function loadPair(): DatasetPair {
  return preparePair(
    readMft(path.join(FIXTURES, "lowres.mft")),
    readMft(path.join(FIXTURES, "highres.mft")),
  );
}

function trainedOutcome(pair: DatasetPair) {
  return trainModel(pair, { ...DEFAULT_TRAIN, epochs: 200 });
}

describe("acceptance", () => {
  it("B1: trained test RRMSE beats the interpolation baseline, loss strictly decreases", () => {
    tag("B1 hybrid-model-learning");
    failed = true;
    const started = Date.now();
    const pair = loadPair();
    const baseline = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "baseline.json"), "utf-8"),
    ) as { baseline_test_rrmse: number; test_start: number };
    const outcome = trainedOutcome(pair);
    for (let i = 1; i < 10; i++) {
      expect(outcome.history[i].trainLoss).toBeLessThan(outcome.history[i - 1].trainLoss);
    }
    expect(outcome.split.test[0]).toBe(baseline.test_start);
    const testLoss = evaluate(outcome.model, pair, outcome.split.test);
    expect(testLoss).toBeLessThan(baseline.baseline_test_rrmse);
    expect(Date.now() - started).toBeLessThan(5 * 60 * 1000);
    failed = false;
  });

  it("B2: reported RRMSE matches the repair toolkit on exchanged MFT arrays", () => {
    tag("B2 cross-component-rrmse");
    failed = true;
    const pair = loadPair();
    const outcome = trainModel(pair, { ...DEFAULT_TRAIN, epochs: 60 });
    const test = outcome.split.test;
    const testLoss = evaluate(outcome.model, pair, test);

    // exchange the test-split truth and reconstruction as MFT tensors
    const n1 = pair.targets[0].rows;
    const n2 = pair.targets[0].cols;
    const count = test.length;
    const truth = new Float64Array(n1 * n2 * count);
    const recon = new Float64Array(n1 * n2 * count);
    test.forEach((snapshotIdx, s) => {
      const target = pair.targets[snapshotIdx];
      const predicted: Mat = predictSnapshot(outcome.model, pair.factors[snapshotIdx]);
      for (let i = 0; i < n1; i++) {
        for (let j = 0; j < n2; j++) {
          truth[(i * n2 + j) * count + s] = target.get(i, j);
          recon[(i * n2 + j) * count + s] = predicted.get(i, j);
        }
      }
    });
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "exchange-"));
    writeMft(path.join(dir, "truth.mft"), { dims: [1, n1, n2, count], data: truth });
    writeMft(path.join(dir, "recon.mft"), { dims: [1, n1, n2, count], data: recon });
    execFileSync(
      "python3",
      [
        "-m",
        "modalrepair.cli",
        "analyze",
        path.join(dir, "truth.mft"),
        path.join(dir, "recon.mft"),
        "--out",
        path.join(dir, "report"),
      ],
      { env: { ...process.env, PYTHONPATH: PRIMARY_SRC } },
    );
    const report = JSON.parse(fs.readFileSync(path.join(dir, "report", "report.json"), "utf-8"));
    expect(Math.abs(report.rrmse - testLoss)).toBeLessThan(1e-10);
    failed = false;
  });

  it("B3: analytic gradients match central finite differences on the tiny model", () => {
    tag("B3 gradient-check");
    failed = true;
    const model = initModel(
      { inputW: 4, outputW: 4, hiddenW: [5], inputT: 4, outputT: 4, hiddenT: [5], pPrime: 2 },
      21,
    );
    const rng = new Rng(22);
    const factors = {
      w: new Mat(4, 2, Float64Array.from({ length: 8 }, () => rng.normal())),
      sigma: Float64Array.from([1.5, 0.7]),
      t: new Mat(4, 2, Float64Array.from({ length: 8 }, () => rng.normal())),
    };
    const target = new Mat(4, 4, Float64Array.from({ length: 16 }, () => rng.normal()));
    const grads = zeroModelGrads(model);
    batchLossAndGrads(model, [factors], [target], grads);
    const params = parameterArrays(model);
    const analytic = gradientArrays(grads);
    const eps = 1e-6;
    for (let a = 0; a < params.length; a++) {
      for (let i = 0; i < params[a].length; i++) {
        const keep = params[a][i];
        params[a][i] = keep + eps;
        const plus = batchLossAndGrads(model, [factors], [target]);
        params[a][i] = keep - eps;
        const minus = batchLossAndGrads(model, [factors], [target]);
        params[a][i] = keep;
        const numeric = (plus - minus) / (2 * eps);
        const denom = Math.max(Math.abs(numeric), Math.abs(analytic[a][i]), 1e-8);
        expect(Math.abs(numeric - analytic[a][i]) / denom).toBeLessThan(1e-4);
      }
    }
    failed = false;
  });
});
