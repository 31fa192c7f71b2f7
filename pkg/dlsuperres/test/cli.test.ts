import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { readMft } from "../src/mft";

const FIXTURES = path.join(__dirname, "..", "fixtures");

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "cli-"));
}

describe("cli", () => {
  it("train then predict produces an enhanced MFT tensor", () => {
    const dir = tmpdir();
    const model = path.join(dir, "model.json");
    const rcTrain = main([
      "train",
      "--lowres", path.join(FIXTURES, "lowres.mft"),
      "--highres", path.join(FIXTURES, "highres.mft"),
      "--epochs", "8",
      "--seed", "0",
      "--out", model,
    ]);
    expect(rcTrain).toBe(0);
    const payload = JSON.parse(fs.readFileSync(model, "utf-8"));
    expect(payload.history.length).toBe(8);
    expect(payload.testRrmse).toBeGreaterThan(0);

    const recon = path.join(dir, "recon.mft");
    const rcPredict = main([
      "predict",
      "--model", model,
      "--lowres", path.join(FIXTURES, "lowres.mft"),
      "--start", "96",
      "--count", "24",
      "--out", recon,
    ]);
    expect(rcPredict).toBe(0);
    const tensor = readMft(recon);
    expect(tensor.dims).toEqual([1, 64, 32, 24]);
    for (const v of tensor.data) expect(Number.isFinite(v)).toBe(true);
  });

  it("tune persists the full trial log", () => {
    const dir = tmpdir();
    const out = path.join(dir, "best.json");
    const rc = main([
      "tune",
      "--lowres", path.join(FIXTURES, "lowres.mft"),
      "--highres", path.join(FIXTURES, "highres.mft"),
      "--budget", "2",
      "--epochs", "2",
      "--seed", "3",
      "--out", out,
    ]);
    expect(rc).toBe(0);
    const payload = JSON.parse(fs.readFileSync(out, "utf-8"));
    expect(payload.trials.length).toBe(2);
    expect(payload.best.valLoss).toBe(Math.min(...payload.trials.map((t: any) => t.valLoss)));
  });

  it("missing files and unknown commands exit nonzero", () => {
    expect(main(["predict", "--model", "/nope.json", "--lowres", "/nope.mft", "--out", "/tmp/x.mft"])).toBe(2);
    expect(main(["frobnicate"])).toBe(2);
  });
});
