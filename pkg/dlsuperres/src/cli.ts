/** CLI entry points: train, predict, tune.
 *
 *   node dist/cli.js train   --lowres a.mft --highres b.mft --out model.json
 *   node dist/cli.js predict --model model.json --lowres a.mft --out recon.mft
 *   node dist/cli.js tune    --lowres a.mft --highres b.mft --budget 8 --out best.json
 *
 * Exit codes: 0 success, 1 numerical failure (diverged training), 2 usage/IO.
 */
import * as fs from "fs";

import { preparePair, snapshotCount, snapshotFactorize, snapshotMatrix } from "./data";
import { Mat } from "./linalg";
import { readMft, writeMft, Tensor } from "./mft";
import { modelFromJson, modelToJson, predictSnapshot, DecoderModel } from "./model";
import { DEFAULT_TRAIN, TrainConfig, TrainingDivergedError, evaluate, trainModel } from "./train";
import { DEFAULT_SPACE, tune } from "./tune";

interface Args {
  [key: string]: string | boolean;
}

function parseArgs(argv: string[]): Args {
  const args: Args = {};
  for (let i = 0; i < argv.length; i++) {
    const token = argv[i];
    if (!token.startsWith("--")) throw new Error(`unexpected argument ${token}`);
    const key = token.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      args[key] = argv[++i];
    } else {
      args[key] = true;
    }
  }
  return args;
}

function requireArg(args: Args, name: string): string {
  const value = args[name];
  if (typeof value !== "string") throw new Error(`missing required --${name}`);
  return value;
}

function intArg(args: Args, name: string, fallback: number): number {
  const value = args[name];
  if (value === undefined || value === true) return fallback;
  const parsed = parseInt(value as string, 10);
  if (!Number.isFinite(parsed)) throw new Error(`--${name} expects an integer`);
  return parsed;
}

function floatArg(args: Args, name: string, fallback: number): number {
  const value = args[name];
  if (value === undefined || value === true) return fallback;
  const parsed = parseFloat(value as string);
  if (!Number.isFinite(parsed)) throw new Error(`--${name} expects a number`);
  return parsed;
}

function intListArg(args: Args, name: string, fallback: number[]): number[] {
  const value = args[name];
  if (value === undefined || value === true) return fallback;
  return (value as string).split(",").map((s) => {
    const parsed = parseInt(s, 10);
    if (!Number.isFinite(parsed)) throw new Error(`--${name} expects comma-separated integers`);
    return parsed;
  });
}

function trainConfigFrom(args: Args): TrainConfig {
  return {
    epochs: intArg(args, "epochs", DEFAULT_TRAIN.epochs),
    batchSize: intArg(args, "batch", DEFAULT_TRAIN.batchSize),
    learningRate: floatArg(args, "lr", DEFAULT_TRAIN.learningRate),
    hiddenW: intListArg(args, "hidden-w", DEFAULT_TRAIN.hiddenW),
    hiddenT: intListArg(args, "hidden-t", DEFAULT_TRAIN.hiddenT),
    seed: intArg(args, "seed", DEFAULT_TRAIN.seed),
    patience: intArg(args, "patience", DEFAULT_TRAIN.patience),
  };
}

function loadPairArgs(args: Args) {
  const coarse = readMft(requireArg(args, "lowres"));
  const fine = readMft(requireArg(args, "highres"));
  const pRequested = args["modes"] !== undefined ? intArg(args, "modes", 0) : undefined;
  return preparePair(coarse, fine, pRequested);
}

function cmdTrain(args: Args): number {
  const pair = loadPairArgs(args);
  const cfg = trainConfigFrom(args);
  const outcome = trainModel(pair, cfg);
  const testLoss = evaluate(outcome.model, pair, outcome.split.test);
  const out = requireArg(args, "out");
  fs.writeFileSync(
    out,
    JSON.stringify(
      {
        model: modelToJson(outcome.model),
        config: cfg,
        bestEpoch: outcome.bestEpoch,
        bestValLoss: outcome.bestValLoss,
        testRrmse: testLoss,
        history: outcome.history,
      },
      null,
      2,
    ) + "\n",
  );
  console.log(
    `trained ${outcome.history.length} epochs; best val RRMSE ${(100 * outcome.bestValLoss).toFixed(2)}% ` +
      `(epoch ${outcome.bestEpoch}); test RRMSE ${(100 * testLoss).toFixed(2)}%`,
  );
  return 0;
}

function loadModelFile(path: string): DecoderModel {
  const payload = JSON.parse(fs.readFileSync(path, "utf-8"));
  return modelFromJson(payload.model ?? payload);
}

function cmdPredict(args: Args): number {
  const model = loadModelFile(requireArg(args, "model"));
  const coarse = readMft(requireArg(args, "lowres"));
  const k = snapshotCount(coarse);
  const start = intArg(args, "start", 0);
  const count = intArg(args, "count", k - start);
  if (start < 0 || start + count > k) throw new Error(`snapshot range ${start}+${count} exceeds K=${k}`);
  const fields: Mat[] = [];
  for (let i = start; i < start + count; i++) {
    fields.push(predictSnapshot(model, snapshotFactorize(snapshotMatrix(coarse, i), model.config.pPrime)));
  }
  const n1 = fields[0].rows;
  const n2 = fields[0].cols;
  const out: Tensor = { dims: [1, n1, n2, count], data: new Float64Array(n1 * n2 * count) };
  for (let s = 0; s < count; s++) {
    for (let i = 0; i < n1; i++) {
      for (let j = 0; j < n2; j++) {
        out.data[(i * n2 + j) * count + s] = fields[s].get(i, j);
      }
    }
  }
  writeMft(requireArg(args, "out"), out);
  console.log(`wrote ${count} enhanced snapshots (${n1}x${n2})`);
  return 0;
}

function cmdTune(args: Args): number {
  const pair = loadPairArgs(args);
  const base = trainConfigFrom(args);
  const budget = intArg(args, "budget", 6);
  const seed = intArg(args, "seed", 0);
  const outcome = tune(pair, DEFAULT_SPACE, budget, base, seed);
  const out = requireArg(args, "out");
  fs.writeFileSync(out, JSON.stringify(outcome, null, 2) + "\n");
  console.log(
    `best of ${budget}: val RRMSE ${(100 * outcome.best.valLoss).toFixed(2)}% ` +
      `(lr ${outcome.best.config.learningRate}, hiddenW [${outcome.best.config.hiddenW}])`,
  );
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const args = parseArgs(rest);
    switch (command) {
      case "train":
        return cmdTrain(args);
      case "predict":
        return cmdPredict(args);
      case "tune":
        return cmdTune(args);
      default:
        console.error("usage: cli.js {train|predict|tune} --flags (see source header)");
        return 2;
    }
  } catch (err) {
    if (err instanceof TrainingDivergedError) {
      console.error(`numerical failure: ${err.message} (history length ${err.history.length})`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
