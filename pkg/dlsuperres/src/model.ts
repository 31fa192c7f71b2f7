/** Twin-decoder reconstruction model.
 *
 * One coarse snapshot factorizes as W Sigma T^T; two multilayer
 * perceptrons expand the spatial factor columns (n1 -> n1Hat) and the
 * temporal-direction factor columns (n2 -> n2Hat), sharing weights across
 * the retained columns, and the output layer recombines them:
 * Vhat = decodeW(W) Sigma decodeT(T)^T.  The training loss is the relative
 * root mean square error of the reconstructed snapshots, and gradients are
 * computed analytically (verified against finite differences in the tests).
 */
import { Mat, matmul, scaleColumns, transpose, zeros } from "./linalg";
import { SnapshotFactors } from "./data";
import { Rng } from "./rng";

export interface MlpSpec {
  sizes: number[]; // [input, hidden..., output]
}

export interface Mlp {
  sizes: number[];
  weights: Mat[]; // weights[l]: sizes[l+1] x sizes[l]
  biases: Float64Array[]; // biases[l]: sizes[l+1]
}

export interface ModelConfig {
  inputW: number;
  outputW: number;
  hiddenW: number[];
  inputT: number;
  outputT: number;
  hiddenT: number[];
  pPrime: number;
}

export interface DecoderModel {
  config: ModelConfig;
  decW: Mlp;
  decT: Mlp;
}

export function initMlp(sizes: number[], rng: Rng): Mlp {
  if (sizes.length < 2) throw new Error("an MLP needs at least input and output sizes");
  const weights: Mat[] = [];
  const biases: Float64Array[] = [];
  for (let l = 0; l + 1 < sizes.length; l++) {
    const fanIn = sizes[l];
    const fanOut = sizes[l + 1];
    const scale = Math.sqrt(2.0 / (fanIn + fanOut));
    const w = new Mat(fanOut, fanIn);
    for (let i = 0; i < w.data.length; i++) w.data[i] = scale * rng.normal();
    weights.push(w);
    biases.push(new Float64Array(fanOut));
  }
  return { sizes: sizes.slice(), weights, biases };
}

export function initModel(config: ModelConfig, seed: number): DecoderModel {
  const rng = new Rng(seed);
  return {
    config,
    decW: initMlp([config.inputW, ...config.hiddenW, config.outputW], rng),
    decT: initMlp([config.inputT, ...config.hiddenT, config.outputT], rng),
  };
}

interface MlpTrace {
  activations: Mat[]; // per layer, columns are samples
}

/** Forward pass; hidden layers tanh, output linear.  X columns are samples. */
export function mlpForward(mlp: Mlp, x: Mat): MlpTrace {
  const activations = [x];
  let a = x;
  for (let l = 0; l < mlp.weights.length; l++) {
    const z = matmul(mlp.weights[l], a);
    for (let i = 0; i < z.rows; i++) {
      const b = mlp.biases[l][i];
      for (let j = 0; j < z.cols; j++) z.data[i * z.cols + j] += b;
    }
    if (l + 1 < mlp.weights.length) {
      for (let i = 0; i < z.data.length; i++) z.data[i] = Math.tanh(z.data[i]);
    }
    activations.push(z);
    a = z;
  }
  return { activations };
}

export interface MlpGrads {
  weights: Mat[];
  biases: Float64Array[];
}

export function zeroGrads(mlp: Mlp): MlpGrads {
  return {
    weights: mlp.weights.map((w) => zeros(w.rows, w.cols)),
    biases: mlp.biases.map((b) => new Float64Array(b.length)),
  };
}

/** Backpropagate dLoss/dOutput through the MLP, accumulating into grads. */
export function mlpBackward(mlp: Mlp, trace: MlpTrace, gradOut: Mat, grads: MlpGrads): void {
  let delta = gradOut;
  for (let l = mlp.weights.length - 1; l >= 0; l--) {
    const aPrev = trace.activations[l];
    const gw = matmul(delta, transpose(aPrev));
    const dst = grads.weights[l];
    for (let i = 0; i < dst.data.length; i++) dst.data[i] += gw.data[i];
    const gb = grads.biases[l];
    for (let i = 0; i < delta.rows; i++) {
      let s = 0;
      for (let j = 0; j < delta.cols; j++) s += delta.data[i * delta.cols + j];
      gb[i] += s;
    }
    if (l > 0) {
      const back = matmul(transpose(mlp.weights[l]), delta);
      const act = trace.activations[l]; // tanh output of layer l
      for (let i = 0; i < back.data.length; i++) {
        back.data[i] *= 1.0 - act.data[i] * act.data[i];
      }
      delta = back;
    }
  }
}

export interface SnapshotTrace {
  traceW: MlpTrace;
  traceT: MlpTrace;
  what: Mat;
  that: Mat;
  vhat: Mat;
  sigma: Float64Array;
}

/** Enhanced-resolution snapshot from one set of coarse factors. */
export function forwardSnapshot(model: DecoderModel, factors: SnapshotFactors): SnapshotTrace {
  if (factors.w.rows !== model.config.inputW || factors.t.rows !== model.config.inputT) {
    throw new Error(
      `factor shapes (${factors.w.rows}, ${factors.t.rows}) do not match model inputs ` +
        `(${model.config.inputW}, ${model.config.inputT})`,
    );
  }
  if (factors.sigma.length !== model.config.pPrime) {
    throw new Error(`expected ${model.config.pPrime} retained modes, got ${factors.sigma.length}`);
  }
  const traceW = mlpForward(model.decW, factors.w);
  const traceT = mlpForward(model.decT, factors.t);
  const what = traceW.activations[traceW.activations.length - 1];
  const that = traceT.activations[traceT.activations.length - 1];
  const vhat = matmul(scaleColumns(what, factors.sigma), transpose(that));
  return { traceW, traceT, what, that, vhat, sigma: factors.sigma };
}

export function predictSnapshot(model: DecoderModel, factors: SnapshotFactors): Mat {
  return forwardSnapshot(model, factors).vhat;
}

export interface ModelGrads {
  decW: MlpGrads;
  decT: MlpGrads;
}

export function zeroModelGrads(model: DecoderModel): ModelGrads {
  return { decW: zeroGrads(model.decW), decT: zeroGrads(model.decT) };
}

/** Relative RMSE over a batch plus analytic parameter gradients.
 *
 * loss = sqrt(sum_k ||V_k - Vhat_k||^2 / sum_k ||V_k||^2); the gradient of
 * each reconstructed snapshot is (Vhat_k - V_k) / sqrt(num * den).
 */
export function batchLossAndGrads(
  model: DecoderModel,
  factorsList: SnapshotFactors[],
  targets: Mat[],
  grads?: ModelGrads,
): number {
  if (factorsList.length !== targets.length) throw new Error("batch size mismatch");
  const traces: SnapshotTrace[] = [];
  let num = 0;
  let den = 0;
  for (let k = 0; k < factorsList.length; k++) {
    const trace = forwardSnapshot(model, factorsList[k]);
    traces.push(trace);
    const target = targets[k];
    for (let i = 0; i < target.data.length; i++) {
      const d = trace.vhat.data[i] - target.data[i];
      num += d * d;
      den += target.data[i] * target.data[i];
    }
  }
  if (den === 0) throw new Error("reference snapshots are identically zero");
  const loss = Math.sqrt(num / den);
  if (grads && num > 0) {
    const scale = 1.0 / Math.sqrt(num * den);
    for (let k = 0; k < traces.length; k++) {
      const { traceW, traceT, what, that, vhat, sigma } = traces[k];
      const g = new Mat(vhat.rows, vhat.cols);
      const target = targets[k];
      for (let i = 0; i < g.data.length; i++) {
        g.data[i] = (vhat.data[i] - target.data[i]) * scale;
      }
      // Vhat = What diag(sigma) That^T
      const gWhat = scaleColumns(matmul(g, that), sigma);
      const gThat = scaleColumns(matmul(transpose(g), what), sigma);
      mlpBackward(model.decW, traceW, gWhat, grads.decW);
      mlpBackward(model.decT, traceT, gThat, grads.decT);
    }
  }
  return loss;
}

/** Flat views over parameters, used by the optimizer and checkpoints. */
export function parameterArrays(model: DecoderModel): Float64Array[] {
  const out: Float64Array[] = [];
  for (const mlp of [model.decW, model.decT]) {
    for (const w of mlp.weights) out.push(w.data);
    for (const b of mlp.biases) out.push(b);
  }
  return out;
}

export function gradientArrays(grads: ModelGrads): Float64Array[] {
  const out: Float64Array[] = [];
  for (const g of [grads.decW, grads.decT]) {
    for (const w of g.weights) out.push(w.data);
    for (const b of g.biases) out.push(b);
  }
  return out;
}

export function cloneModel(model: DecoderModel): DecoderModel {
  const cloneMlp = (mlp: Mlp): Mlp => ({
    sizes: mlp.sizes.slice(),
    weights: mlp.weights.map((w) => w.copy()),
    biases: mlp.biases.map((b) => b.slice()),
  });
  return { config: { ...model.config }, decW: cloneMlp(model.decW), decT: cloneMlp(model.decT) };
}

export function modelToJson(model: DecoderModel): object {
  const mlpJson = (mlp: Mlp) => ({
    sizes: mlp.sizes,
    weights: mlp.weights.map((w) => Array.from(w.data)),
    biases: mlp.biases.map((b) => Array.from(b)),
  });
  return { config: model.config, decW: mlpJson(model.decW), decT: mlpJson(model.decT) };
}

export function modelFromJson(payload: any): DecoderModel {
  const mlpFrom = (obj: any): Mlp => {
    const sizes: number[] = obj.sizes;
    const weights = sizes.slice(0, -1).map((_: number, l: number) => {
      return new Mat(sizes[l + 1], sizes[l], Float64Array.from(obj.weights[l]));
    });
    const biases = obj.biases.map((b: number[]) => Float64Array.from(b));
    return { sizes, weights, biases };
  };
  return { config: payload.config, decW: mlpFrom(payload.decW), decT: mlpFrom(payload.decT) };
}
