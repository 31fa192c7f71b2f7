/** Snapshot extraction, per-snapshot factorization and the chronological
 * train/validation/test split. */
import { Mat, jacobiSvd } from "./linalg";
import { Tensor } from "./mft";

export interface SnapshotFactors {
  w: Mat; // n1 x p
  sigma: Float64Array; // p
  t: Mat; // n2 x p
}

export interface DataSplit {
  train: number[];
  validation: number[];
  test: number[];
}

/** Snapshot k of the single-component tensor (1, n1, n2, K) as an n1 x n2 matrix. */
export function snapshotMatrix(tensor: Tensor, k: number): Mat {
  if (tensor.dims.length !== 4 || tensor.dims[0] !== 1) {
    throw new Error(`expected a (1, n1, n2, K) tensor, got dims ${tensor.dims}`);
  }
  const [, n1, n2, kTotal] = tensor.dims;
  if (k < 0 || k >= kTotal) throw new Error(`snapshot ${k} out of range (K=${kTotal})`);
  const out = new Mat(n1, n2);
  for (let i = 0; i < n1; i++) {
    for (let j = 0; j < n2; j++) {
      out.set(i, j, tensor.data[(i * n2 + j) * kTotal + k]);
    }
  }
  return out;
}

export function snapshotCount(tensor: Tensor): number {
  return tensor.dims[tensor.dims.length - 1];
}

/** Truncated SVD of one coarse snapshot.
 *
 * Default keeps every available mode (pPrime = min(n1, n2)); a larger
 * request is clamped with a console warning.  Rejects non-finite input.
 */
export function snapshotFactorize(snapshot: Mat, pPrime?: number): SnapshotFactors {
  for (const v of snapshot.data) {
    if (!Number.isFinite(v)) throw new Error("snapshot contains non-finite entries");
  }
  const maxP = Math.min(snapshot.rows, snapshot.cols);
  let p = pPrime ?? maxP;
  if (p > maxP) {
    console.warn(`requested ${p} modes exceeds available ${maxP}; clamping`);
    p = maxP;
  }
  if (p < 1) throw new Error("need at least one retained mode");
  const { u, sigma, v } = jacobiSvd(snapshot);
  const w = new Mat(snapshot.rows, p);
  const t = new Mat(snapshot.cols, p);
  const s = new Float64Array(p);
  for (let j = 0; j < p; j++) {
    s[j] = sigma[j];
    for (let i = 0; i < snapshot.rows; i++) w.set(i, j, u.get(i, j));
    for (let i = 0; i < snapshot.cols; i++) t.set(i, j, v.get(i, j));
  }
  return { w, sigma: s, t };
}

/** Contiguous chronological split; fractions default to 70/10/20. */
export function chronologicalSplit(
  n: number,
  fractions: [number, number, number] = [0.7, 0.1, 0.2],
): DataSplit {
  const [fTrain, fVal, fTest] = fractions;
  const total = fTrain + fVal + fTest;
  if (Math.abs(total - 1.0) > 1e-9) throw new Error(`split fractions sum to ${total}, expected 1`);
  const nTest = Math.round(fTest * n);
  const nVal = Math.round(fVal * n);
  const nTrain = n - nVal - nTest;
  if (nTrain < 1 || nVal < 0 || nTest < 1) throw new Error(`split leaves empty parts for n=${n}`);
  const indices = Array.from({ length: n }, (_, i) => i);
  return {
    train: indices.slice(0, nTrain),
    validation: indices.slice(nTrain, nTrain + nVal),
    test: indices.slice(nTrain + nVal),
  };
}

export interface DatasetPair {
  coarse: Tensor;
  fine: Tensor;
  factors: SnapshotFactors[];
  targets: Mat[];
}

/** Factorize every coarse snapshot and collect the fine targets. */
export function preparePair(coarse: Tensor, fine: Tensor, pPrime?: number): DatasetPair {
  const k = snapshotCount(coarse);
  if (snapshotCount(fine) !== k) {
    throw new Error(
      `snapshot counts differ: coarse ${k} vs fine ${snapshotCount(fine)}`,
    );
  }
  const factors: SnapshotFactors[] = [];
  const targets: Mat[] = [];
  for (let i = 0; i < k; i++) {
    factors.push(snapshotFactorize(snapshotMatrix(coarse, i), pPrime));
    targets.push(snapshotMatrix(fine, i));
  }
  return { coarse, fine, factors, targets };
}
