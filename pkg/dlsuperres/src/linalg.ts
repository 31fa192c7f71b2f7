/** Dense float64 matrices and a one-sided Jacobi SVD, enough for the
 * per-snapshot factorizations this package needs (small matrices). */

export class Mat {
  readonly rows: number;
  readonly cols: number;
  readonly data: Float64Array;

  constructor(rows: number, cols: number, data?: Float64Array | number[]) {
    this.rows = rows;
    this.cols = cols;
    if (data !== undefined) {
      if (data.length !== rows * cols) {
        throw new Error(`data length ${data.length} != ${rows}x${cols}`);
      }
      this.data = data instanceof Float64Array ? data : Float64Array.from(data);
    } else {
      this.data = new Float64Array(rows * cols);
    }
  }

  get(i: number, j: number): number {
    return this.data[i * this.cols + j];
  }

  set(i: number, j: number, v: number): void {
    this.data[i * this.cols + j] = v;
  }

  copy(): Mat {
    return new Mat(this.rows, this.cols, this.data.slice());
  }

  column(j: number): Float64Array {
    const out = new Float64Array(this.rows);
    for (let i = 0; i < this.rows; i++) out[i] = this.get(i, j);
    return out;
  }
}

export function zeros(rows: number, cols: number): Mat {
  return new Mat(rows, cols);
}

export function transpose(a: Mat): Mat {
  const out = new Mat(a.cols, a.rows);
  for (let i = 0; i < a.rows; i++) {
    for (let j = 0; j < a.cols; j++) out.set(j, i, a.get(i, j));
  }
  return out;
}

export function matmul(a: Mat, b: Mat): Mat {
  if (a.cols !== b.rows) throw new Error(`matmul shape mismatch: ${a.cols} vs ${b.rows}`);
  const out = new Mat(a.rows, b.cols);
  for (let i = 0; i < a.rows; i++) {
    for (let k = 0; k < a.cols; k++) {
      const aik = a.get(i, k);
      if (aik === 0) continue;
      for (let j = 0; j < b.cols; j++) {
        out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
      }
    }
  }
  return out;
}

/** A * diag(d): scales column j by d[j]. */
export function scaleColumns(a: Mat, d: Float64Array | number[]): Mat {
  if (d.length !== a.cols) throw new Error("diagonal length mismatch");
  const out = a.copy();
  for (let i = 0; i < a.rows; i++) {
    for (let j = 0; j < a.cols; j++) out.data[i * a.cols + j] *= d[j];
  }
  return out;
}

export function frobenius(a: Mat): number {
  let s = 0;
  for (const v of a.data) s += v * v;
  return Math.sqrt(s);
}

export function sub(a: Mat, b: Mat): Mat {
  if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("sub shape mismatch");
  const out = new Mat(a.rows, a.cols);
  for (let i = 0; i < a.data.length; i++) out.data[i] = a.data[i] - b.data[i];
  return out;
}

export interface Svd {
  u: Mat; // m x n, orthonormal columns (zero columns where sigma vanishes)
  sigma: Float64Array; // n, non-increasing
  v: Mat; // n x n, orthonormal columns
}

/** Economy SVD by one-sided (Hestenes) Jacobi rotations.
 *
 * Works on the tall orientation internally; accurate for the small
 * snapshot matrices used here.  Columns with negligible singular value are
 * zeroed rather than normalized.  The leading entry (largest magnitude) of
 * every left singular vector is made non-negative so results are
 * reproducible.
 */
export function jacobiSvd(a: Mat): Svd {
  const tall = a.rows >= a.cols;
  const work = tall ? a.copy() : transpose(a);
  const m = work.rows;
  const n = work.cols;
  const v = new Mat(n, n);
  for (let j = 0; j < n; j++) v.set(j, j, 1.0);

  const maxSweeps = 60;
  const tol = 1e-14;
  for (let sweep = 0; sweep < maxSweeps; sweep++) {
    let rotated = false;
    for (let p = 0; p < n - 1; p++) {
      for (let q = p + 1; q < n; q++) {
        let alpha = 0;
        let beta = 0;
        let gamma = 0;
        for (let i = 0; i < m; i++) {
          const up = work.get(i, p);
          const uq = work.get(i, q);
          alpha += up * up;
          beta += uq * uq;
          gamma += up * uq;
        }
        if (Math.abs(gamma) <= tol * Math.sqrt(alpha * beta) || gamma === 0) continue;
        rotated = true;
        const zeta = (beta - alpha) / (2 * gamma);
        const t = Math.sign(zeta) / (Math.abs(zeta) + Math.sqrt(1 + zeta * zeta));
        const c = 1 / Math.sqrt(1 + t * t);
        const s = c * t;
        for (let i = 0; i < m; i++) {
          const up = work.get(i, p);
          const uq = work.get(i, q);
          work.set(i, p, c * up - s * uq);
          work.set(i, q, s * up + c * uq);
        }
        for (let i = 0; i < n; i++) {
          const vp = v.get(i, p);
          const vq = v.get(i, q);
          v.set(i, p, c * vp - s * vq);
          v.set(i, q, s * vp + c * vq);
        }
      }
    }
    if (!rotated) break;
  }

  const sigma = new Float64Array(n);
  for (let j = 0; j < n; j++) {
    let norm = 0;
    for (let i = 0; i < m; i++) norm += work.get(i, j) ** 2;
    sigma[j] = Math.sqrt(norm);
  }
  const order = Array.from({ length: n }, (_, j) => j).sort((x, y) => sigma[y] - sigma[x]);
  const sortedSigma = new Float64Array(n);
  const u = new Mat(m, n);
  const vSorted = new Mat(n, n);
  const cutoff = sigma[order[0]] * 1e-14;
  for (let jj = 0; jj < n; jj++) {
    const src = order[jj];
    sortedSigma[jj] = sigma[src];
    if (sigma[src] > cutoff && sigma[src] > 0) {
      for (let i = 0; i < m; i++) u.set(i, jj, work.get(i, src) / sigma[src]);
    }
    for (let i = 0; i < n; i++) vSorted.set(i, jj, v.get(i, src));
  }
  // deterministic sign: largest-magnitude entry of each u column >= 0
  for (let j = 0; j < n; j++) {
    let lead = 0;
    let leadAbs = -1;
    for (let i = 0; i < m; i++) {
      const mag = Math.abs(u.get(i, j));
      if (mag > leadAbs) {
        leadAbs = mag;
        lead = i;
      }
    }
    if (u.get(lead, j) < 0) {
      for (let i = 0; i < m; i++) u.set(i, j, -u.get(i, j));
      for (let i = 0; i < n; i++) vSorted.set(i, j, -vSorted.get(i, j));
    }
  }
  if (tall) return { u, sigma: sortedSigma, v: vSorted };
  return { u: vSorted, sigma: sortedSigma, v: u };
}

/** ||A - U diag(sigma) V^T||_F / ||A||_F, for SVD sanity checks. */
export function svdResidual(a: Mat, svd: Svd): number {
  const recon = matmul(scaleColumns(svd.u, svd.sigma), transpose(svd.v));
  return frobenius(sub(a, recon)) / frobenius(a);
}
