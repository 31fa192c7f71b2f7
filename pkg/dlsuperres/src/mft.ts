/** Reader/writer for the MFT binary tensor container shared with the
 * repair toolkit: magic "MFT1", u8 order, little-endian u32 dims, then
 * row-major little-endian float64 entries (NaN marks gaps). */
import * as fs from "fs";

export interface Tensor {
  dims: number[];
  data: Float64Array;
}

const MAGIC = "MFT1";

export function readMft(path: string): Tensor {
  const raw = fs.readFileSync(path);
  if (raw.length < 5 || raw.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`${path}: not an MFT file (bad magic)`);
  }
  const order = raw.readUInt8(4);
  const headerEnd = 5 + 4 * order;
  if (raw.length < headerEnd) throw new Error(`${path}: truncated header`);
  const dims: number[] = [];
  for (let d = 0; d < order; d++) {
    const n = raw.readUInt32LE(5 + 4 * d);
    if (n === 0) throw new Error(`${path}: zero dimension`);
    dims.push(n);
  }
  const count = dims.reduce((a, b) => a * b, 1);
  if (raw.length !== headerEnd + 8 * count) {
    throw new Error(`${path}: expected ${headerEnd + 8 * count} bytes, found ${raw.length}`);
  }
  const data = new Float64Array(count);
  for (let i = 0; i < count; i++) data[i] = raw.readDoubleLE(headerEnd + 8 * i);
  return { dims, data };
}

export function writeMft(path: string, tensor: Tensor): void {
  const count = tensor.dims.reduce((a, b) => a * b, 1);
  if (count !== tensor.data.length) {
    throw new Error(`dims ${tensor.dims} do not match data length ${tensor.data.length}`);
  }
  const buf = Buffer.alloc(5 + 4 * tensor.dims.length + 8 * count);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt8(tensor.dims.length, 4);
  tensor.dims.forEach((n, d) => buf.writeUInt32LE(n, 5 + 4 * d));
  const offset = 5 + 4 * tensor.dims.length;
  for (let i = 0; i < count; i++) buf.writeDoubleLE(tensor.data[i], offset + 8 * i);
  fs.writeFileSync(path, buf);
}
