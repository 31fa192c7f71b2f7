import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { readMft, writeMft } from "../src/mft";

const FIXTURES = path.join(__dirname, "..", "fixtures");

describe("mft container", () => {
  it("round-trips dims and values", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "mft-"));
    const file = path.join(dir, "t.mft");
    const dims = [1, 3, 2, 4];
    const data = Float64Array.from({ length: 24 }, (_, i) => i * 0.5 - 3);
    data[5] = NaN;
    writeMft(file, { dims, data });
    const back = readMft(file);
    expect(back.dims).toEqual(dims);
    expect(Number.isNaN(back.data[5])).toBe(true);
    back.data[5] = data[5] = 0;
    expect(Array.from(back.data)).toEqual(Array.from(data));
  });

  it("reads the exchanged fixture files", () => {
    const coarse = readMft(path.join(FIXTURES, "lowres.mft"));
    const fine = readMft(path.join(FIXTURES, "highres.mft"));
    expect(coarse.dims).toEqual([1, 16, 8, 120]);
    expect(fine.dims).toEqual([1, 64, 32, 120]);
    for (const v of coarse.data) expect(Number.isFinite(v)).toBe(true);
  });

  it("rejects bad magic and truncated files", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "mft-"));
    const bad = path.join(dir, "bad.mft");
    fs.writeFileSync(bad, Buffer.from("NOPExxxxxxxxxxxx"));
    expect(() => readMft(bad)).toThrow(/magic/);
    const file = path.join(dir, "short.mft");
    writeMft(file, { dims: [2, 2], data: Float64Array.from([1, 2, 3, 4]) });
    const raw = fs.readFileSync(file);
    fs.writeFileSync(file, raw.subarray(0, raw.length - 4));
    expect(() => readMft(file)).toThrow();
  });
});
