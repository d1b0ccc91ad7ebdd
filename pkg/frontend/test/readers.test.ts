import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { readFieldDump, readPoints, nodeValue } from "../src/fieldDump.js";
import { column, parseCsv, textColumn } from "../src/csv.js";

function writeDump(dir: string, name: string, shape: [number, number], values: number[],
                   headerPatch: Record<string, unknown> = {}): string {
  const base = join(dir, name);
  const header = {
    format: "field-dump/1",
    field: name,
    shape,
    dx: 0.1,
    dy: 0.1,
    dt: 0.05,
    x0: 0.0,
    y0: 0.0,
    time_index: 0,
    time: 0.0,
    config_hash: "abc123",
    dtype: "<f8",
    order: "C",
    ...headerPatch,
  };
  writeFileSync(base + ".json", JSON.stringify(header));
  writeFileSync(base + ".bin", Buffer.from(new Float64Array(values).buffer));
  return base;
}

describe("field dump reader", () => {
  it("round-trips values in C order", () => {
    const dir = mkdtempSync(join(tmpdir(), "dump-"));
    const base = writeDump(dir, "w", [2, 3], [1, 2, 3, 4, 5, 6]);
    const dump = readFieldDump(base);
    expect(dump.header.config_hash).toBe("abc123");
    expect(Array.from(dump.data)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(nodeValue(dump, 0, 2)).toBe(3);
    expect(nodeValue(dump, 1, 0)).toBe(4);
  });

  it("keeps non-finite values intact", () => {
    const dir = mkdtempSync(join(tmpdir(), "dump-"));
    const base = writeDump(dir, "u", [1, 3], [Infinity, -Infinity, 0.5]);
    const dump = readFieldDump(base);
    expect(dump.data[0]).toBe(Infinity);
    expect(dump.data[1]).toBe(-Infinity);
  });

  it("rejects a header whose shape disagrees with the payload", () => {
    const dir = mkdtempSync(join(tmpdir(), "dump-"));
    const base = writeDump(dir, "w", [2, 3], [1, 2, 3, 4]);
    expect(() => readFieldDump(base)).toThrow(/holds 4 values.*needs 6/);
  });

  it("rejects unknown formats and dtypes", () => {
    const dir = mkdtempSync(join(tmpdir(), "dump-"));
    const bad = writeDump(dir, "a", [1, 1], [1], { format: "field-dump/2" });
    expect(() => readFieldDump(bad)).toThrow(/unsupported format/);
    const worse = writeDump(dir, "b", [1, 1], [1], { dtype: ">f8" });
    expect(() => readFieldDump(worse)).toThrow(/little-endian/);
  });

  it("reads a points file and rejects other formats", () => {
    const dir = mkdtempSync(join(tmpdir(), "points-"));
    const good = join(dir, "points.json");
    writeFileSync(good, JSON.stringify({
      format: "points-json/1",
      config_hash: "abc",
      focal_point: [1.5, 0.6],
      evader_start: [1.0, 1.0],
      arrival_point: [2.5, 2.1],
    }));
    expect(readPoints(good).focal_point).toEqual([1.5, 0.6]);
    const bad = join(dir, "bad.json");
    writeFileSync(bad, JSON.stringify({ format: "nope/1" }));
    expect(() => readPoints(bad)).toThrow(/unsupported format/);
  });
});

describe("csv parser", () => {
  it("parses header and rows", () => {
    const csv = parseCsv("a,b\n1,2\n3,\n");
    expect(csv.header).toEqual(["a", "b"]);
    expect(column(csv, "a")).toEqual([1, 3]);
    expect(Number.isNaN(column(csv, "b")[1])).toBe(true);
    expect(textColumn(csv, "b")).toEqual(["2", ""]);
  });

  it("rejects empty files, header-only files, and ragged rows", () => {
    expect(() => parseCsv("", "x.csv")).toThrow(/x.csv: file is empty/);
    expect(() => parseCsv("a,b\n", "x.csv")).toThrow(/no data rows/);
    expect(() => parseCsv("a,b\n1,2,3\n", "x.csv")).toThrow(/row 1 has 3 cells/);
  });

  it("rejects a missing column by name", () => {
    const csv = parseCsv("a,b\n1,2\n");
    expect(() => column(csv, "zz", "y.csv")).toThrow(/no column named zz/);
  });
});
