import { readFileSync } from "node:fs";

export interface FieldDumpHeader {
  format: string;
  field: string;
  shape: [number, number];
  dx: number;
  dy: number;
  dt: number;
  x0: number;
  y0: number;
  time_index: number | null;
  time: number | null;
  config_hash: string;
  dtype: string;
  order: string;
}

export interface FieldDump {
  header: FieldDumpHeader;
  data: Float64Array;
}

/** Read a <base>.json / <base>.bin field dump pair (little-endian float64, C order). */
export function readFieldDump(base: string): FieldDump {
  const header = JSON.parse(readFileSync(base + ".json", "utf8")) as FieldDumpHeader;
  if (header.format !== "field-dump/1") {
    throw new Error(`${base}.json: unsupported format ${JSON.stringify(header.format)}`);
  }
  if (header.dtype !== "<f8" || header.order !== "C") {
    throw new Error(`${base}.json: expected little-endian float64 in C order`);
  }
  const raw = readFileSync(base + ".bin");
  const want = header.shape[0] * header.shape[1];
  if (raw.byteLength !== want * 8) {
    throw new Error(
      `${base}.bin holds ${raw.byteLength / 8} values but the header shape needs ${want}`,
    );
  }
  // slice() copies into a fresh, 8-byte-aligned buffer
  const data = new Float64Array(raw.buffer.slice(raw.byteOffset, raw.byteOffset + want * 8));
  return { header, data };
}

/** Value at grid node (i, j); i indexes x, j indexes y. */
export function nodeValue(dump: FieldDump, i: number, j: number): number {
  return dump.data[i * dump.header.shape[1] + j];
}

export interface PointsFile {
  format: string;
  config_hash: string;
  focal_point: [number, number];
  evader_start: [number, number];
  arrival_point: [number, number];
}

export function readPoints(path: string): PointsFile {
  const points = JSON.parse(readFileSync(path, "utf8")) as PointsFile;
  if (points.format !== "points-json/1") {
    throw new Error(`${path}: unsupported format ${JSON.stringify(points.format)}`);
  }
  return points;
}
