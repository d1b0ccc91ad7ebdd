import { readFileSync } from "node:fs";

export interface Csv {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, label = "<csv>"): Csv {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${label}: file is empty`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  if (rows.length === 0) {
    throw new Error(`${label}: no data rows after the header`);
  }
  rows.forEach((row, i) => {
    if (row.length !== header.length) {
      throw new Error(`${label}: row ${i + 1} has ${row.length} cells, header has ${header.length}`);
    }
  });
  return { header, rows };
}

export function readCsv(path: string): Csv {
  return parseCsv(readFileSync(path, "utf8"), path);
}

/** Numeric column by header name; blank cells become NaN. */
export function column(csv: Csv, name: string, label = "<csv>"): number[] {
  const idx = csv.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${label}: no column named ${name}`);
  }
  return csv.rows.map((row) => (row[idx] === "" ? NaN : Number(row[idx])));
}

export function textColumn(csv: Csv, name: string, label = "<csv>"): string[] {
  const idx = csv.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${label}: no column named ${name}`);
  }
  return csv.rows.map((row) => row[idx]);
}
