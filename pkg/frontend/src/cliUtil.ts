import { writeFileSync } from "node:fs";

export interface Args {
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[], usage: string): Args {
  const inputs: string[] = [];
  let out: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--out") {
      out = argv[++i] ?? null;
      if (out === null) throw new Error(`--out needs a path\nusage: ${usage}`);
    } else if (a.startsWith("--")) {
      throw new Error(`unknown flag ${a}\nusage: ${usage}`);
    } else {
      inputs.push(a);
    }
  }
  if (out === null) {
    throw new Error(`missing --out\nusage: ${usage}`);
  }
  return { inputs, out };
}

export function writeImage(path: string, svg: string): void {
  if (svg.length === 0) {
    throw new Error("refusing to write an empty image");
  }
  writeFileSync(path, svg);
}

/** Run a script body; any thrown error becomes a one-line message and exit 1. */
export function run(body: () => void): void {
  try {
    body();
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    process.exit(1);
  }
}
