import { parseArgs, run, writeImage } from "./cliUtil.js";
import { readFieldDump } from "./fieldDump.js";
import { valuePlot } from "./plots.js";

const USAGE = "plot-value <value-dump-base> --out image.svg";

run(() => {
  const args = parseArgs(process.argv.slice(2), USAGE);
  if (args.inputs.length !== 1) {
    throw new Error(`expected one dump base\nusage: ${USAGE}`);
  }
  writeImage(args.out, valuePlot(readFieldDump(args.inputs[0])));
});
