import { parseArgs, run, writeImage } from "./cliUtil.js";
import { readFieldDump, readPoints } from "./fieldDump.js";
import { detectionPlot } from "./plots.js";

const USAGE = "plot-detection <rate-dump-base> <points.json> --out image.svg";

run(() => {
  const args = parseArgs(process.argv.slice(2), USAGE);
  if (args.inputs.length !== 2) {
    throw new Error(`expected a dump base and a points file\nusage: ${USAGE}`);
  }
  writeImage(args.out, detectionPlot(readFieldDump(args.inputs[0]), readPoints(args.inputs[1])));
});
