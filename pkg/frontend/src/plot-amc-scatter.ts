import { parseArgs, run, writeImage } from "./cliUtil.js";
import { readCsv } from "./csv.js";
import { amcScatterPlot } from "./plots.js";

const USAGE = "plot-amc-scatter <scatter.csv> --out image.svg";

run(() => {
  const args = parseArgs(process.argv.slice(2), USAGE);
  if (args.inputs.length !== 1) {
    throw new Error(`expected one scatter CSV\nusage: ${USAGE}`);
  }
  writeImage(args.out, amcScatterPlot(readCsv(args.inputs[0]), args.inputs[0]));
});
