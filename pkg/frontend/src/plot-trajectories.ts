import { parseArgs, run, writeImage } from "./cliUtil.js";
import { readCsv } from "./csv.js";
import { trajectoriesPlot } from "./plots.js";

const USAGE = "plot-trajectories <trajectory.csv> [more.csv ...] --out image.svg";

run(() => {
  const args = parseArgs(process.argv.slice(2), USAGE);
  if (args.inputs.length < 1) {
    throw new Error(`expected at least one trajectory CSV\nusage: ${USAGE}`);
  }
  writeImage(args.out, trajectoriesPlot(args.inputs.map(readCsv), args.inputs));
});
