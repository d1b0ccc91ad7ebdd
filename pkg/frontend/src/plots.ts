import { Canvas, colorFor } from "./svg.js";
import { FieldDump, PointsFile, nodeValue } from "./fieldDump.js";
import { Csv, column, textColumn } from "./csv.js";

function dumpWorld(dump: FieldDump): { nx: number; ny: number; dx: number; dy: number } {
  const [nx, ny] = dump.header.shape;
  return { nx, ny, dx: dump.header.dx, dy: dump.header.dy };
}

function heatmap(
  canvas: Canvas,
  dump: FieldDump,
  value: (raw: number) => number | null,
): void {
  const { nx, ny, dx, dy } = dumpWorld(dump);
  for (let i = 0; i < nx; i++) {
    for (let j = 0; j < ny; j++) {
      const u = value(nodeValue(dump, i, j));
      if (u === null) continue;
      // node-centred cells; border nodes own a half cell
      const x = dump.header.x0 + (i - 0.5) * dx;
      const y = dump.header.y0 + (j - 0.5) * dy;
      canvas.cell(x, y, dx, dy, colorFor(u));
    }
  }
}

function dumpCanvas(dump: FieldDump): Canvas {
  const { nx, ny, dx, dy } = dumpWorld(dump);
  return new Canvas({
    x0: dump.header.x0,
    y0: dump.header.y0,
    x1: dump.header.x0 + (nx - 1) * dx,
    y1: dump.header.y0 + (ny - 1) * dy,
  });
}

/** Pointwise detection probability 1 - exp(-lambda dt), focal "+", evader start diamond. */
export function detectionPlot(dump: FieldDump, points: PointsFile): string {
  const dt = dump.header.dt;
  let top = 0;
  for (const lam of dump.data) {
    if (Number.isFinite(lam)) top = Math.max(top, 1 - Math.exp(-lam * dt));
  }
  const canvas = dumpCanvas(dump);
  heatmap(canvas, dump, (lam) =>
    Number.isFinite(lam) ? (top > 0 ? (1 - Math.exp(-lam * dt)) / top : 0) : null,
  );
  canvas.cross(points.focal_point[0], points.focal_point[1], 8, "white");
  canvas.diamond(points.evader_start[0], points.evader_start[1], 7, "#2ca02c");
  canvas.caption(`detection probability over dt = ${dt}, peak ${top.toExponential(3)}`);
  return canvas.toString();
}

/** Expected-energy field with unreachable (non-finite) nodes masked out. */
export function valuePlot(dump: FieldDump): string {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of dump.data) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    throw new Error("value field has no finite nodes to draw");
  }
  const span = hi > lo ? hi - lo : 1;
  const canvas = dumpCanvas(dump);
  heatmap(canvas, dump, (v) => (Number.isFinite(v) ? (v - lo) / span : null));
  canvas.caption(`value field, range [${lo.toPrecision(4)}, ${hi.toPrecision(4)}] J`);
  return canvas.toString();
}

const PRECHASE = new Set(["hover", "track", "stalk"]);
const START_COLORS = ["#d62728", "#1f77b4", "#9467bd", "#8c564b"];

/** Traced pursuits: evader path green, stalk end starred, camouflaged samples gold. */
export function trajectoriesPlot(trajectories: Csv[], labels: string[] = []): string {
  if (trajectories.length === 0) {
    throw new Error("no trajectory files given");
  }
  const cols = trajectories.map((csv, k) => {
    const label = labels[k] ?? `trajectory ${k + 1}`;
    return {
      xP: column(csv, "x_P", label),
      yP: column(csv, "y_P", label),
      xE: column(csv, "x_E", label),
      yE: column(csv, "y_E", label),
      phase: textColumn(csv, "phase", label),
      amc: textColumn(csv, "amc", label),
    };
  });

  let x0 = Infinity, y0 = Infinity, x1 = -Infinity, y1 = -Infinity;
  for (const c of cols) {
    for (const v of [...c.xP, ...c.xE]) {
      x0 = Math.min(x0, v);
      x1 = Math.max(x1, v);
    }
    for (const v of [...c.yP, ...c.yE]) {
      y0 = Math.min(y0, v);
      y1 = Math.max(y1, v);
    }
  }
  const pad = Math.max(x1 - x0, y1 - y0) * 0.08 + 1e-9;
  const canvas = new Canvas({ x0: x0 - pad, y0: y0 - pad, x1: x1 + pad, y1: y1 + pad });

  canvas.polyline(cols[0].xE, cols[0].yE, "#2ca02c", 3);

  cols.forEach((c, k) => {
    const base = START_COLORS[k % START_COLORS.length];
    let seg: number[] = [];
    let segPhase = "";
    const flush = () => {
      if (seg.length >= 2) {
        const xs = seg.map((i) => c.xP[i]);
        const ys = seg.map((i) => c.yP[i]);
        if (segPhase === "chase") canvas.polyline(xs, ys, base, 2, "6 4");
        else canvas.polyline(xs, ys, base, 2);
      }
    };
    c.phase.forEach((ph, i) => {
      const kind = PRECHASE.has(ph) ? "pre" : "chase";
      if (kind !== segPhase && seg.length > 0) {
        seg.push(i);
        flush();
        seg = [];
      }
      segPhase = kind;
      seg.push(i);
    });
    flush();

    c.amc.forEach((flag, i) => {
      if (flag === "1") canvas.circle(c.xP[i], c.yP[i], 3.2, "#e6b800");
    });

    const firstChase = c.phase.findIndex((ph) => !PRECHASE.has(ph));
    if (firstChase > 0) {
      canvas.text(c.xP[firstChase - 1], c.yP[firstChase - 1], "★", 18);
    }
    canvas.text(c.xP[0], c.yP[0], "X", 15, base);
  });

  canvas.caption("evader green, pursuers by start, camouflaged samples gold");
  return canvas.toString();
}

/** Camouflage fraction of each sampled start, coloured 0 to 1. */
export function amcScatterPlot(scatter: Csv, label = "scatter"): string {
  const xs = column(scatter, "x0", label);
  const ys = column(scatter, "y0", label);
  const fs = column(scatter, "amc_fraction", label);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = Math.min(...ys), y1 = Math.max(...ys);
  const pad = Math.max(x1 - x0, y1 - y0) * 0.08 + 1e-9;
  const canvas = new Canvas({ x0: x0 - pad, y0: y0 - pad, x1: x1 + pad, y1: y1 + pad });
  xs.forEach((x, i) => {
    canvas.circle(x, ys[i], 2.6, colorFor(fs[i]));
  });
  canvas.caption(`camouflage fraction at ${xs.length} starts (dark 0, bright 1)`);
  return canvas.toString();
}
