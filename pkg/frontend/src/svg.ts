export interface WorldBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

const VIRIDIS: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Map a value in [0, 1] onto the colour scale. */
export function colorFor(u: number): string {
  const t = Math.min(1, Math.max(0, u)) * (VIRIDIS.length - 1);
  const k = Math.min(VIRIDIS.length - 2, Math.floor(t));
  const f = t - k;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r0, g0, b0] = VIRIDIS[k];
  const [r1, g1, b1] = VIRIDIS[k + 1];
  return `rgb(${mix(r0, r1)},${mix(g0, g1)},${mix(b0, b1)})`;
}

/** Accumulates SVG elements over a fixed world-to-pixel transform (y up). */
export class Canvas {
  private parts: string[] = [];
  readonly widthPx: number;
  readonly heightPx: number;
  private readonly scale: number;

  constructor(readonly world: WorldBox, widthPx = 560) {
    const spanX = world.x1 - world.x0;
    const spanY = world.y1 - world.y0;
    this.widthPx = widthPx;
    this.scale = widthPx / spanX;
    this.heightPx = Math.ceil(spanY * this.scale);
  }

  px(x: number): number {
    return (x - this.world.x0) * this.scale;
  }

  py(y: number): number {
    return this.heightPx - (y - this.world.y0) * this.scale;
  }

  cell(x: number, y: number, w: number, h: number, fill: string): void {
    // expand a hair so adjacent cells leave no hairline seams
    const pad = 0.35;
    this.parts.push(
      `<rect x="${trim(this.px(x) - pad)}" y="${trim(this.py(y + h) - pad)}" ` +
        `width="${trim(w * this.scale + 2 * pad)}" height="${trim(h * this.scale + 2 * pad)}" ` +
        `fill="${fill}"/>`,
    );
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 2, dash?: string): void {
    const pts = xs.map((x, i) => `${trim(this.px(x))},${trim(this.py(ys[i]))}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}" stroke-linecap="round" stroke-linejoin="round"${dashAttr}/>`,
    );
  }

  circle(x: number, y: number, rPx: number, fill: string, stroke = "none"): void {
    this.parts.push(
      `<circle cx="${trim(this.px(x))}" cy="${trim(this.py(y))}" r="${rPx}" ` +
        `fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  /** "+" cross marker. */
  cross(x: number, y: number, armPx: number, stroke: string): void {
    const cx = this.px(x);
    const cy = this.py(y);
    this.parts.push(
      `<path d="M ${trim(cx - armPx)} ${trim(cy)} H ${trim(cx + armPx)} ` +
        `M ${trim(cx)} ${trim(cy - armPx)} V ${trim(cy + armPx)}" ` +
        `stroke="${stroke}" stroke-width="2.5" fill="none"/>`,
    );
  }

  diamond(x: number, y: number, rPx: number, fill: string): void {
    const cx = this.px(x);
    const cy = this.py(y);
    const pts = [
      [cx, cy - rPx],
      [cx + rPx, cy],
      [cx, cy + rPx],
      [cx - rPx, cy],
    ]
      .map(([a, b]) => `${trim(a)},${trim(b)}`)
      .join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" stroke="black"/>`);
  }

  text(x: number, y: number, content: string, sizePx = 16, fill = "black"): void {
    this.parts.push(
      `<text x="${trim(this.px(x))}" y="${trim(this.py(y))}" font-size="${sizePx}" ` +
        `fill="${fill}" text-anchor="middle" dominant-baseline="central">${escapeXml(content)}</text>`,
    );
  }

  caption(content: string): void {
    this.parts.push(
      `<text x="6" y="16" font-size="13" fill="black" font-family="sans-serif">` +
        `${escapeXml(content)}</text>`,
    );
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.widthPx}" ` +
      `height="${this.heightPx}" viewBox="0 0 ${this.widthPx} ${this.heightPx}">` +
      `<rect width="100%" height="100%" fill="white"/>` +
      this.parts.join("") +
      `</svg>`
    );
  }
}

function trim(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
