/** Deterministic string-based SVG assembly: linear scales, axes, polylines,
 * shaded bands, and rectangles.  No DOM, no randomness, no timestamps. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  if (lo === hi) return [lo];
  const step = niceStep((hi - lo) / count);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  if (norm <= 1) return mag;
  if (norm <= 2) return 2 * mag;
  if (norm <= 5) return 5 * mag;
  return 10 * mag;
}

const fmt = (v: number): string => {
  const s = v.toPrecision(6);
  return String(Number(s));
};

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  raw(s: string): void {
    this.parts.push(s);
  }

  text(x: number, y: number, content: string, opts: Record<string, string> = {}): void {
    const attrs = Object.entries({ x: fmt(x), y: fmt(y), "font-size": "11",
                                   "font-family": "sans-serif", ...opts })
      .map(([k, v]) => `${k}="${v}"`).join(" ");
    this.parts.push(`<text ${attrs}>${esc(content)}</text>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#444",
       width = 1): void {
    this.parts.push(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
      `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}"/>`);
  }

  /** Closed band between an upper and a (reversed) lower boundary. */
  band(upper: Array<[number, number]>, lower: Array<[number, number]>,
       fill: string, opacity = 0.2): void {
    const pts = [...upper, ...[...lower].reverse()]
      .map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" ` +
      `fill-opacity="${opacity}" stroke="none"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string,
       stroke = "#333"): void {
    this.parts.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
      `height="${fmt(h)}" fill="${fill}" stroke="${stroke}"/>`);
  }

  render(): string {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface Panel {
  x0: number;
  y0: number;
  w: number;
  h: number;
  xScale: Scale;
  yScale: Scale;
}

/** Axes, tick marks, labels, and a framed plotting area inside the builder. */
export function drawPanel(svg: SvgBuilder, x0: number, y0: number, w: number,
                          h: number, xDomain: [number, number],
                          yDomain: [number, number], title: string,
                          xLabel: string, yLabel: string,
                          numericXTicks = true): Panel {
  const xScale = linearScale(xDomain, [x0, x0 + w]);
  const yScale = linearScale(yDomain, [y0 + h, y0]);
  svg.rect(x0, y0, w, h, "none", "#999");
  for (const t of numericXTicks ? ticks(xDomain) : []) {
    const px = xScale(t);
    svg.line(px, y0 + h, px, y0 + h + 4);
    svg.text(px, y0 + h + 15, String(Number(t.toPrecision(4))),
             { "text-anchor": "middle" });
  }
  for (const t of ticks(yDomain)) {
    const py = yScale(t);
    svg.line(x0 - 4, py, x0, py);
    svg.text(x0 - 6, py + 3, String(Number(t.toPrecision(4))),
             { "text-anchor": "end" });
  }
  svg.text(x0 + w / 2, y0 - 6, title, { "text-anchor": "middle", "font-size": "12" });
  svg.text(x0 + w / 2, y0 + h + 30, xLabel, { "text-anchor": "middle" });
  svg.text(x0 - 42, y0 + h / 2, yLabel,
           { "text-anchor": "middle", transform: `rotate(-90 ${x0 - 42} ${y0 + h / 2})` });
  return { x0, y0, w, h, xScale, yScale };
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                        "#8c564b", "#e377c2", "#7f7f7f"];
