/** The four figure kinds rendered from the harness's CSV outputs. */

import { Table, numericColumn, column, requireColumns } from "./csv.js";
import { BoxStats, boxStats, kernelDensity, mean } from "./stats.js";
import { PALETTE, Panel, SvgBuilder, drawPanel } from "./svg.js";

export type FigureKind = "error-curve" | "density" | "boxplot" | "regret-curve";

export interface FigureOptions {
  title?: string;
}

const MARGIN = { left: 64, right: 20, top: 36, bottom: 46 };
const PANEL_W = 340;
const PANEL_H = 240;

function uniqueInOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function groupIndices(values: string[]): Map<string, number[]> {
  const out = new Map<string, number[]>();
  values.forEach((v, i) => {
    const bucket = out.get(v);
    if (bucket) bucket.push(i);
    else out.set(v, [i]);
  });
  return out;
}

/** Deterministic thinning of long series to keep SVG sizes sane. */
function thin<T>(xs: T[], cap = 1200): T[] {
  if (xs.length <= cap) return xs;
  const step = Math.ceil(xs.length / cap);
  const out: T[] = [];
  for (let i = 0; i < xs.length; i += step) out.push(xs[i]);
  if (out[out.length - 1] !== xs[xs.length - 1]) out.push(xs[xs.length - 1]);
  return out;
}

function extent(xs: number[]): [number, number] {
  return [Math.min(...xs), Math.max(...xs)];
}

function padDomain([lo, hi]: [number, number], frac = 0.05): [number, number] {
  const pad = (hi - lo || 1) * frac;
  return [lo - pad, hi + pad];
}

function legend(svg: SvgBuilder, panel: Panel, labels: string[]): void {
  labels.forEach((label, i) => {
    const y = panel.y0 + 14 + 14 * i;
    svg.line(panel.x0 + panel.w - 86, y - 3, panel.x0 + panel.w - 70, y - 3,
             PALETTE[i % PALETTE.length], 2);
    svg.text(panel.x0 + panel.w - 66, y, label);
  });
}

function meanSdSeries(table: Table, rows: number[], xCol: string, meanCol: string,
                      sdCol: string): { x: number[]; m: number[]; s: number[] } {
  const xs = numericColumn(table, xCol);
  const ms = numericColumn(table, meanCol);
  const ss = numericColumn(table, sdCol);
  const picked = thin(rows);
  return {
    x: picked.map((i) => xs[i]),
    m: picked.map((i) => ms[i]),
    s: picked.map((i) => ss[i]),
  };
}

function drawMeanSdLines(svg: SvgBuilder, panel: Panel,
                         series: Array<{ x: number[]; m: number[]; s: number[] }>): void {
  series.forEach((ser, i) => {
    const color = PALETTE[i % PALETTE.length];
    const upper = ser.x.map((x, j): [number, number] =>
      [panel.xScale(x), panel.yScale(ser.m[j] + ser.s[j])]);
    const lower = ser.x.map((x, j): [number, number] =>
      [panel.xScale(x), panel.yScale(ser.m[j] - ser.s[j])]);
    svg.band(upper, lower, color);
    svg.polyline(ser.x.map((x, j) => [panel.xScale(x), panel.yScale(ser.m[j])]),
                 color);
  });
}

/** Two panels (exploited arm, unexploited arms): mean error lines with sd shading. */
export function renderErrorCurve(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, ["estimator", "n", "mean_exploited", "sd_exploited",
                         "mean_unexploited", "sd_unexploited"], "error-curve");
  const estimators = uniqueInOrder(column(table, "estimator"));
  const groups = groupIndices(column(table, "estimator"));
  const width = MARGIN.left + 2 * PANEL_W + 60 + MARGIN.right;
  const height = MARGIN.top + PANEL_H + MARGIN.bottom;
  const svg = new SvgBuilder(width, height);
  const panels: Array<[string, string, string]> = [
    ["exploited arm", "mean_exploited", "sd_exploited"],
    ["unexploited arms", "mean_unexploited", "sd_unexploited"],
  ];
  panels.forEach(([label, meanCol, sdCol], p) => {
    const series = estimators.map((est) =>
      meanSdSeries(table, groups.get(est)!, "n", meanCol, sdCol));
    const allX = series.flatMap((s) => s.x);
    const allY = series.flatMap((s) => s.m.map((m, j) => m + s.s[j]))
      .concat(series.flatMap((s) => s.m.map((m, j) => m - s.s[j])));
    const panel = drawPanel(svg, MARGIN.left + p * (PANEL_W + 60), MARGIN.top,
                            PANEL_W, PANEL_H, extent(allX), padDomain(extent(allY)),
                            `${opts.title ?? "estimation error"} (${label})`,
                            "rounds", "reward error");
    drawMeanSdLines(svg, panel, series);
    legend(svg, panel, estimators);
  });
  return svg.render();
}

/** Kernel densities per (arm, checkpoint): one curve per estimator plus a
 * vertical line at each estimator's sample mean. */
export function renderDensity(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, ["estimator", "arm", "n", "replication", "value"], "density");
  const estimators = uniqueInOrder(column(table, "estimator"));
  const arms = uniqueInOrder(column(table, "arm"));
  const checkpoints = uniqueInOrder(column(table, "n"));
  const values = numericColumn(table, "value");
  const estCol = column(table, "estimator");
  const armCol = column(table, "arm");
  const nCol = column(table, "n");

  const width = MARGIN.left + checkpoints.length * (PANEL_W + 50) + MARGIN.right;
  const height = MARGIN.top + arms.length * (PANEL_H + 56) + MARGIN.bottom;
  const svg = new SvgBuilder(width, height);
  arms.forEach((arm, r) => {
    checkpoints.forEach((cp, c) => {
      const perEstimator = estimators.map((est) => values.filter(
        (_, i) => estCol[i] === est && armCol[i] === arm && nCol[i] === cp));
      const densities = perEstimator.map((vals) => kernelDensity(vals));
      const allX = densities.flatMap((dd) => dd.x);
      const allY = densities.flatMap((dd) => dd.y);
      const panel = drawPanel(
        svg, MARGIN.left + c * (PANEL_W + 50), MARGIN.top + r * (PANEL_H + 56),
        PANEL_W, PANEL_H, padDomain(extent(allX)), [0, Math.max(...allY) * 1.08],
        `arm ${arm}, n=${cp}`, "scaled estimate deviation", "density");
      densities.forEach((dd, i) => {
        const color = PALETTE[i % PALETTE.length];
        svg.polyline(dd.x.map((x, j) => [panel.xScale(x), panel.yScale(dd.y[j])]),
                     color);
        const m = mean(perEstimator[i]);
        svg.line(panel.xScale(m), panel.y0, panel.xScale(m), panel.y0 + panel.h,
                 color, 1);
      });
      legend(svg, panel, estimators);
    });
  });
  return svg.render();
}

function drawBox(svg: SvgBuilder, panel: Panel, xCenter: number, stats: BoxStats,
                 color: string): void {
  const w = 14;
  const y = panel.yScale;
  svg.line(xCenter, y(stats.low), xCenter, y(stats.q1), color);
  svg.line(xCenter, y(stats.q3), xCenter, y(stats.high), color);
  svg.line(xCenter - w / 2, y(stats.low), xCenter + w / 2, y(stats.low), color);
  svg.line(xCenter - w / 2, y(stats.high), xCenter + w / 2, y(stats.high), color);
  svg.rect(xCenter - w / 2, y(stats.q3), w, Math.max(y(stats.q1) - y(stats.q3), 0.5),
           "none", color);
  svg.line(xCenter - w / 2, y(stats.median), xCenter + w / 2, y(stats.median),
           color, 2);
}

/** Per-(eps, algorithm) box plots of stopping time and terminal regret. */
export function renderBoxplot(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, ["algorithm", "eps", "seed", "tau", "success",
                         "cum_regret", "pareto_out"], "boxplot");
  const algorithms = uniqueInOrder(column(table, "algorithm"));
  const epsValues = uniqueInOrder(column(table, "eps"));
  const algCol = column(table, "algorithm");
  const epsCol = column(table, "eps");
  const metrics: Array<[string, number[]]> = [
    ["samples to identification", numericColumn(table, "tau")],
    ["terminal cumulative regret", numericColumn(table, "cum_regret")],
  ];
  const width = MARGIN.left + 2 * (PANEL_W + 60) + MARGIN.right;
  const height = MARGIN.top + PANEL_H + MARGIN.bottom;
  const svg = new SvgBuilder(width, height);
  metrics.forEach(([label, vals], p) => {
    const panel = drawPanel(svg, MARGIN.left + p * (PANEL_W + 60), MARGIN.top,
                            PANEL_W, PANEL_H, [0, epsValues.length],
                            padDomain(extent(vals), 0.08),
                            `${opts.title ?? ""} ${label}`.trim(), "accuracy eps",
                            label, false);
    epsValues.forEach((eps, e) => {
      svg.text(panel.xScale(e + 0.5), panel.y0 + panel.h + 15, eps,
               { "text-anchor": "middle" });
      algorithms.forEach((alg, a) => {
        const group = vals.filter((_, i) => algCol[i] === alg && epsCol[i] === eps);
        if (group.length === 0) return;
        const offset = (a + 1) / (algorithms.length + 1);
        drawBox(svg, panel, panel.xScale(e + offset), boxStats(group),
                PALETTE[a % PALETTE.length]);
      });
    });
    legend(svg, panel, algorithms);
  });
  return svg.render();
}

/** Cumulative-regret curves (mean line, sd shade) per algorithm and eps. */
export function renderRegretCurve(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, ["algorithm", "eps", "round", "mean_cum_regret",
                         "sd_cum_regret"], "regret-curve");
  const algCol = column(table, "algorithm");
  const epsCol = column(table, "eps");
  const keys = uniqueInOrder(algCol.map((a, i) => `${a} (eps=${epsCol[i]})`));
  const groups = groupIndices(algCol.map((a, i) => `${a} (eps=${epsCol[i]})`));
  const series = keys.map((key) =>
    meanSdSeries(table, groups.get(key)!, "round", "mean_cum_regret", "sd_cum_regret"));
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.m.map((m, j) => m + s.s[j]));
  const width = MARGIN.left + PANEL_W * 1.6 + MARGIN.right;
  const height = MARGIN.top + PANEL_H + MARGIN.bottom;
  const svg = new SvgBuilder(width, height);
  const panel = drawPanel(svg, MARGIN.left, MARGIN.top, PANEL_W * 1.6, PANEL_H,
                          extent(allX), padDomain([0, Math.max(...allY)]),
                          opts.title ?? "cumulative regret", "rounds",
                          "cumulative regret");
  drawMeanSdLines(svg, panel, series);
  legend(svg, panel, keys);
  return svg.render();
}

export const RENDERERS: Record<FigureKind, (t: Table, o?: FigureOptions) => string> = {
  "error-curve": renderErrorCurve,
  "density": renderDensity,
  "boxplot": renderBoxplot,
  "regret-curve": renderRegretCurve,
};
