export { parseCsv, requireColumns, column, numericColumn, SchemaMismatch } from "./csv.js";
export { mean, stddev, quantile, boxStats, scottBandwidth, kernelDensity } from "./stats.js";
export { SvgBuilder, linearScale, ticks, drawPanel, PALETTE } from "./svg.js";
export { renderErrorCurve, renderDensity, renderBoxplot, renderRegretCurve,
         RENDERERS } from "./figures.js";
export type { FigureKind, FigureOptions } from "./figures.js";
export { parseFigureSpecs, ConfigError } from "./config.js";
export type { FigureSpec } from "./config.js";
export { renderSpecFile, main } from "./cli.js";
