/** Small numeric helpers: quantiles, moments, and Gaussian kernel densities. */

export function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function stddev(xs: number[]): number {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  return Math.sqrt(xs.reduce((a, b) => a + (b - m) * (b - m), 0) / (xs.length - 1));
}

/** Linear-interpolation quantile on a sorted copy (same convention as numpy). */
export function quantile(xs: number[], q: number): number {
  const sorted = [...xs].sort((a, b) => a - b);
  const pos = q * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

export interface BoxStats {
  low: number;
  q1: number;
  median: number;
  q3: number;
  high: number;
}

/** Five-number summary with whiskers at the 1.5 IQR fences, clamped to data. */
export function boxStats(xs: number[]): BoxStats {
  const q1 = quantile(xs, 0.25);
  const median = quantile(xs, 0.5);
  const q3 = quantile(xs, 0.75);
  const iqr = q3 - q1;
  const inside = xs.filter((x) => x >= q1 - 1.5 * iqr && x <= q3 + 1.5 * iqr);
  return {
    low: Math.min(...inside),
    q1,
    median,
    q3,
    high: Math.max(...inside),
  };
}

/** Scott's-rule bandwidth for a one-dimensional Gaussian kernel. */
export function scottBandwidth(xs: number[]): number {
  const sd = stddev(xs);
  const n = xs.length;
  const scale = sd > 0 ? sd : 1e-12;
  return scale * Math.pow(n, -1 / 5);
}

export interface Density {
  x: number[];
  y: number[];
  bandwidth: number;
}

/** Gaussian KDE evaluated on an even grid spanning the data plus 3 bandwidths. */
export function kernelDensity(xs: number[], points = 200): Density {
  const h = scottBandwidth(xs);
  const lo = Math.min(...xs) - 3 * h;
  const hi = Math.max(...xs) + 3 * h;
  const x: number[] = [];
  const y: number[] = [];
  const norm = 1 / (xs.length * h * Math.sqrt(2 * Math.PI));
  for (let i = 0; i < points; i++) {
    const xi = lo + ((hi - lo) * i) / (points - 1);
    let acc = 0;
    for (const v of xs) {
      const z = (xi - v) / h;
      acc += Math.exp(-0.5 * z * z);
    }
    x.push(xi);
    y.push(acc * norm);
  }
  return { x, y, bandwidth: h };
}
