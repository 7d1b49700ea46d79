/** Coordinate scales and small SVG helpers; everything is deterministic. */

export interface Scale {
  map(value: number): number;
  ticks: number[];
}

export function escapeXml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => {
    switch (ch) {
      case "&":
        return "&amp;";
      case "<":
        return "&lt;";
      case ">":
        return "&gt;";
      case '"':
        return "&quot;";
      default:
        return "&#39;";
    }
  });
}

/** Round-number step (1/2/5 times a power of ten) near span / target. */
export function niceStep(span: number, target: number): number {
  const rough = span / Math.max(1, target);
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= rough) return mult * power;
  }
  return 10 * power;
}

export function linearScale(lo: number, hi: number, rangeLo: number, rangeHi: number, tickTarget = 6): Scale {
  const span = hi > lo ? hi - lo : 1;
  const step = niceStep(span, tickTarget);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + span * 1e-9; v += step) {
    ticks.push(Number(v.toFixed(10)));
  }
  return {
    map: (value) => rangeLo + ((value - lo) / span) * (rangeHi - rangeLo),
    ticks,
  };
}

/** Log10 axis for periods t >= 1; ticks at the decades inside the domain. */
export function logScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  const safeLo = Math.max(lo, 1);
  const safeHi = Math.max(hi, safeLo * 10);
  const logLo = Math.log10(safeLo);
  const logHi = Math.log10(safeHi);
  const ticks: number[] = [];
  for (let exp = Math.ceil(logLo); exp <= logHi + 1e-9; exp += 1) {
    ticks.push(Math.pow(10, exp));
  }
  return {
    map: (value) => rangeLo + ((Math.log10(Math.max(value, safeLo)) - logLo) / (logHi - logLo)) * (rangeHi - rangeLo),
    ticks,
  };
}

export function polylinePath(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`)
    .join(" ");
}

export function polygonPoints(points: Array<[number, number]>): string {
  return points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
}

/** Compact tick label: trims float noise, keeps up to 4 significant digits. */
export function tickLabel(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return String(Number(value.toPrecision(4)));
}
