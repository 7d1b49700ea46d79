import { terminalValue, type Curve } from "./schema.js";
import { escapeXml, linearScale, logScale, polygonPoints, polylinePath, tickLabel, type Scale } from "./svg.js";

export interface PlotStyle {
  /** Period axis: "linear" (default) or "log" (base-10 decades). */
  tAxis?: "linear" | "log";
  /** Optional horizontal reference, e.g. the 1 - epsilon learning bound. */
  referenceLevel?: number;
  title?: string;
}

const PANEL_W = 520;
const PANEL_H = 380;
const MARGIN = { top: 44, right: 16, bottom: 48, left: 64 };
const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];
const FONT = 'font-family="Helvetica, Arial, sans-serif"';

function yDomain(curves: Curve[], reference?: number): [number, number] {
  let lo = reference ?? 1;
  for (const curve of curves) {
    for (const row of curve.rows) {
      const bound = Number.isFinite(row.ci_low) ? row.ci_low : row.p_correct;
      if (Number.isFinite(bound)) lo = Math.min(lo, bound);
    }
  }
  lo = Math.max(0, lo - 0.03 * (1 - lo) - 0.01);
  return [Math.min(lo, 0.99), 1];
}

function seriesMarkup(curve: Curve, color: string, x: Scale, y: Scale): string {
  const band: Array<[number, number]> = [];
  const upper: Array<[number, number]> = [];
  const line: Array<[number, number]> = [];
  for (const row of curve.rows) {
    if (!Number.isFinite(row.p_correct)) continue;
    line.push([x.map(row.t), y.map(row.p_correct)]);
    if (Number.isFinite(row.ci_low) && Number.isFinite(row.ci_high)) {
      band.push([x.map(row.t), y.map(row.ci_low)]);
      upper.push([x.map(row.t), y.map(row.ci_high)]);
    }
  }
  upper.reverse();
  const parts: string[] = [];
  if (band.length > 1) {
    parts.push(
      `<polygon points="${polygonPoints(band.concat(upper))}" fill="${color}" fill-opacity="0.14" stroke="none"/>`,
    );
  }
  parts.push(`<path d="${polylinePath(line)}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
  return parts.join("\n");
}

/** One panel as an SVG fragment in local coordinates (0,0)-(PANEL_W,PANEL_H). */
function renderPanel(curves: Curve[], style: PlotStyle, title: string): string {
  const left = MARGIN.left;
  const right = PANEL_W - MARGIN.right;
  const top = MARGIN.top;
  const bottom = PANEL_H - MARGIN.bottom;

  const maxT = Math.max(...curves.map((c) => c.rows[c.rows.length - 1].t));
  const x =
    style.tAxis === "log" ? logScale(1, maxT, left, right) : linearScale(1, maxT, left, right);
  const [yLo, yHi] = yDomain(curves, style.referenceLevel);
  const y = linearScale(yLo, yHi, bottom, top, 5);

  const parts: string[] = [];
  parts.push(`<text x="${left}" y="20" font-size="13" font-weight="bold" ${FONT}>${escapeXml(title)}</text>`);

  for (const tick of y.ticks) {
    const py = y.map(tick).toFixed(2);
    parts.push(`<line x1="${left}" y1="${py}" x2="${right}" y2="${py}" stroke="#e5e7eb"/>`);
    parts.push(
      `<text x="${left - 8}" y="${py}" dy="4" font-size="11" text-anchor="end" ${FONT}>${tickLabel(tick)}</text>`,
    );
  }
  for (const tick of x.ticks) {
    const px = x.map(tick).toFixed(2);
    parts.push(`<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="#374151"/>`);
    parts.push(
      `<text x="${px}" y="${bottom + 19}" font-size="11" text-anchor="middle" ${FONT}>${tickLabel(tick)}</text>`,
    );
  }
  parts.push(`<line x1="${left}" y1="${bottom}" x2="${right}" y2="${bottom}" stroke="#374151"/>`);
  parts.push(`<line x1="${left}" y1="${top}" x2="${left}" y2="${bottom}" stroke="#374151"/>`);
  parts.push(
    `<text x="${(left + right) / 2}" y="${PANEL_H - 10}" font-size="12" text-anchor="middle" ${FONT}>period t${style.tAxis === "log" ? " (log scale)" : ""}</text>`,
  );
  parts.push(
    `<text x="16" y="${(top + bottom) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${(top + bottom) / 2})" ${FONT}>share correct</text>`,
  );

  if (style.referenceLevel !== undefined) {
    const py = y.map(style.referenceLevel).toFixed(2);
    parts.push(
      `<line x1="${left}" y1="${py}" x2="${right}" y2="${py}" stroke="#6b7280" stroke-dasharray="5 4"/>`,
    );
    parts.push(
      `<text x="${right - 4}" y="${py}" dy="-4" font-size="10" text-anchor="end" fill="#6b7280" ${FONT}>${tickLabel(style.referenceLevel)}</text>`,
    );
  }

  curves.forEach((curve, i) => {
    parts.push(seriesMarkup(curve, PALETTE[i % PALETTE.length], x, y));
  });

  // legend sits top-left inside the plot; the curves rise toward the right
  curves.forEach((curve, i) => {
    const ly = top + 12 + i * 16;
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<line x1="${left + 10}" y1="${ly}" x2="${left + 30}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text x="${left + 36}" y="${ly}" dy="4" font-size="11" ${FONT}>${escapeXml(curve.label)}</text>`,
    );
  });

  return parts.join("\n");
}

function document_(panels: string[], width: number): string {
  const body = panels
    .map((panel, i) => `<g transform="translate(${i * PANEL_W},0)">\n${panel}\n</g>`)
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_H}" viewBox="0 0 ${width} ${PANEL_H}">`,
    `<rect width="${width}" height="${PANEL_H}" fill="white"/>`,
    body,
    "</svg>",
  ].join("\n");
}

/** Single-panel figure: p_correct vs t per labeled series, with CI bands. */
export function renderCurvesFigure(curves: Curve[], style: PlotStyle = {}): string {
  if (curves.length === 0) throw new Error("no curves to plot");
  return document_([renderPanel(curves, style, style.title ?? "learning curves")], PANEL_W);
}

export interface PanelFigure {
  svg: string;
  warnings: string[];
}

/**
 * Two-panel bounded/unbounded figure; an empty unbounded set degrades to a
 * single bounded panel with a warning instead of failing the render.
 */
export function renderPanelFigure(
  bounded: Curve[],
  unbounded: Curve[],
  style: PlotStyle = {},
): PanelFigure {
  if (bounded.length === 0) throw new Error("no curves to plot in the bounded panel");
  const warnings: string[] = [];
  const panels = [renderPanel(bounded, style, "bounded private beliefs")];
  if (unbounded.length === 0) {
    warnings.push("unbounded panel is empty; rendering a single bounded panel");
  } else {
    panels.push(renderPanel(unbounded, style, "unbounded private beliefs"));
  }
  return { svg: document_(panels, panels.length * PANEL_W), warnings };
}

/** Convenience for callers and tests: terminal accuracy per labeled curve. */
export function terminalAccuracies(curves: Curve[]): Array<[string, number]> {
  return curves.map((curve) => [curve.label, terminalValue(curve, "p_correct")]);
}
