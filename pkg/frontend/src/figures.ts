import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { renderCurvesFigure, renderPanelFigure, type PlotStyle } from "./chart.js";
import { readCurve } from "./csv.js";
import type { Curve } from "./schema.js";

export interface CurveSource {
  label: string;
  path: string;
}

export interface CurveSet {
  curves: CurveSource[];
  /** Output image path; the .svg/.png extension is replaced per format. */
  output: string;
  style?: PlotStyle;
}

export interface PlotResult {
  svgPath: string;
  pngPath: string | null;
  warnings: string[];
}

export function loadCurveSet(sources: CurveSource[]): Curve[] {
  const seen = new Set<string>();
  for (const { label } of sources) {
    if (seen.has(label)) throw new Error(`duplicate curve label: ${label}`);
    seen.add(label);
  }
  return sources.map(({ label, path }) => readCurve(label, path));
}

async function emit(svg: string, output: string, warnings: string[]): Promise<PlotResult> {
  const base = output.replace(/\.(svg|png)$/i, "");
  const svgPath = `${base}.svg`;
  mkdirSync(dirname(svgPath), { recursive: true });
  writeFileSync(svgPath, svg);

  let pngPath: string | null = `${base}.png`;
  try {
    const { Resvg } = await import("@resvg/resvg-js");
    writeFileSync(pngPath, new Resvg(svg).render().asPng());
  } catch (err) {
    warnings.push(`PNG renderer unavailable, emitted SVG only: ${(err as Error).message}`);
    pngPath = null;
  }
  return { svgPath, pngPath, warnings };
}

/** Render one panel of labeled learning curves and write SVG + PNG. */
export async function plotCurves(set: CurveSet): Promise<PlotResult> {
  if (set.curves.length === 0) throw new Error("no curves to plot");
  const curves = loadCurveSet(set.curves);
  const svg = renderCurvesFigure(curves, set.style ?? {});
  return emit(svg, set.output, []);
}

/**
 * Render the bounded/unbounded two-panel figure; the bounded set's output
 * path and style drive the emitted file.
 */
export async function plotPanel(bounded: CurveSet, unbounded: CurveSet): Promise<PlotResult> {
  const boundedCurves = loadCurveSet(bounded.curves);
  const unboundedCurves = loadCurveSet(unbounded.curves);
  const { svg, warnings } = renderPanelFigure(boundedCurves, unboundedCurves, bounded.style ?? {});
  return emit(svg, bounded.output, warnings);
}
