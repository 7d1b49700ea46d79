#!/usr/bin/env node
/**
 * Render learning-pattern figures from curve.csv files.
 *
 *   figure-kit curves --out fig1 [--log-t] [--reference 0.95] [--title T] label=path ...
 *   figure-kit panel  --out fig2 --bounded label=path ... [--unbounded label=path ...] [flags]
 *
 * Curve arguments are label=path pairs; a bare path uses its basename as
 * the label.  Both commands write <out>.svg and <out>.png.
 */
import { basename } from "node:path";
import { parseArgs } from "node:util";

import type { PlotStyle } from "./chart.js";
import { plotCurves, plotPanel, type CurveSource } from "./figures.js";

function parseEntry(raw: string): CurveSource {
  const eq = raw.indexOf("=");
  if (eq < 0) return { label: basename(raw).replace(/\.csv$/i, ""), path: raw };
  return { label: raw.slice(0, eq), path: raw.slice(eq + 1) };
}

function buildStyle(values: { "log-t"?: boolean; reference?: string; title?: string }): PlotStyle {
  const style: PlotStyle = {};
  if (values["log-t"]) style.tAxis = "log";
  if (values.reference !== undefined) {
    const level = Number(values.reference);
    if (!Number.isFinite(level)) throw new Error(`--reference is not a number: ${values.reference}`);
    style.referenceLevel = level;
  }
  if (values.title !== undefined) style.title = values.title;
  return style;
}

export async function main(argv: string[]): Promise<number> {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      "log-t": { type: "boolean" },
      reference: { type: "string" },
      title: { type: "string" },
      bounded: { type: "string", multiple: true },
      unbounded: { type: "string", multiple: true },
    },
    allowPositionals: true,
  });

  const [command, ...rest] = positionals;
  if (command !== "curves" && command !== "panel") {
    console.error("usage: figure-kit curves|panel --out PATH [options] label=path ...");
    return 1;
  }
  if (!values.out) {
    console.error("error: --out is required");
    return 1;
  }
  const style = buildStyle(values);

  let result;
  if (command === "curves") {
    if (rest.length === 0) {
      console.error("error: curves needs at least one label=path argument");
      return 1;
    }
    result = await plotCurves({ curves: rest.map(parseEntry), output: values.out, style });
  } else {
    const bounded = (values.bounded ?? []).map(parseEntry);
    const unbounded = (values.unbounded ?? []).map(parseEntry);
    if (bounded.length === 0) {
      console.error("error: panel needs at least one --bounded label=path");
      return 1;
    }
    result = await plotPanel(
      { curves: bounded, output: values.out, style },
      { curves: unbounded, output: values.out, style },
    );
  }

  for (const warning of result.warnings) console.error(`warning: ${warning}`);
  console.log(`wrote ${result.svgPath}${result.pngPath ? ` and ${result.pngPath}` : ""}`);
  return 0;
}

const invokedDirectly = process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]));
if (invokedDirectly) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`error: ${(err as Error).message}`);
      process.exit(1);
    },
  );
}
