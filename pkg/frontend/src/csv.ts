import { readFileSync } from "node:fs";

import Papa from "papaparse";

import { SCHEMA_COLUMNS, type Curve, type CurveRow } from "./schema.js";

/** Raised when a file does not match the emitted curve.csv schema. */
export class CurveSchemaError extends Error {}

/** Parse curve.csv text; checks the schema and converts "nan" markers. */
export function parseCurveCsv(text: string, source = "curve.csv"): CurveRow[] {
  if (text.trim() === "") {
    throw new CurveSchemaError(`${source}: empty CSV`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    const where = first.row === undefined ? "" : ` (row ${first.row + 2})`;
    throw new CurveSchemaError(`${source}: ${first.message}${where}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of SCHEMA_COLUMNS) {
    if (!fields.includes(column)) {
      throw new CurveSchemaError(`${source}: missing column ${column}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new CurveSchemaError(`${source}: empty CSV, header but no rows`);
  }
  return parsed.data.map((record, i) => {
    const row = {} as Record<string, number>;
    for (const column of SCHEMA_COLUMNS) {
      const raw = record[column];
      // conditional metrics print "nan" when undefined (e.g. nobody observed)
      const value = raw === "nan" ? Number.NaN : Number(raw);
      if (raw === undefined || raw === "" || (raw !== "nan" && !Number.isFinite(value))) {
        throw new CurveSchemaError(`${source}: row ${i + 2}: bad value for ${column}: ${raw}`);
      }
      row[column] = value;
    }
    return row as CurveRow;
  });
}

export function readCurve(label: string, path: string): Curve {
  return { label, rows: parseCurveCsv(readFileSync(path, "utf8"), path) };
}
