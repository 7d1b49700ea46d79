/** Fixed column set of every curve.csv emitted by the simulation CLI. */
export const SCHEMA_COLUMNS = [
  "t",
  "reps",
  "p_correct",
  "ci_low",
  "ci_high",
  "p_truthtell_given_obs",
  "p_observed",
  "herd_frequency",
  "acc_state0",
  "acc_state1",
] as const;

export type SchemaColumn = (typeof SCHEMA_COLUMNS)[number];

export type CurveRow = Record<SchemaColumn, number>;

export interface Curve {
  label: string;
  rows: CurveRow[];
}

/** Last-period value of one column; the curves are indexed by t = 1..T. */
export function terminalValue(curve: Curve, column: SchemaColumn): number {
  return curve.rows[curve.rows.length - 1][column];
}
