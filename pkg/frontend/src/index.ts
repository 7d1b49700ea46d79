export { SCHEMA_COLUMNS, terminalValue } from "./schema.js";
export type { Curve, CurveRow, SchemaColumn } from "./schema.js";
export { CurveSchemaError, parseCurveCsv, readCurve } from "./csv.js";
export { renderCurvesFigure, renderPanelFigure, terminalAccuracies } from "./chart.js";
export type { PanelFigure, PlotStyle } from "./chart.js";
export { loadCurveSet, plotCurves, plotPanel } from "./figures.js";
export type { CurveSet, CurveSource, PlotResult } from "./figures.js";
