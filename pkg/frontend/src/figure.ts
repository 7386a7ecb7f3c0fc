import { writeFileSync } from "node:fs";

import { numericColumn, readCsv } from "./csv";
import { BOUND_COLOR, HEIGHT, MARGIN, PALETTE, Point, RenderedSeries, WIDTH, buildSvg, makeScale } from "./svg";

export interface SeriesInput {
  path: string;
  label: string;
}

export interface FigureSpec {
  /** one curve per CSV, drawn in order */
  inputs: SeriesInput[];
  /** x column name, e.g. t | comms | n */
  x: string;
  /** y column name; defaults to mean_gap */
  y?: string;
  /** log-scale flags; y defaults to log for gap-like columns */
  logX?: boolean;
  logY?: boolean;
  /** optional theoretical-curve overlay (param,value,rhs schema) */
  bound?: { path: string; label?: string };
  /** output image path (SVG) */
  output: string;
}

export interface Series {
  label: string;
  points: Point[];
  dashed: boolean;
}

export interface Figure {
  series: Series[];
  xScale: "linear" | "log";
  yScale: "linear" | "log";
  svg: string;
}

function seriesFromCsv(path: string, label: string, xCol: string, yCol: string): Series {
  const table = readCsv(path);
  const xs = numericColumn(table, xCol);
  const ys = numericColumn(table, yCol);
  const points = xs.map((x, i) => ({ x, y: ys[i] })).sort((a, b) => a.x - b.x);
  return { label, points, dashed: false };
}

export function buildFigure(spec: FigureSpec): Figure {
  if (spec.inputs.length === 0) {
    throw new Error("figure needs at least one input CSV");
  }
  const labels = new Set(spec.inputs.map((s) => s.label));
  if (labels.size !== spec.inputs.length) {
    throw new Error("series labels must be unique");
  }
  const yCol = spec.y ?? "mean_gap";
  const logY = spec.logY ?? /gap/.test(yCol);
  const logX = spec.logX ?? false;

  const series = spec.inputs.map((s) => seriesFromCsv(s.path, s.label, spec.x, yCol));
  if (spec.bound !== undefined) {
    const table = readCsv(spec.bound.path);
    const xs = numericColumn(table, "value");
    const ys = numericColumn(table, "rhs");
    series.push({
      label: spec.bound.label ?? "bound",
      points: xs.map((x, i) => ({ x, y: ys[i] })).sort((a, b) => a.x - b.x),
      dashed: true,
    });
  }

  // log axes cannot place non-positive values; drop those points
  const usable = series.map((s) => ({
    ...s,
    points: s.points.filter((p) => (!logX || p.x > 0) && (!logY || p.y > 0)),
  }));
  const all = usable.flatMap((s) => s.points);
  if (all.length === 0) {
    throw new Error("no plottable points (all filtered by log-scale positivity)");
  }
  const xMin = Math.min(...all.map((p) => p.x));
  const xMax = Math.max(...all.map((p) => p.x));
  const yMin = Math.min(...all.map((p) => p.y));
  const yMax = Math.max(...all.map((p) => p.y));
  const xScale = makeScale(logX ? "log" : "linear", xMin, xMax, MARGIN.left, WIDTH - MARGIN.right);
  const yScale = makeScale(logY ? "log" : "linear", yMin, yMax, HEIGHT - MARGIN.bottom, MARGIN.top);

  const rendered: RenderedSeries[] = usable.map((s, i) => ({
    label: s.label,
    color: s.dashed ? BOUND_COLOR : PALETTE[i % PALETTE.length],
    dashed: s.dashed,
    pixels: s.points.map((p) => ({ x: xScale.toPixel(p.x), y: yScale.toPixel(p.y) })),
  }));
  const svg = buildSvg({
    series: rendered,
    xScale,
    yScale,
    xLabel: spec.x,
    yLabel: yCol,
  });
  return { series: usable, xScale: xScale.kind, yScale: yScale.kind, svg };
}

export function renderFigure(spec: FigureSpec): Figure {
  const figure = buildFigure(spec);
  writeFileSync(spec.output, figure.svg);
  return figure;
}
