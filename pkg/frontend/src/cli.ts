#!/usr/bin/env node
/**
 * plot --spec FILE
 * plot --input trace.csv=label [--input ...] --x t [--y mean_gap] [--log-y|--linear-y]
 *      [--log-x] [--bound bounds.csv] --out figure.svg
 *
 * Reads only the documented CSV schemas and writes an SVG figure.
 */

import { readFileSync } from "node:fs";

import { FigureSpec, renderFigure } from "./figure";

function usage(): never {
  console.error(
    "usage: plot --spec FILE | --input CSV=LABEL [--input ...] --x COL [--y COL] " +
      "[--log-y|--linear-y] [--log-x] [--bound CSV] --out FILE.svg"
  );
  process.exit(1);
}

export function parseArgs(argv: string[]): FigureSpec {
  const inputs: { path: string; label: string }[] = [];
  let spec: FigureSpec | undefined;
  let x: string | undefined;
  let y: string | undefined;
  let logY: boolean | undefined;
  let logX: boolean | undefined;
  let bound: string | undefined;
  let out: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i++;
      if (i >= argv.length) usage();
      return argv[i];
    };
    switch (arg) {
      case "--spec":
        spec = JSON.parse(readFileSync(next(), "utf8")) as FigureSpec;
        break;
      case "--input": {
        const raw = next();
        const eq = raw.lastIndexOf("=");
        if (eq <= 0) usage();
        inputs.push({ path: raw.slice(0, eq), label: raw.slice(eq + 1) });
        break;
      }
      case "--x":
        x = next();
        break;
      case "--y":
        y = next();
        break;
      case "--log-y":
        logY = true;
        break;
      case "--linear-y":
        logY = false;
        break;
      case "--log-x":
        logX = true;
        break;
      case "--bound":
        bound = next();
        break;
      case "--out":
        out = next();
        break;
      default:
        usage();
    }
  }
  if (spec !== undefined) {
    return spec;
  }
  if (inputs.length === 0 || x === undefined || out === undefined) {
    usage();
  }
  return {
    inputs,
    x,
    y,
    logX,
    logY,
    bound: bound !== undefined ? { path: bound } : undefined,
    output: out,
  };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const figure = renderFigure(spec);
    console.log(`wrote ${spec.output} (${figure.series.length} series, y-scale ${figure.yScale})`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
