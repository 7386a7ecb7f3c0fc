import { readFileSync } from "node:fs";

export interface Table {
  path: string;
  columns: string[];
  /** column name -> values; numeric columns parsed to numbers */
  data: Map<string, (number | string)[]>;
  rowCount: number;
}

export class MissingColumnError extends Error {
  constructor(public readonly file: string, public readonly column: string) {
    super(`column "${column}" not found in ${file} `);
  }
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length < 1) {
    throw new Error(`${path}: empty CSV`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const data = new Map<string, (number | string)[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}: line ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    cells.forEach((cell, j) => {
      const raw = cell.trim();
      const num = Number(raw);
      data.get(columns[j])!.push(raw !== "" && Number.isFinite(num) ? num : raw);
    });
  }
  return { path, columns, data, rowCount: lines.length - 1 };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function numericColumn(table: Table, column: string): number[] {
  const values = table.data.get(column);
  if (values === undefined) {
    throw new MissingColumnError(table.path, column);
  }
  return values.map((v, i) => {
    if (typeof v !== "number") {
      throw new Error(`${table.path}: row ${i + 2}, column "${column}" is not numeric: ${v}`);
    }
    return v;
  });
}
