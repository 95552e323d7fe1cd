/**
 * Readers for the experiment artifacts: column CSVs with '#' header
 * comments, matrix CSVs, and the axes sidecars that accompany Wigner
 * grids.  All readers fail loudly on missing columns or empty files so a
 * schema drift in the producer cannot yield an empty plot.
 */

import { readFileSync } from "node:fs";

export interface ColumnTable {
  comments: string[];
  columns: Map<string, number[]>;
}

export class SchemaError extends Error {}

function splitContent(text: string): { comments: string[]; lines: string[] } {
  const comments: string[] = [];
  const lines: string[] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) comments.push(line.replace(/^#\s?/, ""));
    else lines.push(line);
  }
  return { comments, lines };
}

export function readColumnCsv(path: string, required: string[] = []): ColumnTable {
  const { comments, lines } = splitContent(readFileSync(path, "utf-8"));
  if (lines.length === 0) throw new SchemaError(`${path}: no header row`);
  const names = lines[0].split(",").map((s) => s.trim());
  const columns = new Map<string, number[]>(names.map((n) => [n, []]));
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== names.length)
      throw new SchemaError(`${path}: row with ${parts.length} fields, expected ${names.length}`);
    parts.forEach((p, i) => columns.get(names[i])!.push(Number(p)));
  }
  if ((columns.get(names[0]) ?? []).length === 0)
    throw new SchemaError(`${path}: no data rows`);
  for (const name of required) {
    if (!columns.has(name))
      throw new SchemaError(`${path}: missing required column '${name}' (have: ${names.join(", ")})`);
  }
  return { comments, columns };
}

/** Columns whose name starts with a prefix, in file order. */
export function columnsWithPrefix(table: ColumnTable, prefix: string): [string, number[]][] {
  return [...table.columns.entries()].filter(([name]) => name.startsWith(prefix));
}

export function readMatrixCsv(path: string): number[][] {
  const { lines } = splitContent(readFileSync(path, "utf-8"));
  if (lines.length === 0) throw new SchemaError(`${path}: empty matrix`);
  const rows = lines.map((l) => l.split(",").map(Number));
  const width = rows[0].length;
  for (const r of rows)
    if (r.length !== width) throw new SchemaError(`${path}: ragged matrix rows`);
  return rows;
}

export interface WignerData {
  xs: number[];
  ps: number[];
  values: number[][]; // rows indexed by p
}

export function readWigner(matrixPath: string, axesPath: string): WignerData {
  const values = readMatrixCsv(matrixPath);
  const axes = readColumnCsv(axesPath, ["axis", "index", "value"]);
  // the 'axis' column is textual; re-read it from the raw file
  const { lines } = splitContent(readFileSync(axesPath, "utf-8"));
  const header = lines[0].split(",");
  const axisCol = header.indexOf("axis");
  const valueCol = header.indexOf("value");
  const xs: number[] = [];
  const ps: number[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts[axisCol] === "x") xs.push(Number(parts[valueCol]));
    else if (parts[axisCol] === "p") ps.push(Number(parts[valueCol]));
    else throw new SchemaError(`${axesPath}: unknown axis '${parts[axisCol]}'`);
  }
  if (values.length !== ps.length || values[0].length !== xs.length)
    throw new SchemaError(
      `${matrixPath}: matrix ${values.length}x${values[0].length} does not match axes ` +
        `${ps.length}x${xs.length}`,
    );
  return { xs, ps, values };
}

export function readJson(path: string): any {
  return JSON.parse(readFileSync(path, "utf-8"));
}
