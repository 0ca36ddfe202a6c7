import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {}

export interface Columns {
  [name: string]: number[];
}

/** Parse a CSV file into numeric columns, validating the required names. */
export function readColumns(path: string, required: string[]): Columns {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseColumns(text, required, path);
}

export function parseColumns(
  text: string,
  required: string[],
  label = "input"
): Columns {
  // no dynamicTyping: papaparse leaves floats that don't round-trip
  // textually (large exponents) as strings, so convert cells ourselves
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvError(`${label}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const name of required) {
    if (!fields.includes(name)) {
      throw new CsvError(`${label}: missing column "${name}"`);
    }
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${label}: no data rows`);
  }
  const cols: Columns = {};
  for (const name of required) cols[name] = [];
  parsed.data.forEach((row, i) => {
    for (const name of required) {
      const raw = row[name];
      const s = typeof raw === "string" ? raw.trim() : "";
      const v = s === "" ? NaN : Number(s);
      if (!Number.isFinite(v)) {
        throw new CsvError(
          `${label}: column "${name}" row ${i + 1} is not a finite number`
        );
      }
      cols[name].push(v);
    }
  });
  return cols;
}

/**
 * Thin a series to at most maxPoints by keeping each bucket's min and max,
 * so the drawn envelope survives decimation of very long logs.
 */
export function decimate(
  x: number[],
  y: number[],
  maxPoints: number
): { x: number[]; y: number[] } {
  const n = x.length;
  if (n <= maxPoints) return { x, y };
  const buckets = Math.ceil(maxPoints / 2);
  const size = Math.ceil(n / buckets);
  const outX: number[] = [];
  const outY: number[] = [];
  for (let start = 0; start < n; start += size) {
    const end = Math.min(start + size, n);
    let iMin = start;
    let iMax = start;
    for (let i = start + 1; i < end; i++) {
      if (y[i] < y[iMin]) iMin = i;
      if (y[i] > y[iMax]) iMax = i;
    }
    const first = Math.min(iMin, iMax);
    const second = Math.max(iMin, iMax);
    outX.push(x[first]);
    outY.push(y[first]);
    if (second !== first) {
      outX.push(x[second]);
      outY.push(y[second]);
    }
  }
  return { x: outX, y: outY };
}
