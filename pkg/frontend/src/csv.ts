/**
 * Minimal CSV marshalling for the CLI's numeric formats. Values are plain
 * numbers and names never contain commas or quotes, so no quoting layer is
 * needed. Number.prototype.toString is the shortest round-trip decimal,
 * which the CLI parses back to the identical float64.
 */

export function toAttributionCsv(names: string[], matrix: number[][]): string {
  const lines = [names.join(",")];
  for (const row of matrix) {
    if (row.length !== names.length) {
      throw new Error(
        `row has ${row.length} values but there are ${names.length} feature names`,
      );
    }
    lines.push(row.map((v) => String(v)).join(","));
  }
  return lines.join("\n") + "\n";
}

export function toMatrixCsv(matrix: number[][]): string {
  return matrix.map((row) => row.map((v) => String(v)).join(",")).join("\n") + "\n";
}

function parseNumber(cell: string, where: string): number {
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new Error(`unparseable number ${JSON.stringify(cell)} in ${where}`);
  }
  return value;
}

export function parseMatrixCsv(text: string): number[][] {
  return nonEmptyLines(text).map((line, i) =>
    line.split(",").map((cell) => parseNumber(cell, `row ${i + 1}`)),
  );
}

export function parseAttributionCsv(text: string): {
  names: string[];
  matrix: number[][];
} {
  const lines = nonEmptyLines(text);
  if (lines.length === 0) {
    throw new Error("attribution CSV is empty");
  }
  const names = (lines[0] as string).split(",");
  const matrix = lines
    .slice(1)
    .map((line, i) => line.split(",").map((cell) => parseNumber(cell, `row ${i + 1}`)));
  return { names, matrix };
}

function nonEmptyLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

export function defaultNames(width: number): string[] {
  return Array.from({ length: width }, (_, i) => `f${i}`);
}
