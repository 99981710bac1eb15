/**
 * CSV ingestion for simulation sweep outputs.
 *
 * Files carry a single header row with units embedded in the column names;
 * numeric cells are plain decimal text and blank cells mean "undefined".
 */

export interface CsvTable {
  path: string;
  columns: string[];
  /** Row-major cells: numbers where parseable, raw text otherwise
   * (label columns), null for blank cells. */
  rows: (number | string | null)[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string, path: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${path}: file is empty`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: (number | string | null)[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `${path}: row ${i + 1} has ${cells.length} cells, ` +
          `expected ${columns.length}`,
      );
    }
    rows.push(
      cells.map((cell) => {
        const trimmed = cell.trim();
        if (trimmed === "") return null;
        const value = Number(trimmed);
        return Number.isNaN(value) ? trimmed : value;
      }),
    );
  }
  return { path, columns, rows };
}


/** Numeric view of one cell; label text in a plotted column is an error. */
export function numericCell(table: CsvTable, row: number,
                            col: number): number | null {
  const value = table.rows[row][col];
  if (value === null || typeof value === "number") return value;
  throw new CsvError(
    `${table.path}: column '${table.columns[col]}', row ${row + 2}: ` +
      `expected a number, got '${value}'`,
  );
}

/** Index of a named column; the error names both the column and the file. */
export function requireColumn(table: CsvTable, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `${table.path}: missing column '${name}' ` +
        `(have: ${table.columns.join(", ")})`,
    );
  }
  return idx;
}

/** Data rows are mandatory: a header-only file renders nothing. */
export function requireRows(table: CsvTable): void {
  if (table.rows.length === 0) {
    throw new CsvError(`${table.path}: no data rows (header only)`);
  }
}
