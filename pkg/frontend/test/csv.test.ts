import assert from "node:assert/strict";
import { test } from "node:test";
import { CsvError, numericCell, parseCsv, requireColumn,
         requireRows } from "../src/csv.js";

test("parses header and numeric rows", () => {
  const table = parseCsv("a,b\n1,2\n3,\n", "x.csv");
  assert.deepEqual(table.columns, ["a", "b"]);
  assert.deepEqual(table.rows, [
    [1, 2],
    [3, null],
  ]);
});

test("missing column is named along with the file", () => {
  const table = parseCsv("a,b\n1,2\n", "runs/sweep.csv");
  assert.equal(requireColumn(table, "b"), 1);
  assert.throws(
    () => requireColumn(table, "a1_m"),
    (err: Error) =>
      err instanceof CsvError &&
      err.message.includes("runs/sweep.csv") &&
      err.message.includes("'a1_m'"),
  );
});

test("header-only file is rejected", () => {
  const table = parseCsv("a,b\n", "empty.csv");
  assert.throws(() => requireRows(table), /no data rows/);
});

test("ragged rows are rejected", () => {
  assert.throws(() => parseCsv("a,b\n1\n", "bad.csv"), /row 2/);
});

test("label cells pass through; numeric views reject them", () => {
  const table = parseCsv("branch,c1\nplus,2.5\n", "s.csv");
  assert.equal(table.rows[0][0], "plus");
  assert.equal(numericCell(table, 0, 1), 2.5);
  assert.throws(
    () => numericCell(table, 0, 0),
    /s\.csv: column 'branch'.*'plus'/,
  );
});
