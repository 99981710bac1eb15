import assert from "node:assert/strict";
import { test } from "node:test";
import { parseCsv } from "../src/csv.js";
import { buildFigure, stabilityRuns, threadStrands } from "../src/figure.js";
import { parseFigureSpec } from "../src/spec.js";

const SPEC = `
[figure]
id = demo
output = demo.svg

[inputs]
sweep = sweep.csv

[style]
x_column = detune_rad_s
y_column = a1_m
`;

function specOf(text = SPEC) {
  return parseFigureSpec(text, "spec.cfg");
}

test("threading keeps a fold as one strand without zigzag", () => {
  // S-shaped data: one state at x=0,3; two coexisting pairs at x=1,2
  const pts = [
    { x: 0, y: 1.0, stable: true },
    { x: 1, y: 1.2, stable: true },
    { x: 1, y: 3.0, stable: false },
    { x: 2, y: 1.4, stable: true },
    { x: 2, y: 2.8, stable: false },
    { x: 3, y: 1.6, stable: true },
  ];
  const strands = threadStrands(pts);
  assert.equal(strands.length, 2);
  const long = strands.find((s) => s.length === 4)!;
  assert.deepEqual(long.map((p) => p.y), [1.0, 1.2, 1.4, 1.6]);
  const upper = strands.find((s) => s.length === 2)!;
  assert.deepEqual(upper.map((p) => p.y), [3.0, 2.8]);
});

test("stability runs share boundary points", () => {
  const strand = [
    { x: 0, y: 0, stable: true },
    { x: 1, y: 1, stable: true },
    { x: 2, y: 2, stable: false },
    { x: 3, y: 3, stable: false },
    { x: 4, y: 4, stable: true },
  ];
  const runs = stabilityRuns(strand);
  assert.equal(runs.length, 3);
  assert.deepEqual(runs.map((r) => r.length), [2, 3, 2]);
  assert.equal(runs[0][runs[0].length - 1], runs[1][0]);
});

test("series count equals distinct branch ids", () => {
  const csv = [
    "detune_rad_s,branch_id,a1_m,stable",
    "0,0,1e-9,1",
    "1,0,2e-9,1",
    "1,1,8e-9,0",
    "2,0,3e-9,1",
    "2,1,7e-9,1",
  ].join("\n");
  const fig = buildFigure(specOf(), [parseCsv(csv, "sweep.csv")]);
  assert.equal(fig.panels, 1);
  assert.equal(fig.series[0].length, 2);
  assert.match(fig.svg, /stroke-dasharray="6,4"/); // unstable run dashed
});

test("grid layout renders one panel per input", () => {
  const csv = "detune_rad_s,a1_m\n0,1e-9\n1,2e-9\n";
  const spec = specOf(SPEC.replace("output = demo.svg",
                                   "output = demo.svg\nlayout = grid")
                          .replace("[inputs]\nsweep = sweep.csv",
                                   "[inputs]\na = a.csv\nb = b.csv"));
  const fig = buildFigure(spec, [parseCsv(csv, "a.csv"),
                                 parseCsv(csv, "b.csv")]);
  assert.equal(fig.panels, 2);
});

test("square transform relabels the axis", () => {
  const csv = "a1_m,gamma_inst_per_s\n1e-9,3.2\n2e-9,3.0\n";
  const spec = specOf(SPEC.replace("x_column = detune_rad_s",
                                   "x_column = a1_m\nx_transform = square")
                          .replace("y_column = a1_m",
                                   "y_column = gamma_inst_per_s"));
  const fig = buildFigure(spec, [parseCsv(csv, "r.csv")]);
  assert.match(fig.svg, /\(a1_m\)\^2/);
});

test("blank cells are skipped, not drawn", () => {
  const csv = "detune_rad_s,a1_m\n0,\n1,2e-9\n2,3e-9\n";
  const fig = buildFigure(specOf(), [parseCsv(csv, "sweep.csv")]);
  assert.equal(fig.series[0][0].pointCount, 2);
});

test("header-only input refuses to render", () => {
  const csv = "detune_rad_s,a1_m\n";
  assert.throws(() => buildFigure(specOf(), [parseCsv(csv, "e.csv")]),
                /no data rows/);
});

test("missing y column names the file and column", () => {
  const csv = "detune_rad_s,other\n0,1\n";
  assert.throws(() => buildFigure(specOf(), [parseCsv(csv, "s.csv")]),
                /s\.csv.*'a1_m'/);
});

test("rendering is deterministic", () => {
  const csv = "detune_rad_s,branch_id,a1_m,stable\n0,0,1e-9,1\n1,0,2e-9,1\n";
  const a = buildFigure(specOf(), [parseCsv(csv, "s.csv")]);
  const b = buildFigure(specOf(), [parseCsv(csv, "s.csv")]);
  assert.equal(a.svg, b.svg);
});
