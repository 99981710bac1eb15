/**
 * End-to-end: generate real sweep CSVs with the simulator's command line,
 * render the declared figure specs, and check series counts, stability
 * styling, and re-render stability.
 */

import assert from "node:assert/strict";
import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";
import { renderFromSpecFile } from "../src/index.js";

function runSim(args: string[]): void {
  const proc = spawnSync("sidebandlab", args, { encoding: "utf-8" });
  assert.equal(proc.status, 0,
               `sidebandlab ${args[0]} failed: ${proc.stderr}`);
}

function svgSummary(path: string) {
  const svg = readFileSync(path, "utf-8");
  const size = svg.match(/width="(\d+)" height="(\d+)"/)!;
  return {
    svg,
    width: Number(size[1]),
    height: Number(size[2]),
    solid: (svg.match(/class="stable"/g) ?? []).length,
    dashed: (svg.match(/class="unstable"/g) ?? []).length,
    colors: new Set([...svg.matchAll(/stroke="(#[0-9a-f]{6})"/g)]
      .map((m) => m[1])).size,
  };
}

const work = mkdtempSync(join(tmpdir(), "figures-"));

test("forced-response figure: isolated branch, stability styling", () => {
  const run = join(work, "fr");
  runSim(["forced-response", "--preset", "paper-device",
          "--delta-hz", "-35", "--fd1-pn", "0.70",
          "--sweep-start-hz", "-1.5", "--sweep-stop-hz", "4",
          "--points", "81", "--out", run, "--no-timestamp"]);
  const csv = readFileSync(join(run, "forced_response.csv"), "utf-8");
  const branchIds = new Set(
    csv.trim().split("\n").slice(1).map((line) => line.split(",")[1]));
  const specPath = join(work, "fig_response.cfg");
  writeFileSync(specPath, [
    "[figure]",
    "id = forced-response",
    `output = ${join(work, "fig_response.svg")}`,
    "[inputs]",
    `response = ${join(run, "forced_response.csv")}`,
    "[style]",
    "x_column = detune_rad_s",
    "y_column = a1_m",
  ].join("\n"));
  const out = renderFromSpecFile(specPath);
  const first = svgSummary(out);
  // one drawn series (colour) per distinct branch id in the input
  assert.equal(first.colors, branchIds.size);
  assert.ok(first.dashed > 0, "unstable segments must be dashed");
  assert.ok(first.solid > 0);
  const again = renderFromSpecFile(specPath);
  const second = svgSummary(again);
  assert.equal(first.width, second.width);
  assert.equal(first.height, second.height);
  assert.equal(first.svg, second.svg);
});

test("branch sweep figure from the limit-cycle experiment", () => {
  const run = join(work, "branches");
  runSim(["self-sustained-sweep", "--preset", "paper-device",
          "--sweep-start-hz", "-30", "--sweep-stop-hz", "5",
          "--points", "120", "--out", run, "--no-timestamp"]);
  const specPath = join(work, "fig_branches.cfg");
  writeFileSync(specPath, [
    "[figure]",
    "id = self-sustained",
    `output = ${join(work, "fig_branches.svg")}`,
    "[inputs]",
    `sweep = ${join(run, "selfsustained_sweep.csv")}`,
    "[style]",
    "x_column = delta_rad_s",
    "y_column = a1_m",
    "series_column = stable",
  ].join("\n"));
  const out = renderFromSpecFile(specPath);
  const summary = svgSummary(out);
  assert.equal(summary.colors, 2); // stable and unstable branches
  assert.ok(summary.dashed > 0);
});

test("multi-panel grid over drive amplitudes", () => {
  const drives = ["0.595", "0.700", "0.840"];
  const inputs: string[] = [];
  for (const pn of drives) {
    const run = join(work, `fr${pn}`);
    runSim(["forced-response", "--preset", "paper-device",
            "--delta-hz", "-35", "--fd1-pn", pn,
            "--sweep-start-hz", "-1.5", "--sweep-stop-hz", "4",
            "--points", "61", "--out", run, "--no-timestamp"]);
    inputs.push(`d${pn.replace(".", "")} = ` +
                join(run, "forced_response.csv"));
  }
  const specPath = join(work, "fig_grid.cfg");
  writeFileSync(specPath, [
    "[figure]",
    "id = drive-series",
    `output = ${join(work, "fig_grid.svg")}`,
    "layout = grid",
    "[inputs]",
    ...inputs,
    "[style]",
    "x_column = detune_rad_s",
    "y_column = a1_m",
  ].join("\n"));
  const out = renderFromSpecFile(specPath);
  const summary = svgSummary(out);
  // three panels in a 2x2 grid envelope
  assert.equal(summary.width, 920);
  assert.equal(summary.height, 720);
  assert.ok(summary.dashed > 0,
            "multivalued panels must show dashed unstable segments");
});

test("ring-down rate figure with a reference line", () => {
  const runs: string[] = [];
  for (const [name, args] of [
    ["pumped", ["--delta-hz", "-35"]],
    ["lower", ["--delta-hz", "-35", "--sideband", "lower"]],
    ["off", ["--fp-per-s", "0"]],
  ] as [string, string[]][]) {
    const run = join(work, `rd-${name}`);
    runSim(["ringdown", "--preset", "paper-device", "--a1-nm", "30",
            "--horizon-s", "1.0", ...args, "--out", run,
            "--no-timestamp"]);
    runs.push(`${name} = ${join(run, "ringdown.csv")}`);
  }
  const specPath = join(work, "fig_rates.cfg");
  writeFileSync(specPath, [
    "[figure]",
    "id = decay-rates",
    `output = ${join(work, "fig_rates.svg")}`,
    "[inputs]",
    ...runs,
    "[style]",
    "x_column = a1_m",
    "x_transform = square",
    "y_column = gamma_inst_per_s",
    "hline = 3.26",
  ].join("\n"));
  const out = renderFromSpecFile(specPath);
  const summary = svgSummary(out);
  assert.equal(summary.colors, 3); // one series per input file
  assert.match(summary.svg, /class="refline"/);
});

test("header-only csv refuses to render and writes nothing", () => {
  const csvPath = join(work, "empty.csv");
  writeFileSync(csvPath, "detune_rad_s,a1_m\n");
  const specPath = join(work, "fig_empty.cfg");
  const outPath = join(work, "fig_empty.svg");
  writeFileSync(specPath, [
    "[figure]",
    "id = empty",
    `output = ${outPath}`,
    "[inputs]",
    `e = ${csvPath}`,
    "[style]",
    "x_column = detune_rad_s",
    "y_column = a1_m",
  ].join("\n"));
  assert.throws(() => renderFromSpecFile(specPath), /no data rows/);
  assert.throws(() => statSync(outPath));
});
