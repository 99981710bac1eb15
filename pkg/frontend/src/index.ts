#!/usr/bin/env node
/**
 * render-figure --spec PATH [--output PATH]
 *
 * Reads a figure specification (section/key-value text), loads the listed
 * simulation CSVs, and writes one SVG.  Inputs are never modified; every
 * validation error names the offending file and field.  Exit codes:
 * 0 success, 2 specification/validation error, 4 I/O error.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { CsvError, parseCsv } from "./csv.js";
import { buildFigure } from "./figure.js";
import { SpecError, parseFigureSpec } from "./spec.js";

export function renderFromSpecFile(specPath: string,
                                   outputOverride?: string): string {
  const spec = parseFigureSpec(readFileSync(specPath, "utf-8"), specPath);
  const baseDir = dirname(resolve(specPath));
  const tables = spec.inputs.map((input) => {
    const path = resolve(baseDir, input.path);
    return parseCsv(readFileSync(path, "utf-8"), path);
  });
  const figure = buildFigure(spec, tables);
  const outPath = outputOverride ?? resolve(baseDir, spec.output);
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, figure.svg, "utf-8");
  return outPath;
}

function main(argv: string[]): number {
  let specPath: string | null = null;
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") specPath = argv[++i];
    else if (argv[i] === "--output") output = argv[++i];
    else {
      console.error(`unknown argument: ${argv[i]}`);
      return 2;
    }
  }
  if (!specPath) {
    console.error("usage: render-figure --spec PATH [--output PATH]");
    return 2;
  }
  try {
    const outPath = renderFromSpecFile(specPath, output);
    console.log(outPath);
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`i/o error: ${err.message}`);
      return 4;
    }
    throw err;
  }
}

if (process.argv[1]
    && fileURLToPath(import.meta.url) === resolve(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
