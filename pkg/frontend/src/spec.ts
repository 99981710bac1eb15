/**
 * Figure specification files.
 *
 * Same section/key-value text format as the simulator's run configuration:
 *
 *   [figure]
 *   id = fig4c
 *   output = figures/fig4c.svg
 *   layout = overlay            ; or "grid": one panel per input file
 *
 *   [inputs]
 *   response = runs/fr/forced_response.csv
 *
 *   [style]
 *   x_column = detune_rad_s
 *   y_column = a1_m
 *   series_column = branch_id   ; optional; default branch_id when present
 *   stable_column = stable      ; optional; default stable when present
 *   log_x = 0
 *   log_y = 0
 *   x_transform = none          ; or "square" (presentation only)
 *   hline = 3.26                ; optional horizontal reference
 */

export class SpecError extends Error {}

export interface FigureStyle {
  xColumn: string;
  yColumn: string;
  seriesColumn: string | null;
  stableColumn: string | null;
  logX: boolean;
  logY: boolean;
  xTransform: "none" | "square";
  hline: number | null;
  xLabel: string | null;
  yLabel: string | null;
}

export interface FigureSpec {
  id: string;
  output: string;
  layout: "overlay" | "grid";
  inputs: { name: string; path: string }[];
  style: FigureStyle;
}

type Sections = Map<string, Map<string, string>>;

export function parseSections(text: string, path: string): Sections {
  const sections: Sections = new Map();
  let current: Map<string, string> | null = null;
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "" || line.startsWith("#") || line.startsWith(";")) continue;
    const header = line.match(/^\[(.+)\]$/);
    if (header) {
      current = new Map();
      sections.set(header[1].trim(), current);
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0 || current === null) {
      throw new SpecError(`${path}: line ${i + 1}: expected 'key = value'`);
    }
    current.set(line.slice(0, eq).trim(), line.slice(eq + 1).trim());
  }
  return sections;
}

function flag(value: string | undefined, fallback: boolean): boolean {
  if (value === undefined) return fallback;
  if (value === "1" || value.toLowerCase() === "true") return true;
  if (value === "0" || value.toLowerCase() === "false") return false;
  throw new SpecError(`expected 0/1 flag, got '${value}'`);
}

export function parseFigureSpec(text: string, path: string): FigureSpec {
  const sections = parseSections(text, path);
  const figure = sections.get("figure");
  if (!figure) throw new SpecError(`${path}: missing [figure] section`);
  const id = figure.get("id");
  const output = figure.get("output");
  if (!id) throw new SpecError(`${path}: figure.id is required`);
  if (!output) throw new SpecError(`${path}: figure.output is required`);
  const layout = figure.get("layout") ?? "overlay";
  if (layout !== "overlay" && layout !== "grid") {
    throw new SpecError(
      `${path}: figure.layout: expected 'overlay' or 'grid', got '${layout}'`,
    );
  }
  const inputSection = sections.get("inputs");
  if (!inputSection || inputSection.size === 0) {
    throw new SpecError(`${path}: [inputs] must list at least one file`);
  }
  const inputs = [...inputSection.entries()].map(([name, p]) => ({
    name,
    path: p,
  }));
  const style = sections.get("style") ?? new Map<string, string>();
  const xColumn = style.get("x_column");
  const yColumn = style.get("y_column");
  if (!xColumn || !yColumn) {
    throw new SpecError(`${path}: style.x_column and style.y_column are required`);
  }
  const xTransform = style.get("x_transform") ?? "none";
  if (xTransform !== "none" && xTransform !== "square") {
    throw new SpecError(
      `${path}: style.x_transform: expected 'none' or 'square'`,
    );
  }
  let hline: number | null = null;
  const hlineText = style.get("hline");
  if (hlineText !== undefined) {
    hline = Number(hlineText);
    if (Number.isNaN(hline)) {
      throw new SpecError(`${path}: style.hline: not a number: '${hlineText}'`);
    }
  }
  try {
    return {
      id,
      output,
      layout,
      inputs,
      style: {
        xColumn,
        yColumn,
        seriesColumn: style.get("series_column") ?? null,
        stableColumn: style.get("stable_column") ?? null,
        logX: flag(style.get("log_x"), false),
        logY: flag(style.get("log_y"), false),
        xTransform,
        hline,
        xLabel: style.get("x_label") ?? null,
        yLabel: style.get("y_label") ?? null,
      },
    };
  } catch (err) {
    if (err instanceof SpecError) {
      throw new SpecError(`${path}: ${err.message}`);
    }
    throw err;
  }
}
