/**
 * Figure assembly: CSV rows -> per-series strands -> styled panels.
 *
 * All numbers come straight from the input tables; this layer performs no
 * physics.  Branch identity comes from the series column (one drawn series
 * per distinct branch id); multivalued branches are re-threaded into
 * continuous strands by nearest-neighbour continuation along the sweep
 * axis, and each strand is split into stable (solid) and unstable (dashed)
 * runs.
 */

import { CsvTable, numericCell, requireColumn, requireRows } from "./csv.js";
import { FigureSpec } from "./spec.js";
import { PALETTE, Panel, Polyline, renderSvg } from "./svg.js";

interface Point {
  x: number;
  y: number;
  stable: boolean;
}

export interface SeriesInfo {
  key: string;
  pointCount: number;
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const list = out.get(k);
    if (list) list.push(item);
    else out.set(k, [item]);
  }
  return out;
}

/**
 * Thread points into continuous strands.
 *
 * Points are grouped by axis value; moving through the axis values in
 * order, each point attaches to the open strand whose last ordinate is
 * nearest, leftovers open new strands, unmatched strands close.  This
 * reproduces fold shapes without drawing zigzags across coexisting states.
 */
export function threadStrands(points: Point[]): Point[][] {
  const byX = [...groupBy(points, (p) => String(p.x)).values()];
  byX.sort((a, b) => a[0].x - b[0].x);
  const strands: Point[][] = [];
  let open: Point[][] = [];
  for (const column of byX) {
    const rows = [...column].sort((a, b) => a.y - b.y);
    const taken = new Set<number>();
    const next: Point[][] = [];
    const pairs: { d: number; si: number; ri: number }[] = [];
    for (let si = 0; si < open.length; si++) {
      const last = open[si][open[si].length - 1].y;
      for (let ri = 0; ri < rows.length; ri++) {
        pairs.push({ d: Math.abs(rows[ri].y - last), si, ri });
      }
    }
    pairs.sort((a, b) => a.d - b.d || a.si - b.si || a.ri - b.ri);
    const usedStrand = new Set<number>();
    for (const { si, ri } of pairs) {
      if (usedStrand.has(si) || taken.has(ri)) continue;
      usedStrand.add(si);
      taken.add(ri);
      open[si].push(rows[ri]);
      next.push(open[si]);
    }
    for (let ri = 0; ri < rows.length; ri++) {
      if (!taken.has(ri)) next.push([rows[ri]]);
    }
    for (let si = 0; si < open.length; si++) {
      if (!usedStrand.has(si)) strands.push(open[si]);
    }
    open = next;
  }
  strands.push(...open);
  return strands;
}

/** Split one strand into stability runs; boundary points are shared so the
 * drawn curve stays connected. */
export function stabilityRuns(strand: Point[]): Point[][] {
  const runs: Point[][] = [];
  let current: Point[] = [];
  for (const point of strand) {
    if (current.length === 0 ||
        current[current.length - 1].stable === point.stable) {
      current.push(point);
    } else {
      runs.push(current);
      current = [current[current.length - 1], point];
    }
  }
  if (current.length) runs.push(current);
  return runs;
}

function extractPoints(table: CsvTable, spec: FigureSpec,
                       seriesLabel: string): Map<string, Point[]> {
  const { style } = spec;
  const xi = requireColumn(table, style.xColumn);
  const yi = requireColumn(table, style.yColumn);
  const seriesName = style.seriesColumn
    ?? (table.columns.includes("branch_id") ? "branch_id" : null);
  const si = seriesName === null ? -1 : requireColumn(table, seriesName);
  const stableName = style.stableColumn
    ?? (table.columns.includes("stable") ? "stable" : null);
  const sti = stableName === null ? -1 : requireColumn(table, stableName);
  const points: { series: string; point: Point }[] = [];
  for (let r = 0; r < table.rows.length; r++) {
    const xRaw = numericCell(table, r, xi);
    const y = numericCell(table, r, yi);
    if (xRaw === null || y === null) continue;
    const x = style.xTransform === "square" ? xRaw * xRaw : xRaw;
    points.push({
      series: si < 0 ? seriesLabel : `${seriesLabel}:${table.rows[r][si]}`,
      point: { x, y, stable: sti < 0 ? true : table.rows[r][sti] !== 0 },
    });
  }
  const grouped = groupBy(points, (p) => p.series);
  const out = new Map<string, Point[]>();
  for (const [key, list] of grouped) {
    out.set(key, list.map((p) => p.point));
  }
  return out;
}

export interface RenderedFigure {
  svg: string;
  panels: number;
  /** Distinct series per panel, in panel order. */
  series: SeriesInfo[][];
}

export function buildFigure(spec: FigureSpec,
                            tables: CsvTable[]): RenderedFigure {
  for (const table of tables) {
    requireRows(table);
    requireColumn(table, spec.style.xColumn);
    requireColumn(table, spec.style.yColumn);
  }
  const { style } = spec;
  const panelInputs: { title: string; tables: [string, CsvTable][] }[] =
    spec.layout === "grid"
      ? spec.inputs.map((input, i) => ({
          title: `${spec.id}: ${input.name}`,
          tables: [[input.name, tables[i]]],
        }))
      : [{
          title: spec.id,
          tables: spec.inputs.map((input, i) => [input.name, tables[i]]),
        }];

  const panels: Panel[] = [];
  const seriesInfo: SeriesInfo[][] = [];
  for (const panelInput of panelInputs) {
    const bySeries = new Map<string, Point[]>();
    for (const [label, table] of panelInput.tables) {
      for (const [key, pts] of extractPoints(table, spec, label)) {
        bySeries.set(key, pts);
      }
    }
    const keys = [...bySeries.keys()].sort();
    const lines: Polyline[] = [];
    const info: SeriesInfo[] = [];
    keys.forEach((key, idx) => {
      const color = PALETTE[idx % PALETTE.length];
      const pts = bySeries.get(key)!;
      info.push({ key, pointCount: pts.length });
      for (const strand of threadStrands(pts)) {
        for (const run of stabilityRuns(strand)) {
          lines.push({
            points: run.map((p) => [p.x, p.y]),
            color,
            dashed: !run[0].stable || !run[run.length - 1].stable,
          });
        }
      }
    });
    panels.push({
      title: panelInput.title,
      xLabel: style.xLabel ?? (style.xTransform === "square"
        ? `(${style.xColumn})^2`
        : style.xColumn),
      yLabel: style.yLabel ?? style.yColumn,
      logX: style.logX,
      logY: style.logY,
      lines,
      hline: style.hline,
    });
    seriesInfo.push(info);
  }
  return {
    svg: renderSvg(panels),
    panels: panels.length,
    series: seriesInfo,
  };
}
