/**
 * Minimal deterministic SVG scene building: fixed panel geometry, linear or
 * logarithmic scales, nice-number ticks, solid/dashed polylines.  No
 * timestamps or randomness anywhere, so re-rendering reproduces the file
 * byte for byte.
 */

export const PANEL_WIDTH = 460;
export const PANEL_HEIGHT = 360;
const MARGIN = { left: 64, right: 16, top: 30, bottom: 46 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export interface Scale {
  toPixel(value: number): number;
  ticks: number[];
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * Math.abs(hi); v += step) {
    ticks.push(v);
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, p0: number,
                            p1: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
    lo = lo - 1;
  }
  const span = hi - lo;
  return {
    toPixel: (v) => p0 + ((v - lo) / span) * (p1 - p0),
    ticks: niceTicks(lo, hi),
  };
}

export function logScale(lo: number, hi: number, p0: number,
                         p1: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const ticks: number[] = [];
  for (let d = Math.ceil(llo); d <= Math.floor(lhi); d++) {
    ticks.push(Math.pow(10, d));
  }
  return {
    toPixel: (v) => p0 + ((Math.log10(v) - llo) / span) * (p1 - p0),
    ticks: ticks.length ? ticks : [lo],
  };
}

const fmt = (v: number) => {
  const s = v.toPrecision(6);
  return s.includes(".") || s.includes("e")
    ? s.replace(/\.?0+($|e)/, "$1")
    : s;
};

export const px = (v: number) => v.toFixed(2);

export interface Polyline {
  points: [number, number][];
  color: string;
  dashed: boolean;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  logX: boolean;
  logY: boolean;
  lines: Polyline[];
  hline: number | null;
}

function panelBody(panel: Panel, ox: number, oy: number): string {
  const x0 = ox + MARGIN.left;
  const x1 = ox + PANEL_WIDTH - MARGIN.right;
  const y0 = oy + PANEL_HEIGHT - MARGIN.bottom;
  const y1 = oy + MARGIN.top;
  const xs = panel.lines.flatMap((l) => l.points.map((p) => p[0]));
  const ys = panel.lines.flatMap((l) => l.points.map((p) => p[1]));
  if (panel.hline !== null) ys.push(panel.hline);
  const xlo = Math.min(...xs);
  const xhi = Math.max(...xs);
  const ylo = Math.min(...ys);
  const yhi = Math.max(...ys);
  const pad = (lo: number, hi: number): [number, number] => {
    const d = (hi - lo) * 0.05 || Math.abs(hi) * 0.05 || 1;
    return [lo - d, hi + d];
  };
  let xscale: Scale;
  let yscale: Scale;
  if (panel.logX) {
    xscale = logScale(xlo, xhi, x0, x1);
  } else {
    const [a, b] = pad(xlo, xhi);
    xscale = linearScale(a, b, x0, x1);
  }
  if (panel.logY) {
    yscale = logScale(ylo, yhi, y0, y1);
  } else {
    const [a, b] = pad(ylo, yhi);
    yscale = linearScale(a, b, y0, y1);
  }

  const parts: string[] = [];
  parts.push(
    `<rect x="${px(x0)}" y="${px(y1)}" width="${px(x1 - x0)}" ` +
      `height="${px(y0 - y1)}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of xscale.ticks) {
    const X = xscale.toPixel(t);
    if (X < x0 - 0.5 || X > x1 + 0.5) continue;
    parts.push(
      `<line x1="${px(X)}" y1="${px(y0)}" x2="${px(X)}" y2="${px(y0 + 4)}" ` +
        `stroke="#333" stroke-width="1"/>`,
      `<text x="${px(X)}" y="${px(y0 + 16)}" font-size="10" ` +
        `text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of yscale.ticks) {
    const Y = yscale.toPixel(t);
    if (Y > y0 + 0.5 || Y < y1 - 0.5) continue;
    parts.push(
      `<line x1="${px(x0 - 4)}" y1="${px(Y)}" x2="${px(x0)}" y2="${px(Y)}" ` +
        `stroke="#333" stroke-width="1"/>`,
      `<text x="${px(x0 - 6)}" y="${px(Y + 3)}" font-size="10" ` +
        `text-anchor="end">${fmt(t)}</text>`,
    );
  }
  if (panel.hline !== null) {
    const Y = yscale.toPixel(panel.hline);
    parts.push(
      `<line x1="${px(x0)}" y1="${px(Y)}" x2="${px(x1)}" y2="${px(Y)}" ` +
        `stroke="#999" stroke-width="0.8" stroke-dasharray="2,3" ` +
        `class="refline"/>`,
    );
  }
  for (const line of panel.lines) {
    if (line.points.length === 0) continue;
    const coords = line.points
      .map((p) => `${px(xscale.toPixel(p[0]))},${px(yscale.toPixel(p[1]))}`)
      .join(" ");
    const dash = line.dashed ? ' stroke-dasharray="6,4"' : "";
    const cls = line.dashed ? "unstable" : "stable";
    if (line.points.length === 1) {
      const [cx, cy] = line.points[0];
      parts.push(
        `<circle cx="${px(xscale.toPixel(cx))}" ` +
          `cy="${px(yscale.toPixel(cy))}" r="2" fill="${line.color}" ` +
          `class="${cls}"/>`,
      );
    } else {
      parts.push(
        `<polyline points="${coords}" fill="none" stroke="${line.color}" ` +
          `stroke-width="1.5"${dash} class="${cls}"/>`,
      );
    }
  }
  parts.push(
    `<text x="${px((x0 + x1) / 2)}" y="${px(oy + PANEL_HEIGHT - 10)}" ` +
      `font-size="11" text-anchor="middle">${panel.xLabel}</text>`,
    `<text x="${px(ox + 14)}" y="${px((y0 + y1) / 2)}" font-size="11" ` +
      `text-anchor="middle" transform="rotate(-90 ${px(ox + 14)} ` +
      `${px((y0 + y1) / 2)})">${panel.yLabel}</text>`,
    `<text x="${px((x0 + x1) / 2)}" y="${px(oy + 16)}" font-size="12" ` +
      `text-anchor="middle">${panel.title}</text>`,
  );
  return parts.join("\n");
}

export function renderSvg(panels: Panel[]): string {
  const cols = Math.ceil(Math.sqrt(panels.length));
  const rowCount = Math.ceil(panels.length / cols);
  const width = cols * PANEL_WIDTH;
  const height = rowCount * PANEL_HEIGHT;
  const body = panels
    .map((panel, i) =>
      panelBody(panel, (i % cols) * PANEL_WIDTH,
                Math.floor(i / cols) * PANEL_HEIGHT),
    )
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="sans-serif">\n<rect width="100%" height="100%" ` +
    `fill="white"/>\n${body}\n</svg>\n`
  );
}
