/** Minimal SVG assembly for line figures: fixed layout, log or linear axes. */

export interface Point {
  x: number;
  y: number;
}

export interface Scale {
  kind: "linear" | "log";
  min: number;
  max: number;
  toPixel(value: number): number;
}

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN = { left: 80, right: 24, top: 24, bottom: 56 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
export const BOUND_COLOR = "#444444";

function transform(kind: "linear" | "log", v: number): number {
  return kind === "log" ? Math.log10(v) : v;
}

export function makeScale(kind: "linear" | "log", min: number, max: number, pixelLo: number, pixelHi: number): Scale {
  const lo = transform(kind, min);
  const hi = transform(kind, max);
  const span = hi - lo || 1;
  return {
    kind,
    min,
    max,
    toPixel(value: number): number {
      return pixelLo + ((transform(kind, value) - lo) / span) * (pixelHi - pixelLo);
    },
  };
}

export function ticks(scale: Scale): number[] {
  if (scale.kind === "log") {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(scale.min) - 1e-9); e <= Math.floor(Math.log10(scale.max) + 1e-9); e++) {
      out.push(10 ** e);
    }
    return out.length >= 2 ? out : [scale.min, scale.max];
  }
  const out: number[] = [];
  for (let i = 0; i <= 5; i++) {
    out.push(scale.min + ((scale.max - scale.min) * i) / 5);
  }
  return out;
}

export function formatTick(v: number, kind: "linear" | "log"): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01) ? v.toExponential(1) : String(Math.round(v * 100) / 100);
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");

export interface RenderedSeries {
  label: string;
  color: string;
  dashed: boolean;
  pixels: Point[];
}

export function buildSvg(opts: {
  series: RenderedSeries[];
  xScale: Scale;
  yScale: Scale;
  xLabel: string;
  yLabel: string;
}): string {
  const { series, xScale, yScale, xLabel, yLabel } = opts;
  const px0 = MARGIN.left;
  const px1 = WIDTH - MARGIN.right;
  const py0 = HEIGHT - MARGIN.bottom;
  const py1 = MARGIN.top;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `data-x-scale="${xScale.kind}" data-y-scale="${yScale.kind}">`
  );
  parts.push(`<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<rect class="plot-area" x="${px0}" y="${py1}" width="${px1 - px0}" height="${py0 - py1}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`
  );
  for (const v of ticks(xScale)) {
    const x = xScale.toPixel(v).toFixed(2);
    parts.push(`<line x1="${x}" y1="${py0}" x2="${x}" y2="${py0 + 5}" stroke="#333"/>`);
    parts.push(
      `<text class="tick-x" x="${x}" y="${py0 + 20}" font-size="12" text-anchor="middle">` +
        `${formatTick(v, xScale.kind)}</text>`
    );
  }
  for (const v of ticks(yScale)) {
    const y = yScale.toPixel(v).toFixed(2);
    parts.push(`<line x1="${px0 - 5}" y1="${y}" x2="${px0}" y2="${y}" stroke="#333"/>`);
    parts.push(
      `<text class="tick-y" x="${px0 - 8}" y="${y}" font-size="12" text-anchor="end" ` +
        `dominant-baseline="middle">${formatTick(v, yScale.kind)}</text>`
    );
  }
  parts.push(
    `<text class="axis-title-x" x="${(px0 + px1) / 2}" y="${HEIGHT - 12}" font-size="14" ` +
      `text-anchor="middle">${esc(xLabel)}</text>`
  );
  parts.push(
    `<text class="axis-title-y" x="18" y="${(py0 + py1) / 2}" font-size="14" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${(py0 + py1) / 2})">${esc(yLabel)}</text>`
  );
  for (const s of series) {
    const pts = s.pixels.map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
    const dash = s.dashed ? ` stroke-dasharray="6 3"` : "";
    parts.push(
      `<polyline class="series" data-label="${esc(s.label)}" points="${pts}" fill="none" ` +
        `stroke="${s.color}" stroke-width="1.5"${dash}/>`
    );
  }
  series.forEach((s, i) => {
    const lx = px0 + 12;
    const ly = py1 + 16 + i * 18;
    const dash = s.dashed ? ` stroke-dasharray="6 3"` : "";
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
    parts.push(
      `<text class="legend-label" data-label="${esc(s.label)}" x="${lx + 28}" y="${ly}" ` +
        `font-size="12">${esc(s.label)}</text>`
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
