/** Minimal SVG line-chart builder (no DOM, string assembly only). */

import { Scale, formatTick, linearScale, logScale } from "./scale.js";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
  width?: number;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  width?: number;
  height?: number;
}

const MARGIN = { top: 34, right: 16, bottom: 42, left: 64 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function extent(values: number[], accept: (v: number) => boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (accept(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!(lo <= hi)) throw new Error("no drawable data points");
  return [lo, hi];
}

export function renderChart(series: Series[], opts: ChartOptions): string {
  if (series.length === 0) throw new Error("nothing to plot");
  const W = opts.width ?? 760;
  const H = opts.height ?? 480;
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;

  const acceptY = opts.logY ? (v: number) => Number.isFinite(v) && v > 0 : Number.isFinite;
  const allX = series.flatMap((s) => s.x.filter(Number.isFinite));
  const allY = series.flatMap((s) => s.y.filter(acceptY));
  const xs = linearScale(extent(allX, Number.isFinite), [x0, x1]);
  const ys: Scale = opts.logY
    ? logScale(extent(allY, acceptY), [y0, y1])
    : linearScale(extent(allY, Number.isFinite), [y0, y1]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${W / 2}" y="20" text-anchor="middle" font-size="14">${esc(opts.title)}</text>`);

  // axes frame
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
  for (const t of xs.ticks()) {
    const px = xs.map(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#444"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11">${formatTick(t, "linear")}</text>`,
    );
  }
  for (const t of ys.ticks()) {
    const py = ys.map(t);
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#444"/>`);
    parts.push(
      `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${x0 - 7}" y="${py + 4}" text-anchor="end" font-size="11">${formatTick(t, ys.kind)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${H - 8}" text-anchor="middle" font-size="12">${esc(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(opts.yLabel)}</text>`,
  );

  for (const s of series) {
    const segs: string[] = [];
    let current: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (Number.isFinite(s.x[i]) && acceptY(s.y[i])) {
        current.push(`${xs.map(s.x[i]).toFixed(2)},${ys.map(s.y[i]).toFixed(2)}`);
      } else if (current.length) {
        segs.push(current.join(" "));
        current = [];
      }
    }
    if (current.length) segs.push(current.join(" "));
    for (const seg of segs) {
      parts.push(
        `<polyline points="${seg}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.5}"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
      );
    }
  }

  // legend
  let ly = y1 + 14;
  for (const s of series) {
    parts.push(
      `<line x1="${x1 - 150}" y1="${ly - 4}" x2="${x1 - 122}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
    );
    parts.push(`<text x="${x1 - 116}" y="${ly}" font-size="11">${esc(s.label)}</text>`);
    ly += 15;
  }

  parts.push("</svg>");
  return parts.join("\n");
}
