/** Minimal SVG assembly: fixed canvas, linear scales, line paths, axes. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

export function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  const p = (hi - lo) * pad;
  return [lo - p, hi + p];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

export function ticks([lo, hi]: [number, number], count = 5): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const mult = [5, 2, 1].find((m) => span / (step * m) >= count) ?? 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + s * 1e-9; v += s) {
    out.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return out;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(
  xs: number[],
  ys: number[],
  sx: Scale,
  sy: Scale,
  stroke: string,
  width = 1.2
): string {
  const pts = xs
    .map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`)
    .join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`;
}

export interface PanelBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Frame, tick marks, tick labels, and axis titles for one panel. */
export function axes(
  box: PanelBox,
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  title = ""
): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${box.x}" y="${box.y}" width="${box.w}" height="${box.h}" fill="none" stroke="#333" stroke-width="1"/>`
  );
  for (const t of ticks(sx.domain)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${box.y + box.h}" x2="${px.toFixed(2)}" y2="${box.y + box.h + 4}" stroke="#333"/>`,
      `<text x="${px.toFixed(2)}" y="${box.y + box.h + 16}" font-size="10" text-anchor="middle">${fmt(t)}</text>`
    );
  }
  for (const t of ticks(sy.domain)) {
    const py = sy(t);
    parts.push(
      `<line x1="${box.x - 4}" y1="${py.toFixed(2)}" x2="${box.x}" y2="${py.toFixed(2)}" stroke="#333"/>`,
      `<text x="${box.x - 7}" y="${(py + 3).toFixed(2)}" font-size="10" text-anchor="end">${fmt(t)}</text>`
    );
  }
  parts.push(
    `<text x="${box.x + box.w / 2}" y="${box.y + box.h + 32}" font-size="11" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="${box.x - 44}" y="${box.y + box.h / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 ${box.x - 44} ${box.y + box.h / 2})">${esc(yLabel)}</text>`
  );
  if (title) {
    parts.push(
      `<text x="${box.x + box.w / 2}" y="${box.y - 6}" font-size="12" text-anchor="middle" font-weight="bold">${esc(title)}</text>`
    );
  }
  return parts.join("\n");
}

export function dashedHLine(
  box: PanelBox,
  sy: Scale,
  value: number,
  stroke = "#444"
): string {
  const py = sy(value).toFixed(2);
  return `<line x1="${box.x}" y1="${py}" x2="${box.x + box.w}" y2="${py}" stroke="${stroke}" stroke-width="1" stroke-dasharray="6 4"/>`;
}

export function legend(
  box: PanelBox,
  entries: Array<{ label: string; stroke: string }>
): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const y = box.y + 14 + i * 15;
    const x = box.x + box.w - 110;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 18}" y2="${y - 4}" stroke="${e.stroke}" stroke-width="2"/>`,
      `<text x="${x + 23}" y="${y}" font-size="10">${esc(e.label)}</text>`
    );
  });
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
