import { Columns, decimate } from "./csv.js";
import * as svg from "./svg.js";

const WIDTH = 720;
const HEIGHT = 420;
const BOX: svg.PanelBox = { x: 70, y: 40, w: WIDTH - 100, h: HEIGHT - 110 };
const COLORS = ["#1f77b4", "#d62728"];
const MAX_POINTS = 4000;

function argmin(values: number[]): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

/** r vs theta, with the minimum annotated; a second map may be overlaid. */
export function renderStaticMap(
  maps: Array<{ cols: Columns; label: string }>
): string {
  const allTheta = maps.flatMap((m) => m.cols.theta);
  const allR = maps.flatMap((m) => m.cols.r);
  const sx = svg.linearScale(svg.extent(allTheta, 0.02), [BOX.x, BOX.x + BOX.w]);
  const sy = svg.linearScale(svg.extent(allR), [BOX.y + BOX.h, BOX.y]);

  const parts: string[] = ['<g class="panel">'];
  parts.push(svg.axes(BOX, sx, sy, "theta", "r", "static map"));
  maps.forEach((m, i) => {
    const { x, y } = decimate(m.cols.theta, m.cols.r, MAX_POINTS);
    parts.push(svg.polyline(x, y, sx, sy, COLORS[i % COLORS.length]));
  });

  // annotate the minimum of the first (primary) map
  const primary = maps[0].cols;
  const i = argmin(primary.r);
  const px = sx(primary.theta[i]);
  const py = sy(primary.r[i]);
  parts.push(
    `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="4" fill="none" stroke="#000" stroke-width="1.5"/>`,
    `<text x="${(px + 8).toFixed(2)}" y="${(py - 8).toFixed(2)}" font-size="11">argmin ${primary.theta[i].toPrecision(4)}</text>`
  );

  if (maps.length > 1) {
    parts.push(
      svg.legend(
        BOX,
        maps.map((m, j) => ({ label: m.label, stroke: COLORS[j % COLORS.length] }))
      )
    );
  }
  parts.push("</g>");
  return svg.document(WIDTH, HEIGHT, parts.join("\n"));
}
