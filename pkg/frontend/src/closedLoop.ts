import { Columns, decimate } from "./csv.js";
import * as svg from "./svg.js";

const WIDTH = 720;
const PANEL_H = 200;
const GAP = 56;
const TOP = 36;
const LEFT = 70;
const PLOT_W = WIDTH - 100;
const HEIGHT = TOP + 3 * PANEL_H + 2 * GAP + 60;
const COLORS = ["#1f77b4", "#d62728"];
const STATE_COLORS = [
  ["#1f77b4", "#7fb3d8"],
  ["#d62728", "#e89a9b"],
];
const MAX_POINTS = 4000;

// theta axis is pinned across runs so different figures compare directly
const THETA_LIM: [number, number] = [-5.5, 5.5];

function box(index: number): svg.PanelBox {
  return {
    x: LEFT,
    y: TOP + index * (PANEL_H + GAP),
    w: PLOT_W,
    h: PANEL_H,
  };
}

/**
 * Three stacked panels: measured state, detector output r, and theta with
 * a dashed reference line at thetaStar.  A second run may be overlaid.
 */
export function renderClosedLoop(
  runs: Array<{ cols: Columns; label: string }>,
  thetaStar: number
): string {
  const t = runs.flatMap((r) => r.cols.t);
  const tExt = svg.extent(t, 0.0);
  const parts: string[] = [];

  // panel 1: system state (both measured components)
  const b1 = box(0);
  const stateVals = runs.flatMap((r) => [...r.cols.x_meas, ...r.cols.y_meas]);
  const sx1 = svg.linearScale(tExt, [b1.x, b1.x + b1.w]);
  const sy1 = svg.linearScale(svg.extent(stateVals), [b1.y + b1.h, b1.y]);
  parts.push('<g class="panel">');
  parts.push(svg.axes(b1, sx1, sy1, "t [s]", "state", "measured state"));
  runs.forEach((run, i) => {
    const xm = decimate(run.cols.t, run.cols.x_meas, MAX_POINTS);
    const ym = decimate(run.cols.t, run.cols.y_meas, MAX_POINTS);
    parts.push(svg.polyline(xm.x, xm.y, sx1, sy1, STATE_COLORS[i % 2][0], 0.8));
    parts.push(svg.polyline(ym.x, ym.y, sx1, sy1, STATE_COLORS[i % 2][1], 0.8));
  });
  parts.push("</g>");

  // panel 2: detector output
  const b2 = box(1);
  const rVals = runs.flatMap((r) => r.cols.r);
  const sx2 = svg.linearScale(tExt, [b2.x, b2.x + b2.w]);
  const sy2 = svg.linearScale(svg.extent(rVals), [b2.y + b2.h, b2.y]);
  parts.push('<g class="panel">');
  parts.push(svg.axes(b2, sx2, sy2, "t [s]", "r", "detector output"));
  runs.forEach((run, i) => {
    const d = decimate(run.cols.t, run.cols.r, MAX_POINTS);
    parts.push(svg.polyline(d.x, d.y, sx2, sy2, COLORS[i % COLORS.length]));
  });
  parts.push("</g>");

  // panel 3: parameter estimate with the reference line
  const b3 = box(2);
  const sx3 = svg.linearScale(tExt, [b3.x, b3.x + b3.w]);
  const sy3 = svg.linearScale(THETA_LIM, [b3.y + b3.h, b3.y]);
  parts.push('<g class="panel">');
  parts.push(svg.axes(b3, sx3, sy3, "t [s]", "theta", "parameter estimate"));
  parts.push(svg.dashedHLine(b3, sy3, thetaStar));
  runs.forEach((run, i) => {
    const d = decimate(run.cols.t, run.cols.theta, MAX_POINTS);
    parts.push(svg.polyline(d.x, d.y, sx3, sy3, COLORS[i % COLORS.length]));
  });
  if (runs.length > 1) {
    parts.push(
      svg.legend(
        b3,
        runs.map((r, j) => ({ label: r.label, stroke: COLORS[j % 2] }))
      )
    );
  }
  parts.push("</g>");

  return svg.document(WIDTH, HEIGHT, parts.join("\n"));
}
