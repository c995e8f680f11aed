/** Multi-line probability trend chart, rendered as plain SVG.
 *
 * X axis: timestamp labels. Y axis: probability. Hovering a point shows its
 * exact value; clicking a point emits the (word, time index) pair that
 * drives document retrieval.
 */

import type { TrendResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const SERIES_COLORS = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#d97706",
  "#7c3aed",
  "#0891b2",
  "#db2777",
  "#65a30d",
  "#9333ea",
  "#ea580c",
];

export interface ChartOptions {
  width?: number;
  height?: number;
  onPointClick?: (word: string, timeIndex: number) => void;
}

interface Layout {
  x(t: number): number;
  y(v: number): number;
}

function layout(trend: TrendResponse, width: number, height: number): Layout {
  const margin = { left: 46, right: 12, top: 10, bottom: 24 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;
  const tMax = Math.max(trend.timestamps.length - 1, 1);
  let vMax = 0;
  for (const series of trend.series) {
    for (const v of series.values) vMax = Math.max(vMax, v);
  }
  if (vMax === 0) vMax = 1;
  return {
    x: (t) => margin.left + (t / tMax) * innerW,
    y: (v) => margin.top + innerH - (v / vMax) * innerH,
  };
}

export function renderTrendChart(
  doc: Document,
  container: Element,
  trend: TrendResponse,
  options: ChartOptions = {},
): SVGSVGElement {
  const width = options.width ?? 640;
  const height = options.height ?? 280;
  const { x, y } = layout(trend, width, height);

  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "trend-chart");
  svg.setAttribute("role", "img");

  // X labels, one per timestamp.
  trend.timestamps.forEach((label, t) => {
    const text = doc.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(x(t)));
    text.setAttribute("y", String(height - 6));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("class", "axis-label");
    text.textContent = label;
    svg.appendChild(text);
  });

  trend.series.forEach((series, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("data-word", series.word);

    if (series.values.length > 1) {
      const line = doc.createElementNS(SVG_NS, "polyline");
      line.setAttribute(
        "points",
        series.values.map((v, t) => `${x(t)},${y(v)}`).join(" "),
      );
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", color);
      line.setAttribute("stroke-width", "2");
      group.appendChild(line);
    }

    series.values.forEach((value, t) => {
      const point = doc.createElementNS(SVG_NS, "circle");
      point.setAttribute("cx", String(x(t)));
      point.setAttribute("cy", String(y(value)));
      point.setAttribute("r", "5");
      point.setAttribute("fill", color);
      point.setAttribute("class", "trend-point");
      point.setAttribute("data-word", series.word);
      point.setAttribute("data-time", String(t));
      const tip = doc.createElementNS(SVG_NS, "title");
      tip.textContent = `${series.word} @ ${trend.timestamps[t]}: ${value.toPrecision(4)}`;
      point.appendChild(tip);
      point.addEventListener("click", () => {
        options.onPointClick?.(series.word, t);
      });
      group.appendChild(point);
    });

    svg.appendChild(group);
  });

  container.replaceChildren(svg);
  return svg;
}

export function renderLegend(
  doc: Document,
  container: Element,
  words: string[],
  active: string[],
  onToggle: (word: string) => void,
): void {
  container.replaceChildren();
  words.forEach((word, i) => {
    const chip = doc.createElement("button");
    chip.type = "button";
    chip.className = "legend-chip" + (active.includes(word) ? " active" : "");
    chip.dataset.word = word;
    chip.style.setProperty("--chip-color", SERIES_COLORS[i % SERIES_COLORS.length]);
    chip.textContent = word;
    chip.addEventListener("click", () => onToggle(word));
    container.appendChild(chip);
  });
}
