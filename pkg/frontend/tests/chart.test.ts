import { describe, expect, it } from "vitest";

import { renderLegend, renderTrendChart } from "../src/chart.js";
import type { TrendResponse } from "../src/types.js";

const TREND: TrendResponse = {
  topic: 0,
  timestamps: ["2015", "2016", "2017"],
  series: [
    { word: "upi", values: [0.01, 0.05, 0.2] },
    { word: "cash", values: [0.1, 0.18, 0.04] },
  ],
};

describe("renderTrendChart", () => {
  it("renders one point per (series, timestamp) and a line per series", () => {
    const host = document.createElement("div");
    renderTrendChart(document, host, TREND);
    expect(host.querySelectorAll("circle").length).toBe(6);
    expect(host.querySelectorAll("polyline").length).toBe(2);
    expect(host.querySelectorAll("text").length).toBe(3);
  });

  it("clicking a point emits its word-time pair", () => {
    const host = document.createElement("div");
    const clicks: Array<[string, number]> = [];
    renderTrendChart(document, host, TREND, {
      onPointClick: (word, time) => clicks.push([word, time]),
    });
    const point = host.querySelector('circle[data-word="upi"][data-time="2"]')!;
    point.dispatchEvent(new Event("click"));
    expect(clicks).toEqual([["upi", 2]]);
  });

  it("hover tooltip carries the exact value", () => {
    const host = document.createElement("div");
    renderTrendChart(document, host, TREND);
    const point = host.querySelector('circle[data-word="cash"][data-time="1"]')!;
    expect(point.querySelector("title")!.textContent).toContain("0.18");
    expect(point.querySelector("title")!.textContent).toContain("2016");
  });

  it("renders a single-timestamp series as a lone point", () => {
    const host = document.createElement("div");
    renderTrendChart(document, host, {
      topic: 0,
      timestamps: ["1999"],
      series: [{ word: "solo", values: [0.4] }],
    });
    expect(host.querySelectorAll("circle").length).toBe(1);
    expect(host.querySelectorAll("polyline").length).toBe(0);
  });
});

describe("renderLegend", () => {
  it("marks active words and toggles on click", () => {
    const host = document.createElement("div");
    const toggles: string[] = [];
    renderLegend(document, host, ["upi", "cash"], ["upi"], (w) => toggles.push(w));
    const chips = host.querySelectorAll("button");
    expect(chips.length).toBe(2);
    expect(chips[0].className).toContain("active");
    expect(chips[1].className).not.toContain("active");
    chips[1].dispatchEvent(new Event("click"));
    expect(toggles).toEqual(["cash"]);
  });
});
