/** Graph and matrix view models: kernel highlight, cycle grouping, thresholds. */

import { describe, expect, it } from "vitest";

import { edgePairs, graphViewModel, renderGraphSvg } from "../src/graph.js";
import { matrixCells, renderMatrixTable } from "../src/matrix.js";
import type { KernelView, OutrankingView } from "../src/types.js";

function outrankingFixture(): OutrankingView {
  return {
    actions: ["A", "B", "C"],
    concordance: [
      [1.0, 0.8, 0.9],
      [0.4, 1.0, 0.2],
      [0.6, 0.7, 1.0],
    ],
    discordance: [
      [0.0, 0.1, 0.0],
      [0.9, 0.0, 0.8],
      [0.3, 0.2, 0.0],
    ],
    c_hat: 0.7,
    d_hat: 0.3,
    edges: [
      [0, 1],
      [0, 2],
    ],
  };
}

const KERNEL: KernelView = { members: ["A"], collapsed_cycles: [] };

describe("graphViewModel", () => {
  it("positions every action and marks kernel membership", () => {
    const vm = graphViewModel(outrankingFixture(), KERNEL);
    expect(vm.nodes.map((n) => n.id).sort()).toEqual(["A", "B", "C"]);
    expect(vm.nodes.find((n) => n.id === "A")?.inKernel).toBe(true);
    expect(vm.nodes.find((n) => n.id === "B")?.inKernel).toBe(false);
    expect(vm.edges).toEqual([
      { from: "A", to: "B" },
      { from: "A", to: "C" },
    ]);
  });

  it("groups collapsed cycle members adjacently", () => {
    const outranking = outrankingFixture();
    outranking.edges = [
      [0, 1],
      [1, 0],
      [0, 2],
    ];
    const kernel: KernelView = { members: ["A", "B"], collapsed_cycles: [["A", "B"]] };
    const vm = graphViewModel(outranking, kernel);
    const groupMembers = vm.nodes.filter((n) => n.cycleGroup === 0).map((n) => n.id);
    expect(groupMembers.sort()).toEqual(["A", "B"]);
    expect(vm.cycleGroups).toEqual([["A", "B"]]);
    const order = vm.nodes.map((n) => n.id);
    expect(Math.abs(order.indexOf("A") - order.indexOf("B"))).toBe(1);
  });

  it("keeps nodes inside the viewport", () => {
    const vm = graphViewModel(outrankingFixture(), KERNEL, 400, 300);
    for (const node of vm.nodes) {
      expect(node.x).toBeGreaterThan(0);
      expect(node.x).toBeLessThan(400);
      expect(node.y).toBeGreaterThan(0);
      expect(node.y).toBeLessThan(300);
    }
  });
});

describe("renderGraphSvg", () => {
  it("draws arrows, kernel highlight, and the cycle hull", () => {
    const outranking = outrankingFixture();
    outranking.edges = [
      [0, 1],
      [1, 0],
      [0, 2],
    ];
    const kernel: KernelView = { members: ["A", "B"], collapsed_cycles: [["A", "B"]] };
    const svg = renderGraphSvg(graphViewModel(outranking, kernel));
    expect(svg).toContain("marker-end=\"url(#arrow)\"");
    expect(svg).toContain("class=\"node kernel\"");
    expect(svg).toContain("cycle-group");
    expect((svg.match(/<line class="edge"/g) ?? []).length).toBe(3);
  });

  it("escapes action labels", () => {
    const outranking = outrankingFixture();
    outranking.actions = ["a<b", "c&d", "plain"];
    const svg = renderGraphSvg(graphViewModel(outranking, { members: [], collapsed_cycles: [] }));
    expect(svg).toContain("a&lt;b");
    expect(svg).toContain("c&amp;d");
    expect(svg).not.toContain("a<b\"");
  });
});

describe("threshold display monotonicity", () => {
  it("a tighter graph never shows an edge the looser one lacked", () => {
    const loose = outrankingFixture();
    loose.edges = [
      [0, 1],
      [0, 2],
      [2, 1],
    ];
    const tight = outrankingFixture();
    tight.c_hat = 0.9;
    tight.edges = [
      [0, 1],
      [0, 2],
    ];
    const loosePairs = new Set(edgePairs(loose).map((e) => e.join(">")));
    for (const pair of edgePairs(tight).map((e) => e.join(">"))) {
      expect(loosePairs.has(pair)).toBe(true);
    }
  });
});

describe("matrix view", () => {
  it("marks cells that clear their threshold", () => {
    const cells = matrixCells(outrankingFixture(), "concordance");
    const ab = cells.find((c) => c.row === "A" && c.col === "B");
    const ba = cells.find((c) => c.row === "B" && c.col === "A");
    expect(ab?.passes).toBe(true); // 0.8 >= 0.7
    expect(ba?.passes).toBe(false); // 0.4 < 0.7
    const diag = cells.find((c) => c.row === "A" && c.col === "A");
    expect(diag?.diagonal).toBe(true);
    expect(diag?.passes).toBe(false);
  });

  it("discordance passes when at or below the threshold", () => {
    const cells = matrixCells(outrankingFixture(), "discordance");
    const ab = cells.find((c) => c.row === "A" && c.col === "B");
    const ba = cells.find((c) => c.row === "B" && c.col === "A");
    expect(ab?.passes).toBe(true); // 0.1 <= 0.3
    expect(ba?.passes).toBe(false); // 0.9 > 0.3
  });

  it("renders both tables with captions", () => {
    const html = renderMatrixTable(outrankingFixture(), "concordance");
    expect(html).toContain("concordance");
    expect(html).toContain("0.70");
    expect(html).toContain("passes");
  });
});
