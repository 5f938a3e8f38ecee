/** Outranking graph rendering: circular node-link layout as inline SVG.
 *
 * Kernel members are highlighted, and actions belonging to one collapsed
 * cycle are placed adjacently and wrapped by a dashed hull so ties read as
 * one grouped node.
 */

import type { KernelView, OutrankingView } from "./types.js";

export interface GraphNodeVM {
  id: string;
  label: string;
  x: number;
  y: number;
  inKernel: boolean;
  cycleGroup: number | null;
}

export interface GraphEdgeVM {
  from: string;
  to: string;
}

export interface GraphViewModel {
  width: number;
  height: number;
  nodes: GraphNodeVM[];
  edges: GraphEdgeVM[];
  cycleGroups: string[][];
}

export function edgePairs(outranking: OutrankingView): [string, string][] {
  return outranking.edges.map(([i, j]) => [outranking.actions[i], outranking.actions[j]]);
}

export function graphViewModel(
  outranking: OutrankingView,
  kernel: KernelView | null,
  width = 460,
  height = 320,
): GraphViewModel {
  const members = new Set(kernel?.members ?? []);
  const groups = kernel?.collapsed_cycles ?? [];
  const groupOf = new Map<string, number>();
  groups.forEach((group, gi) => group.forEach((action) => groupOf.set(action, gi)));

  // Order nodes so cycle-group members sit next to each other on the circle.
  const ordered: string[] = [];
  const seen = new Set<string>();
  for (const action of outranking.actions) {
    if (seen.has(action)) continue;
    const gi = groupOf.get(action);
    const block = gi === undefined ? [action] : groups[gi];
    for (const item of block) {
      if (!seen.has(item)) {
        ordered.push(item);
        seen.add(item);
      }
    }
  }

  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 2 - 50;
  const nodes = ordered.map((action, i) => {
    const angle = (2 * Math.PI * i) / ordered.length - Math.PI / 2;
    return {
      id: action,
      label: action,
      x: Math.round(cx + radius * Math.cos(angle)),
      y: Math.round(cy + radius * Math.sin(angle)),
      inKernel: members.has(action),
      cycleGroup: groupOf.get(action) ?? null,
    };
  });

  return {
    width,
    height,
    nodes,
    edges: edgePairs(outranking).map(([from, to]) => ({ from, to })),
    cycleGroups: groups.map((g) => [...g]),
  };
}

function escapeXml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const NODE_RADIUS = 16;

export function renderGraphSvg(vm: GraphViewModel): string {
  const byId = new Map(vm.nodes.map((n) => [n.id, n]));
  const parts: string[] = [];
  parts.push(
    `<svg class="outranking-graph" viewBox="0 0 ${vm.width} ${vm.height}" ` +
      `xmlns="http://www.w3.org/2000/svg" role="img">`,
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
      `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" fill="#51606f"/></marker></defs>`,
  );

  // dashed hull behind each collapsed cycle
  vm.cycleGroups.forEach((group, gi) => {
    const points = group
      .map((id) => byId.get(id))
      .filter((n): n is GraphNodeVM => n !== undefined);
    if (points.length === 0) return;
    const minX = Math.min(...points.map((n) => n.x)) - NODE_RADIUS - 8;
    const maxX = Math.max(...points.map((n) => n.x)) + NODE_RADIUS + 8;
    const minY = Math.min(...points.map((n) => n.y)) - NODE_RADIUS - 8;
    const maxY = Math.max(...points.map((n) => n.y)) + NODE_RADIUS + 8;
    parts.push(
      `<rect class="cycle-group" data-group="${gi}" x="${minX}" y="${minY}" ` +
        `width="${maxX - minX}" height="${maxY - minY}" rx="14"/>`,
    );
  });

  for (const edge of vm.edges) {
    const from = byId.get(edge.from);
    const to = byId.get(edge.to);
    if (!from || !to) continue;
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const length = Math.hypot(dx, dy) || 1;
    const trim = NODE_RADIUS + 4;
    const x1 = from.x + (dx / length) * trim;
    const y1 = from.y + (dy / length) * trim;
    const x2 = to.x - (dx / length) * trim;
    const y2 = to.y - (dy / length) * trim;
    parts.push(
      `<line class="edge" x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" ` +
        `x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" marker-end="url(#arrow)"/>`,
    );
  }

  for (const node of vm.nodes) {
    const classes = node.inKernel ? "node kernel" : "node";
    parts.push(
      `<g class="${classes}" data-action="${escapeXml(node.id)}">`,
      `<circle cx="${node.x}" cy="${node.y}" r="${NODE_RADIUS}"/>`,
      `<text x="${node.x}" y="${node.y + NODE_RADIUS + 14}" text-anchor="middle">` +
        `${escapeXml(shorten(node.label))}</text>`,
      `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

function shorten(label: string, max = 22): string {
  return label.length <= max ? label : `${label.slice(0, max - 1)}…`;
}
