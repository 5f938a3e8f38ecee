/** Concordance / discordance matrix view models and HTML tables. */

import type { OutrankingView } from "./types.js";

export interface MatrixCellVM {
  row: string;
  col: string;
  value: number;
  diagonal: boolean;
  /** Whether this cell clears its threshold (>= c_hat, or <= d_hat). */
  passes: boolean;
}

export function matrixCells(
  outranking: OutrankingView,
  which: "concordance" | "discordance",
): MatrixCellVM[] {
  const matrix = which === "concordance" ? outranking.concordance : outranking.discordance;
  const threshold = which === "concordance" ? outranking.c_hat : outranking.d_hat;
  const cells: MatrixCellVM[] = [];
  outranking.actions.forEach((row, i) => {
    outranking.actions.forEach((col, j) => {
      const value = matrix[i][j];
      cells.push({
        row,
        col,
        value,
        diagonal: i === j,
        passes:
          i !== j &&
          (which === "concordance" ? value >= threshold : value <= threshold),
      });
    });
  });
  return cells;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderMatrixTable(
  outranking: OutrankingView,
  which: "concordance" | "discordance",
): string {
  const threshold = which === "concordance" ? outranking.c_hat : outranking.d_hat;
  const cells = matrixCells(outranking, which);
  const head = outranking.actions
    .map((a) => `<th scope="col">${escapeHtml(a)}</th>`)
    .join("");
  const rows = outranking.actions
    .map((row) => {
      const line = cells
        .filter((c) => c.row === row)
        .map((c) => {
          const classes = c.diagonal ? "diag" : c.passes ? "passes" : "";
          return `<td class="${classes}">${c.value.toFixed(2)}</td>`;
        })
        .join("");
      return `<tr><th scope="row">${escapeHtml(row)}</th>${line}</tr>`;
    })
    .join("");
  const sign = which === "concordance" ? "≥" : "≤";
  return (
    `<table class="matrix ${which}">` +
    `<caption>${which} (threshold ${sign} ${threshold.toFixed(2)})</caption>` +
    `<thead><tr><th></th>${head}</tr></thead><tbody>${rows}</tbody></table>`
  );
}
