/** Evaluation dashboard: per-question mean bars with significance stars.
 *
 * Every number and star is taken verbatim from the ratings-stats response;
 * nothing is computed here beyond pixel geometry.  Stars follow the
 * response's one-sample-t-test annotation (***, **, * for p below .001,
 * .01, .05).
 */

import type { RatingStats, RatingRow } from "./types.js";

const CHART_WIDTH = 520;
const CHART_HEIGHT = 240;
const BAR_AREA_HEIGHT = 170;
const BAR_WIDTH = 72;
const GAP = 48;
const MAX_SCORE = 5;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function bar(row: RatingRow, index: number): string {
  const x = 40 + index * (BAR_WIDTH + GAP);
  if (!row.sufficient || row.mean === null) {
    return `
      <text class="bar-label insufficient" x="${x + BAR_WIDTH / 2}"
            y="${BAR_AREA_HEIGHT + 20}" text-anchor="middle">
        ${escapeHtml(row.question)}</text>
      <text class="bar-note" x="${x + BAR_WIDTH / 2}" y="${BAR_AREA_HEIGHT - 8}"
            text-anchor="middle">n=${row.n} (insufficient)</text>`;
  }
  const height = (row.mean / MAX_SCORE) * BAR_AREA_HEIGHT;
  const y = BAR_AREA_HEIGHT - height;
  const stars = row.stars ?? "";
  return `
    <rect class="bar" x="${x}" y="${y}" width="${BAR_WIDTH}"
          height="${height}" rx="3"></rect>
    <text class="bar-value" x="${x + BAR_WIDTH / 2}" y="${y - 18}"
          text-anchor="middle">${row.mean.toFixed(2)}</text>
    <text class="bar-stars" x="${x + BAR_WIDTH / 2}" y="${y - 4}"
          text-anchor="middle">${stars}</text>
    <text class="bar-label" x="${x + BAR_WIDTH / 2}"
          y="${BAR_AREA_HEIGHT + 20}" text-anchor="middle">
      ${escapeHtml(row.question)}</text>`;
}

function midpointLine(mu0: number): string {
  const y = BAR_AREA_HEIGHT - (mu0 / MAX_SCORE) * BAR_AREA_HEIGHT;
  return `
    <line class="midpoint" x1="24" y1="${y}" x2="${CHART_WIDTH - 12}" y2="${y}"
          stroke-dasharray="6 4"></line>
    <text class="midpoint-label" x="${CHART_WIDTH - 10}" y="${y + 4}">${mu0}</text>`;
}

export function renderDashboard(stats: RatingStats): string {
  const bars = stats.rows.map(bar).join("\n");
  return `
<div class="dashboard">
  <h2>Evaluation (one-sample t-test vs ${stats.mu0},
      ${escapeHtml(stats.alternative)}; n_total=${stats.n_total})</h2>
  <svg viewBox="0 0 ${CHART_WIDTH} ${CHART_HEIGHT}" width="${CHART_WIDTH}"
       height="${CHART_HEIGHT}" role="img" aria-label="per-question means">
    ${midpointLine(stats.mu0)}
    ${bars}
  </svg>
  <p class="legend">*, **, *** denote p &lt; 0.05, 0.01, 0.001</p>
</div>`;
}

/** The stars rendered per question, for parity checks against the API. */
export function dashboardStars(stats: RatingStats): Record<string, string> {
  const out: Record<string, string> = {};
  for (const row of stats.rows) {
    out[row.question] = row.sufficient ? (row.stars ?? "") : "";
  }
  return out;
}
