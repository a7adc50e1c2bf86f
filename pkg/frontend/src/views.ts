/** Painting browsing: grid cards and the detail pane.
 *
 * The SDM view shows the painting's effective subjects with their terms
 * plus an "unmapped" tray; the baseline view shows only the museum fields.
 * Terms carry data attributes so the curation layer can wire drag/select
 * gestures without re-rendering.
 */

import type { Painting, PaintingSdm, SubjectGroup } from "./types.js";
import { isSdmPainting } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function museumFields(p: Painting): string {
  const keywords = p.keywords.map(escapeHtml).join("、");
  return `
    <h3 class="painting-title">${escapeHtml(p.title)}</h3>
    <p class="painting-era">${p.era ? escapeHtml(p.era) : "era unknown"}</p>
    <p class="painting-description">${escapeHtml(p.description)}</p>
    <p class="painting-keywords">keywords: ${keywords}</p>`;
}

function termChip(term: string): string {
  return `<span class="term-chip" draggable="true" data-term="${escapeHtml(term)}">
    ${escapeHtml(term)}</span>`;
}

function subjectGroup(group: SubjectGroup): string {
  const path = group.path.map(escapeHtml).join(" / ");
  const chips = group.terms.map(termChip).join(" ");
  return `
    <div class="subject-group" data-subject="${escapeHtml(group.subject_id)}">
      <h4>${path} <span class="kind">[${escapeHtml(group.element_kind)}]</span></h4>
      <div class="terms">${chips}</div>
    </div>`;
}

function sdmPanel(p: PaintingSdm): string {
  const groups = p.subjects.map(subjectGroup).join("\n");
  const tray = p.unmapped.length
    ? `<div class="unmapped-tray" data-subject="UNMAPPED">
         <h4>unmapped</h4>
         <div class="terms">${p.unmapped.map(termChip).join(" ")}</div>
       </div>`
    : "";
  return `<div class="sdm-panel">${groups}${tray}</div>`;
}

export function renderPaintingDetail(p: Painting): string {
  const body = museumFields(p);
  const panel = isSdmPainting(p) ? sdmPanel(p) : "";
  return `
<article class="painting-detail" data-id="${escapeHtml(p.id)}">
  ${body}
  ${panel}
</article>`;
}

export function renderPaintingGrid(paintings: Painting[]): string {
  if (!paintings.length) {
    return `<div class="empty-state">No paintings available.
      Run the pipeline and restart the service.</div>`;
  }
  const cards = paintings
    .map(
      (p) => `
    <button class="painting-card" data-id="${escapeHtml(p.id)}">
      <span class="card-title">${escapeHtml(p.title)}</span>
      <span class="card-era">${p.era ? escapeHtml(p.era) : ""}</span>
    </button>`,
    )
    .join("\n");
  return `<div class="painting-grid">${cards}</div>`;
}

export function renderRetryBanner(message: string): string {
  return `
<div class="retry-banner" role="alert">
  <span>${escapeHtml(message)}</span>
  <button class="retry-button" data-action="retry">retry</button>
</div>`;
}
