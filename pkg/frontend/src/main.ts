/** Browser bootstrap: tabs, fetch wiring and gesture handlers.
 *
 * All logic lives in the pure modules (state, curation, survey, dashboard,
 * views); this file only touches the DOM.
 */

import { ApiClient, ApiError } from "./api.js";
import { boardFromSubjectTerms, moveTermInteraction, UNMAPPED } from "./curation.js";
import type { PlacementBoard } from "./curation.js";
import { renderDashboard } from "./dashboard.js";
import { ViewState } from "./state.js";
import { DEFAULT_QUESTIONS, SCORE_LABELS, submitSurvey } from "./survey.js";
import type { SurveyDraft } from "./survey.js";
import type { TaxonomyNode } from "./types.js";
import { renderPaintingDetail, renderPaintingGrid, renderRetryBanner } from "./views.js";

const state = new ViewState();
const api = new ApiClient({
  onVersion: (version) => {
    if (state.observeVersion(version)) {
      showToast(`model updated to version ${version}; views refreshed`);
      void refreshPaintings();
    }
  },
});

let taxonomyNodes: TaxonomyNode[] = [];
let board: PlacementBoard = new Map();
let selectedTerm: string | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showToast(message: string): void {
  const toast = el<HTMLDivElement>("toast");
  toast.textContent = message;
  toast.classList.add("visible");
  window.setTimeout(() => toast.classList.remove("visible"), 4000);
}

// -- painting browsing ------------------------------------------------------

async function refreshPaintings(): Promise<void> {
  const grid = el<HTMLDivElement>("paintings");
  try {
    const page = await api.listPaintings(state.view, 0, 100);
    grid.innerHTML = renderPaintingGrid(page.items);
    if (state.currentPaintingId) {
      await showDetail(state.currentPaintingId);
    }
  } catch (error) {
    grid.innerHTML = renderRetryBanner(
      error instanceof Error ? error.message : "service unreachable");
  }
}

async function showDetail(id: string): Promise<void> {
  state.currentPaintingId = id;
  const detail = el<HTMLDivElement>("detail");
  try {
    const painting = await api.getPainting(id, state.view);
    detail.innerHTML = renderPaintingDetail(painting);
  } catch (error) {
    detail.innerHTML = renderRetryBanner(
      error instanceof Error ? error.message : "service unreachable");
  }
}

// -- curation ---------------------------------------------------------------

async function loadCuration(): Promise<void> {
  const [taxonomy, clusters, mappings] = await Promise.all([
    api.getTaxonomy(), api.getClusters(), api.getMappings(),
  ]);
  taxonomyNodes = taxonomy.nodes;
  const bySubject: Record<string, string[]> = {};
  const subjectOf = new Map<number, string | null>();
  for (const mapping of mappings.mappings) {
    subjectOf.set(mapping.cluster_id, mapping.subject_id);
  }
  for (const cluster of clusters.clusters) {
    for (const term of cluster.members) {
      const mapping = mappings.mappings.find((m) => m.cluster_id === cluster.id);
      const override = mapping?.term_overrides[term];
      const subject = override ?? subjectOf.get(cluster.id) ?? null;
      const key = subject ?? UNMAPPED;
      (bySubject[key] ??= []).push(term);
    }
  }
  board = boardFromSubjectTerms(bySubject);
  renderCurationBoard();
}

function renderCurationBoard(): void {
  const container = el<HTMLDivElement>("curation-board");
  const subjects = taxonomyNodes.filter((n) => n.layer === 3);
  const groups: string[] = [];
  const terms = (subject: string) =>
    [...board.entries()]
      .filter(([, s]) => s === subject)
      .map(([t]) => t)
      .sort()
      .map((t) =>
        `<span class="term-chip${t === selectedTerm ? " selected" : ""}"
               draggable="true" data-term="${t}">${t}</span>`)
      .join(" ");
  for (const subject of subjects) {
    groups.push(`
      <div class="subject-drop" data-subject="${subject.id}">
        <h4>${subject.label} <code>${subject.id}</code></h4>
        <div class="terms">${terms(subject.id)}</div>
      </div>`);
  }
  groups.push(`
    <div class="subject-drop unmapped" data-subject="${UNMAPPED}">
      <h4>unmapped</h4>
      <div class="terms">${terms(UNMAPPED)}</div>
    </div>`);
  container.innerHTML = groups.join("\n");
}

async function handleMove(term: string, subject: string): Promise<void> {
  const outcome = await moveTermInteraction(
    state, api, board, taxonomyNodes, term, subject, actorName());
  if (outcome.status === "moved") {
    showToast(`moved; audit entries: ${outcome.auditLength}`);
  } else if (outcome.status === "rejected") {
    showToast(`rejected: ${outcome.message}`);
  } else {
    showToast(outcome.reason);
  }
  renderCurationBoard();
}

function actorName(): string {
  return (el<HTMLInputElement>("actor").value || "anonymous").trim();
}

function wireCurationGestures(): void {
  const container = el<HTMLDivElement>("curation-board");
  container.addEventListener("dragstart", (event) => {
    const chip = (event.target as HTMLElement).closest<HTMLElement>(".term-chip");
    if (chip && event.dataTransfer) {
      event.dataTransfer.setData("text/term", chip.dataset.term ?? "");
    }
  });
  container.addEventListener("dragover", (event) => event.preventDefault());
  container.addEventListener("drop", (event) => {
    const zone = (event.target as HTMLElement).closest<HTMLElement>(".subject-drop");
    const term = event.dataTransfer?.getData("text/term");
    if (zone && term) {
      event.preventDefault();
      void handleMove(term, zone.dataset.subject ?? "");
    }
  });
  // click fallback: select a chip, then click a target zone's header
  container.addEventListener("click", (event) => {
    const chip = (event.target as HTMLElement).closest<HTMLElement>(".term-chip");
    if (chip) {
      selectedTerm = chip.dataset.term ?? null;
      renderCurationBoard();
      return;
    }
    const zone = (event.target as HTMLElement).closest<HTMLElement>(".subject-drop");
    if (zone && selectedTerm) {
      const term = selectedTerm;
      selectedTerm = null;
      void handleMove(term, zone.dataset.subject ?? "");
    }
  });
}

// -- survey -----------------------------------------------------------------

function renderSurvey(): void {
  const form = el<HTMLFormElement>("survey-form");
  const rows = DEFAULT_QUESTIONS.map((q) => {
    const radios = [1, 2, 3, 4, 5]
      .map(
        (score) => `
      <label class="score">
        <input type="radio" name="${q.id}" value="${score}">
        ${score}<small>${SCORE_LABELS[score]}</small>
      </label>`,
      )
      .join("");
    return `<fieldset><legend>${q.text}</legend>${radios}</fieldset>`;
  });
  form.querySelector(".questions")!.innerHTML = rows.join("\n");
}

async function handleSurveySubmit(event: Event): Promise<void> {
  event.preventDefault();
  const form = el<HTMLFormElement>("survey-form");
  const data = new FormData(form);
  const draft: SurveyDraft = {
    rater: String(data.get("rater") ?? ""),
    condition: state.condition,
    answers: {},
  };
  for (const question of DEFAULT_QUESTIONS) {
    const value = data.get(question.id);
    if (value !== null) {
      draft.answers[question.id] = Number(value);
    }
  }
  try {
    const result = await submitSurvey(api, draft);
    state.surveyProgress = { answered: draft.answers, submitted: true };
    showToast(`submitted ${result.submitted} answers; see the dashboard`);
    form.reset();
    await refreshDashboard();
    switchTab("dashboard");
  } catch (error) {
    showToast(error instanceof Error ? error.message : "submission failed");
  }
}

// -- dashboard ---------------------------------------------------------------

async function refreshDashboard(): Promise<void> {
  const container = el<HTMLDivElement>("dashboard");
  try {
    const stats = await api.getRatingStats();
    container.innerHTML = renderDashboard(stats);
  } catch (error) {
    container.innerHTML = renderRetryBanner(
      error instanceof Error ? error.message : "service unreachable");
  }
}

// -- tabs --------------------------------------------------------------------

function switchTab(name: string): void {
  for (const section of document.querySelectorAll<HTMLElement>("[data-tab]")) {
    section.hidden = section.dataset.tab !== name;
  }
  for (const button of document.querySelectorAll<HTMLElement>("[data-tab-button]")) {
    button.classList.toggle("active", button.dataset.tabButton === name);
  }
  if (name === "dashboard") void refreshDashboard();
  if (name === "curate") void loadCuration();
}

function bootstrap(): void {
  el<HTMLButtonElement>("condition-toggle").addEventListener("click", () => {
    const condition = state.toggleCondition();
    el<HTMLButtonElement>("condition-toggle").textContent =
      `condition: ${condition}`;
    void refreshPaintings();
  });
  el<HTMLDivElement>("paintings").addEventListener("click", (event) => {
    const card = (event.target as HTMLElement).closest<HTMLElement>(".painting-card");
    if (card?.dataset.id) void showDetail(card.dataset.id);
    const retry = (event.target as HTMLElement).closest("[data-action=retry]");
    if (retry) void refreshPaintings();
  });
  for (const button of document.querySelectorAll<HTMLElement>("[data-tab-button]")) {
    button.addEventListener("click", () =>
      switchTab(button.dataset.tabButton ?? "browse"));
  }
  el<HTMLFormElement>("survey-form").addEventListener("submit", (event) => {
    void handleSurveySubmit(event);
  });
  wireCurationGestures();
  renderSurvey();
  switchTab("browse");
  void refreshPaintings();
}

document.addEventListener("DOMContentLoaded", bootstrap);
