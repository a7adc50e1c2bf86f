/** Cross-stack checks against a live service.
 *
 * Skipped unless SDM_SERVICE_URL points at a running `sdmkit serve`
 * instance (use a disposable data directory; moves and ratings persist).
 * The same interaction code paths as the browser run here, over real HTTP.
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { moveTermInteraction } from "../src/curation.js";
import { dashboardStars } from "../src/dashboard.js";
import { ViewState } from "../src/state.js";
import { submitSurvey } from "../src/survey.js";

const BASE = process.env["SDM_SERVICE_URL"];

describe.skipIf(!BASE)("against a live service", () => {
  function countingClient(state: ViewState) {
    let posts = 0;
    const api = new ApiClient({
      baseUrl: BASE,
      fetchImpl: (input, init) => {
        if ((init?.method ?? "GET").toUpperCase() === "POST") posts += 1;
        return fetch(input, init);
      },
      onVersion: (v) => state.observeVersion(v),
    });
    return { api, posts: () => posts };
  }

  it("drag-to-subject: one POST, audit +1, 422 restores placement", async () => {
    const state = new ViewState();
    const { api, posts } = countingClient(state);

    const taxonomy = await api.getTaxonomy();
    const clusters = await api.getClusters();
    const term = clusters.clusters[0]!.members[0]!;
    const leaf = taxonomy.nodes.find((n) => n.layer === 3)!;
    const branch = taxonomy.nodes.find((n) => n.layer === 2)!;
    const auditBefore = (await api.getAudit()).length;

    const board = new Map([[term, "UNMAPPED"]]);
    const moved = await moveTermInteraction(
      state, api, board, taxonomy.nodes, term, leaf.id, "integration");
    expect(moved.status).toBe("moved");
    expect(posts()).toBe(1);
    expect((await api.getAudit()).length).toBe(auditBefore + 1);
    expect(board.get(term)).toBe(leaf.id);

    // server-rejected move (layer-2 target forced past the client guard)
    const hostileNodes = taxonomy.nodes.map((n) =>
      n.id === branch.id ? { ...n, layer: 3 } : n);
    const rejected = await moveTermInteraction(
      state, api, board, hostileNodes, term, branch.id, "integration");
    expect(rejected.status).toBe("rejected");
    expect(board.get(term)).toBe(leaf.id); // snapped back to the last good spot
    expect((await api.getAudit()).length).toBe(auditBefore + 1);
  });

  it("survey flow persists four rows and the dashboard mirrors the stats", async () => {
    const state = new ViewState();
    const { api } = countingClient(state);
    const rater = `it-${Date.now()}`;

    const before = await api.getRatingStats();
    const result = await submitSurvey(api, {
      rater,
      condition: "SDM",
      answers: {
        diversity: 5, comprehension: 4, effectiveness: 4, satisfaction: 5,
      },
    });
    expect(result.submitted).toBe(4);
    expect(result.totalOnServer).toBe(before.n_total + 4);

    const after = await api.getRatingStats();
    expect(after.n_total).toBe(before.n_total + 4);
    const stars = dashboardStars(after);
    for (const row of after.rows) {
      expect(stars[row.question]).toBe(row.sufficient ? (row.stars ?? "") : "");
    }
  });
});
