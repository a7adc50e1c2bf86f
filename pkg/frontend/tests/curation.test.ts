import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  boardFromSubjectTerms, moveTermInteraction, UNMAPPED,
} from "../src/curation.js";
import { ViewState } from "../src/state.js";
import { createMockServer, TAXONOMY_FIXTURE } from "./mock_server.js";

function setup(placements?: Record<string, string>) {
  const server = createMockServer(placements);
  const state = new ViewState();
  const api = new ApiClient({
    fetchImpl: server.fetch,
    onVersion: (v) => state.observeVersion(v),
  });
  const board = new Map(server.placements);
  return { server, state, api, board };
}

describe("moveTermInteraction", () => {
  it("issues exactly one POST and increments the audit count", async () => {
    const { server, state, api, board } = setup({ 青绿: "pe.form.color" });
    const outcome = await moveTermInteraction(
      state, api, board, TAXONOMY_FIXTURE, "青绿", "pe.form.line", "expert1");

    expect(outcome.status).toBe("moved");
    if (outcome.status === "moved") {
      expect(outcome.auditLength).toBe(1);
      expect(outcome.version).toBe(2);
    }
    const posts = server.requests.filter(
      (r) => r.method === "POST" && r.path === "/api/curation/move");
    expect(posts).toHaveLength(1);
    expect(posts[0]!.body).toEqual({
      term: "青绿", to_subject: "pe.form.line", actor: "expert1",
    });
    expect(board.get("青绿")).toBe("pe.form.line");
    expect(state.pendingAction).toBeNull();
    expect(state.modelVersion).toBe(2);
  });

  it("restores the original placement on a 422", async () => {
    const { server, state, api, board } = setup({ 青绿: "pe.form.color" });
    server.failNextMoveWith = {
      code: "invalid_move",
      message: "move target rejected by server",
      http_status: 422,
    };
    const outcome = await moveTermInteraction(
      state, api, board, TAXONOMY_FIXTURE, "青绿", "pe.form.line", "expert1");

    expect(outcome.status).toBe("rejected");
    if (outcome.status === "rejected") {
      expect(outcome.code).toBe("invalid_move");
      expect(outcome.message).toContain("rejected by server");
    }
    expect(board.get("青绿")).toBe("pe.form.color"); // snapped back
    expect(server.auditLength).toBe(0);
    expect(state.pendingAction).toBeNull();
  });

  it("rejects non-leaf targets client-side without any request", async () => {
    const { server, state, api, board } = setup({ 青绿: "pe.form.color" });
    const outcome = await moveTermInteraction(
      state, api, board, TAXONOMY_FIXTURE, "青绿", "pe.form", "expert1");

    expect(outcome.status).toBe("blocked");
    expect(server.requests).toHaveLength(0);
    expect(board.get("青绿")).toBe("pe.form.color");
  });

  it("a double-fired gesture produces a single request", async () => {
    const { server, state, api, board } = setup({ 青绿: "pe.form.color" });
    const [first, second] = await Promise.all([
      moveTermInteraction(state, api, board, TAXONOMY_FIXTURE,
                          "青绿", "pe.form.line", "expert1"),
      moveTermInteraction(state, api, board, TAXONOMY_FIXTURE,
                          "青绿", "pe.form.line", "expert1"),
    ]);
    const statuses = [first.status, second.status].sort();
    expect(statuses).toEqual(["blocked", "moved"]);
    const posts = server.requests.filter((r) => r.path === "/api/curation/move");
    expect(posts).toHaveLength(1);
    expect(server.auditLength).toBe(1);
  });

  it("supports moving into the unmapped tray only via a real subject", async () => {
    const { server, state, api, board } = setup({ 青绿: "pe.form.color" });
    const outcome = await moveTermInteraction(
      state, api, board, TAXONOMY_FIXTURE, "青绿", UNMAPPED, "expert1");
    expect(outcome.status).toBe("blocked"); // UNMAPPED is not a leaf target
    expect(server.requests).toHaveLength(0);
  });

  it("builds a placement board from per-subject term lists", () => {
    const board = boardFromSubjectTerms({
      "pe.form.color": ["设色", "青绿"],
      UNMAPPED: ["孤词"],
    });
    expect(board.get("设色")).toBe("pe.form.color");
    expect(board.get("孤词")).toBe(UNMAPPED);
    expect(board.size).toBe(3);
  });
});
