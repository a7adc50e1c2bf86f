/** Stateful in-memory stand-in for the curation service.
 *
 * Implements the same wire contract the Python service exposes (the real
 * contract is covered by the backend's own test suite): audited moves with
 * 422 on non-leaf targets, appended ratings, canned rating statistics.
 * Tests use it to count requests and to script failures.
 */

import type {
  ApiErrorBody, MoveResponse, RatingStats, TaxonomyNode,
} from "../src/types.js";

export const TAXONOMY_FIXTURE: TaxonomyNode[] = [
  { id: "pe", label: "PE", layer: 1, parent: null, element_kind: "PE", seed_terms: [] },
  { id: "ie", label: "IE", layer: 1, parent: null, element_kind: "IE", seed_terms: [] },
  { id: "pe.form", label: "form", layer: 2, parent: "pe", element_kind: "PE", seed_terms: [] },
  { id: "pe.form.color", label: "color", layer: 3, parent: "pe.form", element_kind: "PE", seed_terms: [] },
  { id: "pe.form.line", label: "line", layer: 3, parent: "pe.form", element_kind: "PE", seed_terms: [] },
  { id: "ie.theme", label: "themes", layer: 2, parent: "ie", element_kind: "IE", seed_terms: [] },
  { id: "ie.theme.reclusion", label: "reclusion", layer: 3, parent: "ie.theme", element_kind: "IE", seed_terms: [] },
];

export interface RatingRecord {
  rater: string;
  question: string;
  condition: string;
  score: number;
}

export interface MockServer {
  fetch: (input: string, init?: RequestInit) => Promise<Response>;
  requests: { method: string; path: string; body?: unknown }[];
  version: number;
  auditLength: number;
  placements: Map<string, string>;
  ratings: RatingRecord[];
  ratingStats: RatingStats;
  failNextMoveWith?: ApiErrorBody;
}

function json(status: number, body: unknown, version: number): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: {
      "Content-Type": "application/json",
      "X-SDM-Version": String(version),
    },
  });
}

export const EMPTY_STATS: RatingStats = {
  mu0: 3,
  alternative: "greater",
  n_total: 0,
  rows: ["diversity", "comprehension", "effectiveness", "satisfaction"].map(
    (question) => ({
      question, n: 0, sufficient: false, mean: null, sd: null,
      t: null, df: null, p: null, stars: null,
    }),
  ),
};

export function createMockServer(
  placements: Record<string, string> = { 青绿: "pe.form.color" },
): MockServer {
  const server: MockServer = {
    requests: [],
    version: 1,
    auditLength: 0,
    placements: new Map(Object.entries(placements)),
    ratings: [],
    ratingStats: EMPTY_STATS,
    fetch: async () => {
      throw new Error("not initialized");
    },
  };

  server.fetch = async (input: string, init?: RequestInit) => {
    const method = (init?.method ?? "GET").toUpperCase();
    const url = new URL(input, "http://mock");
    const path = url.pathname;
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    server.requests.push({ method, path, body });

    if (method === "POST" && path === "/api/curation/move") {
      if (server.failNextMoveWith) {
        const error = server.failNextMoveWith;
        server.failNextMoveWith = undefined;
        return json(error.http_status, error, server.version);
      }
      const { term, to_subject } = body as { term: string; to_subject: string };
      const target = TAXONOMY_FIXTURE.find((n) => n.id === to_subject);
      if (!server.placements.has(term)) {
        return json(422, {
          code: "invalid_move",
          message: `unknown term '${term}'`,
          http_status: 422,
        }, server.version);
      }
      if (!target || target.layer !== 3) {
        return json(422, {
          code: "invalid_move",
          message: `move target '${to_subject}' is a layer-${target?.layer ?? "?"} node, not a subject`,
          http_status: 422,
        }, server.version);
      }
      server.placements.set(term, to_subject);
      server.version += 1;
      server.auditLength += 1;
      const response: MoveResponse = {
        ok: true, term, subject_id: to_subject,
        version: server.version, audit_length: server.auditLength,
      };
      return json(200, response, server.version);
    }

    if (method === "POST" && path === "/api/ratings") {
      const record = body as RatingRecord;
      if (record.score < 1 || record.score > 5) {
        return json(422, {
          code: "invalid_rating",
          message: `score must be an integer in 1..5, got ${record.score}`,
          http_status: 422,
        }, server.version);
      }
      server.ratings.push(record);
      return json(201, { ok: true, count: server.ratings.length }, server.version);
    }

    if (method === "GET" && path === "/api/stats/ratings") {
      return json(200, server.ratingStats, server.version);
    }

    if (method === "GET" && path === "/api/taxonomy") {
      return json(200, { version: server.version, nodes: TAXONOMY_FIXTURE },
                  server.version);
    }

    if (method === "GET" && path === "/api/audit") {
      return json(200, { length: server.auditLength, entries: [] },
                  server.version);
    }

    return json(404, {
      code: "not_found", message: `no route ${method} ${path}`, http_status: 404,
    }, server.version);
  };

  return server;
}
