import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  DEFAULT_QUESTIONS, submitSurvey, validateDraft,
} from "../src/survey.js";
import type { SurveyDraft } from "../src/survey.js";
import { createMockServer } from "./mock_server.js";

function completeDraft(): SurveyDraft {
  return {
    rater: "r1",
    condition: "SDM",
    answers: {
      diversity: 4, comprehension: 5, effectiveness: 4, satisfaction: 4,
    },
  };
}

describe("survey flow", () => {
  it("covers the four questionnaire dimensions", () => {
    expect(DEFAULT_QUESTIONS.map((q) => q.id)).toEqual([
      "diversity", "comprehension", "effectiveness", "satisfaction",
    ]);
  });

  it("submitting all four answers produces four POSTed rows", async () => {
    const server = createMockServer();
    const api = new ApiClient({ fetchImpl: server.fetch });
    const result = await submitSurvey(api, completeDraft());

    expect(result.submitted).toBe(4);
    expect(result.totalOnServer).toBe(4);
    const posts = server.requests.filter((r) => r.path === "/api/ratings");
    expect(posts).toHaveLength(4);
    expect(server.ratings.map((r) => r.question)).toEqual([
      "diversity", "comprehension", "effectiveness", "satisfaction",
    ]);
    expect(server.ratings.every((r) => r.condition === "SDM")).toBe(true);
  });

  it("an unanswered question blocks submission before any request", async () => {
    const server = createMockServer();
    const api = new ApiClient({ fetchImpl: server.fetch });
    const draft = completeDraft();
    delete draft.answers["effectiveness"];

    await expect(submitSurvey(api, draft)).rejects.toThrow("effectiveness");
    expect(server.requests).toHaveLength(0);
  });

  it("a missing rater id blocks submission", () => {
    const draft = completeDraft();
    draft.rater = "   ";
    const validation = validateDraft(draft);
    expect(validation.complete).toBe(false);
    expect(validation.missing).toContain("rater");
  });

  it("validateDraft names every missing question", () => {
    const validation = validateDraft({
      rater: "r1", condition: "BASELINE", answers: { diversity: 3 },
    });
    expect(validation.complete).toBe(false);
    expect(validation.missing).toEqual([
      "comprehension", "effectiveness", "satisfaction",
    ]);
  });
});
