/** The four-question Likert survey flow.
 *
 * Question texts are config, not code: the wording below is a placeholder
 * set in the USE-questionnaire style, editable per deployment.  Scores are
 * radio buttons 1..5, so out-of-range values cannot be produced by the UI;
 * submission is blocked until every question is answered and produces
 * exactly one POST per question.
 */

import type { ApiClient } from "./api.js";
import type { Condition } from "./types.js";

export interface SurveyQuestion {
  id: string;
  text: string;
}

export const DEFAULT_QUESTIONS: SurveyQuestion[] = [
  { id: "diversity", text: "The system reveals diverse subjects of each painting." },
  { id: "comprehension", text: "The system helps me comprehend the painting's content." },
  { id: "effectiveness", text: "The system is effective for my research tasks." },
  { id: "satisfaction", text: "Overall, I am satisfied with the system." },
];

export const SCORE_LABELS: Record<number, string> = {
  1: "strongly disagree",
  2: "disagree",
  3: "same as the other system",
  4: "agree",
  5: "strongly agree",
};

export interface SurveyDraft {
  rater: string;
  condition: Condition;
  answers: Record<string, number>;
}

export interface SurveyValidation {
  complete: boolean;
  missing: string[];
}

export function validateDraft(
  draft: SurveyDraft,
  questions: SurveyQuestion[] = DEFAULT_QUESTIONS,
): SurveyValidation {
  const missing = questions
    .filter((q) => !(q.id in draft.answers))
    .map((q) => q.id);
  if (!draft.rater.trim()) {
    missing.unshift("rater");
  }
  return { complete: missing.length === 0, missing };
}

export interface SurveySubmission {
  submitted: number;
  totalOnServer: number;
}

/** POST one row per question; throws before any request if incomplete. */
export async function submitSurvey(
  api: ApiClient,
  draft: SurveyDraft,
  questions: SurveyQuestion[] = DEFAULT_QUESTIONS,
): Promise<SurveySubmission> {
  const validation = validateDraft(draft, questions);
  if (!validation.complete) {
    throw new Error(`unanswered: ${validation.missing.join(", ")}`);
  }
  let total = 0;
  for (const question of questions) {
    const score = draft.answers[question.id]!;
    const response = await api.submitRating(
      draft.rater, question.id, draft.condition, score);
    total = response.count;
  }
  return { submitted: questions.length, totalOnServer: total };
}
