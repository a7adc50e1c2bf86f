/** The term-move interaction: optimistic placement with server rollback.
 *
 * A move is a single POST.  The term is placed under the target subject
 * immediately; if the server rejects the move the term snaps back to where
 * it came from and the error message is surfaced for the toast.  A pending
 * move blocks further gestures so a double-click can never fire twice.
 */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { ViewState } from "./state.js";
import { isLeafSubject } from "./state.js";
import type { TaxonomyNode } from "./types.js";

export const UNMAPPED = "UNMAPPED";

/** term -> subject id (or UNMAPPED); the browser-side placement board. */
export type PlacementBoard = Map<string, string>;

export function boardFromSubjectTerms(
  subjectTerms: Record<string, string[]>,
): PlacementBoard {
  const board: PlacementBoard = new Map();
  for (const [subject, terms] of Object.entries(subjectTerms)) {
    for (const term of terms) {
      board.set(term, subject);
    }
  }
  return board;
}

export type MoveOutcome =
  | { status: "moved"; version: number; auditLength: number }
  | { status: "rejected"; message: string; code: string }
  | { status: "blocked"; reason: string };

export async function moveTermInteraction(
  state: ViewState,
  api: ApiClient,
  board: PlacementBoard,
  taxonomyNodes: TaxonomyNode[],
  term: string,
  toSubject: string,
  actor: string,
): Promise<MoveOutcome> {
  if (!board.has(term)) {
    return { status: "blocked", reason: `unknown term ${term}` };
  }
  if (!isLeafSubject(taxonomyNodes, toSubject)) {
    // Client-side guard: non-leaf targets never reach the server.
    return { status: "blocked", reason: `${toSubject} is not a subject` };
  }
  if (!state.beginAction(term, toSubject)) {
    return { status: "blocked", reason: "another move is in flight" };
  }
  const origin = board.get(term)!;
  board.set(term, toSubject); // optimistic placement
  try {
    const response = await api.moveTerm(term, toSubject, actor);
    state.observeVersion(response.version);
    return {
      status: "moved",
      version: response.version,
      auditLength: response.audit_length,
    };
  } catch (error) {
    board.set(term, origin); // snap back
    if (error instanceof ApiError) {
      return { status: "rejected", message: error.message, code: error.code };
    }
    throw error;
  } finally {
    state.settleAction();
  }
}
