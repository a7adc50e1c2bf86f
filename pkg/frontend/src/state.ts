/** Session view state.
 *
 * The condition toggle is the single source of truth for which painting
 * view gets fetched, and a pending curation action blocks further moves
 * until the server acknowledges (or rejects) the one in flight.
 */

import type { Condition, TaxonomyNode } from "./types.js";
import { viewForCondition } from "./types.js";

export interface PendingMove {
  term: string;
  toSubject: string;
}

export interface SurveyProgress {
  answered: Record<string, number>;
  submitted: boolean;
}

export class ViewState {
  currentPaintingId: string | null = null;
  condition: Condition = "SDM";
  selectedNode: string | null = null;
  pendingAction: PendingMove | null = null;
  surveyProgress: SurveyProgress = { answered: {}, submitted: false };
  modelVersion = 0;

  /** The query view that must accompany every painting fetch. */
  get view() {
    return viewForCondition(this.condition);
  }

  toggleCondition(): Condition {
    this.condition = this.condition === "SDM" ? "BASELINE" : "SDM";
    return this.condition;
  }

  beginAction(term: string, toSubject: string): boolean {
    if (this.pendingAction !== null) {
      return false;
    }
    this.pendingAction = { term, toSubject };
    return true;
  }

  /** Cleared only once the server answered, success or error. */
  settleAction(): void {
    this.pendingAction = null;
  }

  observeVersion(version: number): boolean {
    const stale = this.modelVersion !== 0 && version > this.modelVersion;
    if (version > this.modelVersion) {
      this.modelVersion = version;
    }
    return stale;
  }
}

/** Layer-3 check used to reject non-leaf drop targets before any request. */
export function isLeafSubject(nodes: TaxonomyNode[], nodeId: string): boolean {
  const node = nodes.find((n) => n.id === nodeId);
  return node !== undefined && node.layer === 3;
}
