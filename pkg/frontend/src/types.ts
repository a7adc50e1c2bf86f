/** Wire types mirroring the service's JSON payloads. */

export type Condition = "SDM" | "BASELINE";
export type View = "sdm" | "baseline";

export interface PaintingBaseline {
  id: string;
  title: string;
  image_ref: string;
  description: string;
  keywords: string[];
  era: string | null;
}

export interface SubjectGroup {
  subject_id: string;
  label: string;
  path: string[];
  element_kind: string;
  terms: string[];
}

export interface PaintingSdm extends PaintingBaseline {
  subjects: SubjectGroup[];
  unmapped: string[];
}

export type Painting = PaintingBaseline | PaintingSdm;

export interface PaintingPage {
  total: number;
  offset: number;
  limit: number;
  view: View;
  items: Painting[];
}

export interface TaxonomyNode {
  id: string;
  label: string;
  layer: number;
  parent: string | null;
  element_kind: string;
  seed_terms: string[];
}

export interface TaxonomyResponse {
  version: number;
  nodes: TaxonomyNode[];
}

export interface ClusterView {
  id: number;
  members: string[];
}

export interface MappingView {
  cluster_id: number;
  subject_id: string | null;
  score: number;
  provenance: "AUTO" | "MANUAL";
  term_overrides: Record<string, string>;
}

export interface MoveResponse {
  ok: boolean;
  term: string;
  subject_id: string;
  version: number;
  audit_length: number;
}

export interface RatingRow {
  question: string;
  n: number;
  sufficient: boolean;
  mean: number | null;
  sd: number | null;
  t: number | null;
  df: number | null;
  p: number | null;
  stars: string | null;
}

export interface RatingStats {
  mu0: number;
  alternative: string;
  n_total: number;
  rows: RatingRow[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  http_status: number;
}

export function isSdmPainting(p: Painting): p is PaintingSdm {
  return (p as PaintingSdm).subjects !== undefined;
}

export function viewForCondition(condition: Condition): View {
  return condition === "SDM" ? "sdm" : "baseline";
}
