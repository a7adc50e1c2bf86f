/** Typed client over the service API.
 *
 * All numbers and stars shown anywhere in the UI come from these responses;
 * the client never derives statistics locally.  Each response's
 * X-SDM-Version header is forwarded to an optional listener so stale views
 * can prompt a refetch.
 */

import type {
  ApiErrorBody, Condition, MoveResponse, PaintingPage, Painting,
  RatingStats, TaxonomyResponse, ClusterView, MappingView, View,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly httpStatus: number;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.httpStatus = body.http_status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
  onVersion?: (version: number) => void;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly onVersion?: (version: number) => void;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = options.baseUrl ?? "";
    this.fetchImpl = options.fetchImpl ?? ((input, init) => fetch(input, init));
    this.onVersion = options.onVersion;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const version = response.headers.get("X-SDM-Version");
    if (version !== null && this.onVersion) {
      this.onVersion(Number(version));
    }
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = {
          code: "http_error",
          message: `request failed with status ${response.status}`,
          http_status: response.status,
        };
      }
      throw new ApiError(body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listPaintings(view: View, offset = 0, limit = 20): Promise<PaintingPage> {
    const query = new URLSearchParams({
      view, offset: String(offset), limit: String(limit),
    });
    return this.request<PaintingPage>(`/api/paintings?${query}`);
  }

  getPainting(id: string, view: View): Promise<Painting> {
    return this.request<Painting>(
      `/api/paintings/${encodeURIComponent(id)}?view=${view}`);
  }

  getTaxonomy(): Promise<TaxonomyResponse> {
    return this.request<TaxonomyResponse>("/api/taxonomy");
  }

  getClusters(): Promise<{ clusters: ClusterView[] }> {
    return this.request<{ clusters: ClusterView[] }>("/api/clusters");
  }

  getMappings(): Promise<{ mappings: MappingView[] }> {
    return this.request<{ mappings: MappingView[] }>("/api/mappings");
  }

  getAudit(): Promise<{ length: number }> {
    return this.request<{ length: number }>("/api/audit");
  }

  moveTerm(term: string, toSubject: string, actor: string): Promise<MoveResponse> {
    return this.post<MoveResponse>("/api/curation/move", {
      term, to_subject: toSubject, actor,
    });
  }

  submitRating(rater: string, question: string, condition: Condition,
               score: number): Promise<{ ok: boolean; count: number }> {
    return this.post<{ ok: boolean; count: number }>("/api/ratings", {
      rater, question, condition, score,
    });
  }

  getRatingStats(condition?: Condition): Promise<RatingStats> {
    const suffix = condition ? `?condition=${condition}` : "";
    return this.request<RatingStats>(`/api/stats/ratings${suffix}`);
  }
}
