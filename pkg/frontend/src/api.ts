/** Typed client for the svlink REST service.
 *
 * Field names mirror the wire format (snake_case) so responses can be
 * rendered without a mapping layer; the UI never recomputes scores,
 * counts, or orderings on top of what the service returns.
 */

export type SortMode = "relevance" | "recency" | "variable_count";

export interface DisplaySummary {
  kind: string;
  text: string;
}

export interface SearchHit {
  publication_id: string;
  score: number;
  snippet: string;
  variable_count: number;
  year: number;
  title: string;
  summary: DisplaySummary | null;
}

export interface SearchResponse {
  total: number;
  hits: SearchHit[];
}

export interface SentenceSpan {
  index: number;
  start: number;
  end: number;
  text: string;
}

export interface LinkRecord {
  publication_id: string;
  sentence_index: number;
  variable_id: string;
  similarity: number;
  classifier_score: number;
  method: string;
}

export interface SummaryRecord {
  kind: string;
  language: string;
  text: string;
  source_sentence_index: number | null;
}

export interface PublicationDetail {
  publication_id: string;
  title: string;
  abstract: string;
  authors: string[];
  year: number;
  language: string;
  dataset_ids: string[];
  content_hash: string;
  variable_count: number;
  sentences: SentenceSpan[];
  summaries: Record<string, SummaryRecord>;
  links: LinkRecord[];
}

export interface VariableEntry {
  variable_id: string;
  label: string;
  question_text: string;
  answer_categories: string[];
  sentence_indexes: number[];
  best_similarity: number;
  overlap_terms: string[];
}

export interface HealthResponse {
  status: string;
  documents: number;
}

export interface SearchRequest {
  query?: string;
  lang?: string | null;
  yearMin?: number | null;
  yearMax?: number | null;
  sort?: SortMode;
  page?: number;
  pageSize?: number;
}

/** Non-2xx response, carrying the status and the service's detail text. */
export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the status line
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  /** Relative /search URL for the given request; defaults are omitted. */
  searchPath(request: SearchRequest): string {
    const params = new URLSearchParams();
    if (request.query) params.set("q", request.query);
    if (request.lang) params.set("lang", request.lang);
    if (request.yearMin != null) params.set("year_min", String(request.yearMin));
    if (request.yearMax != null) params.set("year_max", String(request.yearMax));
    if (request.sort && request.sort !== "relevance") params.set("sort", request.sort);
    if (request.page) params.set("page", String(request.page));
    if (request.pageSize != null) params.set("page_size", String(request.pageSize));
    const qs = params.toString();
    return qs ? `/search?${qs}` : "/search";
  }

  search(request: SearchRequest): Promise<SearchResponse> {
    return this.get<SearchResponse>(this.searchPath(request));
  }

  publication(id: string): Promise<PublicationDetail> {
    return this.get<PublicationDetail>(`/publications/${encodeURIComponent(id)}`);
  }

  publicationVariables(id: string): Promise<VariableEntry[]> {
    return this.get<VariableEntry[]>(`/publications/${encodeURIComponent(id)}/variables`);
  }

  health(): Promise<HealthResponse> {
    return this.get<HealthResponse>("/health");
  }

  /** GET with identical concurrent requests deduplicated while in flight. */
  private get<T>(path: string): Promise<T> {
    const url = this.baseUrl + path;
    const pending = this.inflight.get(url);
    if (pending) return pending as Promise<T>;
    const promise = this.fetchOnce<T>(url).finally(() => {
      this.inflight.delete(url);
    });
    this.inflight.set(url, promise);
    return promise;
  }

  private async fetchOnce<T>(url: string): Promise<T> {
    const response = await this.fetchFn(url, { headers: { Accept: "application/json" } });
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as T;
  }
}
