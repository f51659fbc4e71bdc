/** URL-driven view state.
 *
 * Everything a view needs is round-tripped through the query string, so
 * any rendered view can be reproduced from a deep link. Unknown or
 * malformed parameters fall back to defaults instead of failing.
 */
import type { SortMode } from "./api.js";

export interface ViewState {
  query: string;
  sort: SortMode;
  lang: string | null;
  yearMin: number | null;
  yearMax: number | null;
  page: number;
  publicationId: string | null;
  variableId: string | null;
}

export const DEFAULT_STATE: ViewState = {
  query: "",
  sort: "relevance",
  lang: null,
  yearMin: null,
  yearMax: null,
  page: 0,
  publicationId: null,
  variableId: null,
};

const SORT_MODES: SortMode[] = ["relevance", "recency", "variable_count"];

function parseIntOr(value: string | null, fallback: number): number {
  if (value == null) return fallback;
  const parsed = Number.parseInt(value, 10);
  return Number.isFinite(parsed) ? parsed : fallback;
}

function parseOptionalInt(value: string | null): number | null {
  if (value == null || value === "") return null;
  const parsed = Number.parseInt(value, 10);
  return Number.isFinite(parsed) ? parsed : null;
}

export function stateFromParams(params: URLSearchParams): ViewState {
  const sortRaw = params.get("sort");
  const sort = SORT_MODES.includes(sortRaw as SortMode) ? (sortRaw as SortMode) : "relevance";
  const page = Math.max(0, parseIntOr(params.get("page"), 0));
  return {
    query: params.get("q") ?? "",
    sort,
    lang: params.get("lang") || null,
    yearMin: parseOptionalInt(params.get("year_min")),
    yearMax: parseOptionalInt(params.get("year_max")),
    page,
    publicationId: params.get("pub") || null,
    variableId: params.get("var") || null,
  };
}

/** Serialize only the parts that differ from the defaults. */
export function stateToParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  if (state.sort !== "relevance") params.set("sort", state.sort);
  if (state.lang) params.set("lang", state.lang);
  if (state.yearMin != null) params.set("year_min", String(state.yearMin));
  if (state.yearMax != null) params.set("year_max", String(state.yearMax));
  if (state.page > 0) params.set("page", String(state.page));
  if (state.publicationId) params.set("pub", state.publicationId);
  if (state.variableId) params.set("var", state.variableId);
  return params;
}

/** Monotonic tickets for discarding responses superseded by a newer request. */
export class SequenceGate {
  private latest = 0;

  next(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.latest;
  }
}
