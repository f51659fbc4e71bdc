/** Single-page controller: search view, document view, variable panel.
 *
 * The UI is a pure renderer over REST responses — hit order, badge
 * values, highlight positions, and overlap emphasis all come from the
 * service payloads and are never recomputed client-side. View state
 * lives in the URL; navigation is pushState + popstate.
 */
import {
  ApiClient,
  ApiError,
  PublicationDetail,
  SearchHit,
  VariableEntry,
} from "./api.js";
import {
  DEFAULT_STATE,
  SequenceGate,
  stateFromParams,
  stateToParams,
  ViewState,
} from "./state.js";
import { emphasizeTerms, escapeHtml, snippetToHtml, summaryKindLabel } from "./markup.js";

export interface AppOptions {
  root: HTMLElement;
  client: ApiClient;
  window?: Window;
}

const SUMMARY_ORDER = ["abstractive", "extractive_fallback", "extractive"];

export class App {
  private readonly root: HTMLElement;
  private readonly client: ApiClient;
  private readonly win: Window;
  private state: ViewState = { ...DEFAULT_STATE };
  private readonly searchGate = new SequenceGate();
  private readonly documentGate = new SequenceGate();
  private detail: PublicationDetail | null = null;
  private variables: VariableEntry[] = [];

  constructor(options: AppOptions) {
    this.root = options.root;
    this.client = options.client;
    this.win = options.window ?? window;
  }

  /** Render the shell, restore state from the URL, and load the views. */
  async start(): Promise<void> {
    this.renderShell();
    this.state = stateFromParams(new URLSearchParams(this.win.location.search));
    this.fillForm();
    this.win.addEventListener("popstate", () => {
      this.state = stateFromParams(new URLSearchParams(this.win.location.search));
      this.fillForm();
      void this.refresh();
    });
    await this.refresh();
  }

  currentState(): ViewState {
    return { ...this.state };
  }

  // --- shell -----------------------------------------------------------

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <h1>Survey variable links</h1>
        <form id="search-form">
          <input type="search" name="q" placeholder="Search publications" aria-label="query">
          <select name="sort" aria-label="sort mode">
            <option value="relevance">Relevance</option>
            <option value="recency">Recency</option>
            <option value="variable_count">Variable count</option>
          </select>
          <select name="lang" aria-label="language">
            <option value="">Any language</option>
            <option value="en">English</option>
            <option value="de">German</option>
          </select>
          <input type="number" name="year_min" placeholder="From year" aria-label="year from">
          <input type="number" name="year_max" placeholder="To year" aria-label="year to">
          <button type="submit">Search</button>
        </form>
      </header>
      <main>
        <section id="results" aria-label="search results"></section>
        <section id="document" aria-label="publication detail"></section>
        <aside id="variables" aria-label="variable panel"></aside>
      </main>
    `;
    const form = this.root.querySelector<HTMLFormElement>("#search-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.readForm(form);
      this.state.page = 0;
      this.syncUrl(true);
      void this.runSearch();
    });
  }

  private fillForm(): void {
    const form = this.root.querySelector<HTMLFormElement>("#search-form");
    if (!form) return;
    (form.elements.namedItem("q") as HTMLInputElement).value = this.state.query;
    (form.elements.namedItem("sort") as HTMLSelectElement).value = this.state.sort;
    (form.elements.namedItem("lang") as HTMLSelectElement).value = this.state.lang ?? "";
    (form.elements.namedItem("year_min") as HTMLInputElement).value =
      this.state.yearMin != null ? String(this.state.yearMin) : "";
    (form.elements.namedItem("year_max") as HTMLInputElement).value =
      this.state.yearMax != null ? String(this.state.yearMax) : "";
  }

  private readForm(form: HTMLFormElement): void {
    const q = (form.elements.namedItem("q") as HTMLInputElement).value.trim();
    const sort = (form.elements.namedItem("sort") as HTMLSelectElement).value;
    const lang = (form.elements.namedItem("lang") as HTMLSelectElement).value;
    const yearMin = (form.elements.namedItem("year_min") as HTMLInputElement).value;
    const yearMax = (form.elements.namedItem("year_max") as HTMLInputElement).value;
    this.state.query = q;
    this.state.sort = sort === "recency" || sort === "variable_count" ? sort : "relevance";
    this.state.lang = lang || null;
    this.state.yearMin = yearMin ? Number.parseInt(yearMin, 10) : null;
    this.state.yearMax = yearMax ? Number.parseInt(yearMax, 10) : null;
  }

  private syncUrl(push: boolean): void {
    const params = stateToParams(this.state).toString();
    const url = params ? `?${params}` : this.win.location.pathname;
    if (push) this.win.history.pushState(null, "", url);
    else this.win.history.replaceState(null, "", url);
  }

  private async refresh(): Promise<void> {
    const jobs = [this.runSearch()];
    if (this.state.publicationId) {
      jobs.push(this.openPublication(this.state.publicationId));
    } else {
      this.clearDocument();
    }
    await Promise.all(jobs);
  }

  // --- search view ------------------------------------------------------

  async runSearch(): Promise<void> {
    const ticket = this.searchGate.next();
    const container = this.root.querySelector<HTMLElement>("#results")!;
    container.innerHTML = `<p class="loading">Searching…</p>`;
    let response;
    try {
      response = await this.client.search({
        query: this.state.query,
        lang: this.state.lang,
        yearMin: this.state.yearMin,
        yearMax: this.state.yearMax,
        sort: this.state.sort,
        page: this.state.page,
      });
    } catch (error) {
      if (!this.searchGate.isCurrent(ticket)) return;
      this.renderError(container, error, () => void this.runSearch());
      return;
    }
    if (!this.searchGate.isCurrent(ticket)) return; // superseded by a newer query
    this.renderHits(container, response.total, response.hits);
  }

  private renderHits(container: HTMLElement, total: number, hits: SearchHit[]): void {
    if (total === 0) {
      container.innerHTML = `
        <p class="hit-count">0 publications</p>
        <p class="empty">No publications matched.</p>
      `;
      return;
    }
    // Cards appear exactly in response order; the service already sorted.
    const cards = hits.map((hit) => this.hitCard(hit)).join("");
    container.innerHTML = `
      <p class="hit-count">${total} publications</p>
      <ol class="hits">${cards}</ol>
    `;
    for (const button of container.querySelectorAll<HTMLButtonElement>("button[data-pub]")) {
      button.addEventListener("click", () => {
        void this.selectPublication(button.dataset.pub!);
      });
    }
  }

  private hitCard(hit: SearchHit): string {
    const summary = hit.summary
      ? `<div class="summary">
           <span class="summary-kind">${escapeHtml(summaryKindLabel(hit.summary.kind))}</span>
           <blockquote>${escapeHtml(hit.summary.text)}</blockquote>
         </div>`
      : "";
    const snippet = hit.snippet
      ? `<p class="snippet">${snippetToHtml(hit.snippet)}</p>`
      : "";
    return `
      <li class="hit-card" data-id="${escapeHtml(hit.publication_id)}">
        <button type="button" data-pub="${escapeHtml(hit.publication_id)}">
          ${escapeHtml(hit.title)}
        </button>
        <span class="year-badge">${hit.year}</span>
        <span class="count-badge">${hit.variable_count} variables</span>
        ${snippet}
        ${summary}
      </li>
    `;
  }

  // --- document view ----------------------------------------------------

  async selectPublication(id: string): Promise<void> {
    if (this.state.publicationId !== id) {
      this.state.publicationId = id;
      this.state.variableId = null; // stale selection from the previous document
    }
    this.syncUrl(true);
    await this.openPublication(id);
  }

  private clearDocument(): void {
    this.detail = null;
    this.variables = [];
    this.root.querySelector("#document")!.innerHTML = "";
    this.root.querySelector("#variables")!.innerHTML = "";
  }

  async openPublication(id: string): Promise<void> {
    const ticket = this.documentGate.next();
    const container = this.root.querySelector<HTMLElement>("#document")!;
    container.innerHTML = `<p class="loading">Loading publication…</p>`;
    let detail: PublicationDetail;
    let variables: VariableEntry[];
    try {
      [detail, variables] = await Promise.all([
        this.client.publication(id),
        this.client.publicationVariables(id),
      ]);
    } catch (error) {
      if (!this.documentGate.isCurrent(ticket)) return;
      if (error instanceof ApiError && error.status === 404) {
        this.renderNotFound(container, id);
        this.root.querySelector("#variables")!.innerHTML = "";
        return;
      }
      this.renderError(container, error, () => void this.openPublication(id));
      return;
    }
    if (!this.documentGate.isCurrent(ticket)) return;
    this.detail = detail;
    this.variables = variables;
    if (
      this.state.variableId &&
      !variables.some((entry) => entry.variable_id === this.state.variableId)
    ) {
      this.state.variableId = null; // keep the invariant: selection must belong
      this.syncUrl(false);
    }
    this.renderDocument(container);
    this.renderVariablePanel();
  }

  private renderDocument(container: HTMLElement): void {
    const detail = this.detail!;
    const linkedIndexes = new Set(detail.links.map((link) => link.sentence_index));
    const meta = [
      detail.authors.join(", "),
      String(detail.year),
      detail.language,
      detail.dataset_ids.join(", "),
    ]
      .filter((part) => part.length > 0)
      .map(escapeHtml)
      .join(" · ");

    const summaries = SUMMARY_ORDER.filter((kind) => kind in detail.summaries)
      .map((kind) => {
        const record = detail.summaries[kind];
        return `
          <div class="summary" data-kind="${escapeHtml(kind)}">
            <span class="summary-kind">${escapeHtml(summaryKindLabel(kind))}</span>
            <blockquote>${escapeHtml(record.text)}</blockquote>
          </div>
        `;
      })
      .join("");

    const sentences = detail.sentences
      .map((span) => {
        const linked = linkedIndexes.has(span.index);
        const cls = linked ? ' class="sentence linked"' : ' class="sentence"';
        return `<li data-index="${span.index}"${cls}>${escapeHtml(span.text)}</li>`;
      })
      .join("");

    const notice = linkedIndexes.size === 0
      ? `<p class="notice">No variable links were detected in this publication.</p>`
      : "";

    container.innerHTML = `
      <article>
        <h2>${escapeHtml(detail.title)}</h2>
        <p class="meta">${meta}</p>
        ${summaries}
        ${notice}
        <ol class="sentences" start="0">${sentences}</ol>
      </article>
    `;
    for (const item of container.querySelectorAll<HTMLLIElement>("li.linked")) {
      item.addEventListener("click", () => {
        this.selectSentence(Number.parseInt(item.dataset.index!, 10));
      });
    }
  }

  private renderNotFound(container: HTMLElement, id: string): void {
    container.innerHTML = `
      <p class="not-found">Publication <strong>${escapeHtml(id)}</strong> was not found.</p>
    `;
  }

  // --- variable panel ---------------------------------------------------

  private selectSentence(index: number): void {
    const entry = this.variables.find((candidate) =>
      candidate.sentence_indexes.includes(index),
    );
    if (entry) this.selectVariable(entry.variable_id);
  }

  selectVariable(id: string): void {
    if (!this.variables.some((entry) => entry.variable_id === id)) return;
    this.state.variableId = id;
    this.syncUrl(true);
    this.renderVariablePanel();
  }

  private sentenceText(index: number): string {
    const span = this.detail?.sentences.find((candidate) => candidate.index === index);
    return span ? span.text : "";
  }

  private renderVariablePanel(): void {
    const panel = this.root.querySelector<HTMLElement>("#variables")!;
    if (!this.detail) {
      panel.innerHTML = "";
      return;
    }
    if (this.variables.length === 0) {
      panel.innerHTML = `<p class="empty">No linked variables.</p>`;
      return;
    }
    const items = this.variables
      .map((entry) => {
        const selected = entry.variable_id === this.state.variableId;
        return `
          <li${selected ? ' class="selected"' : ""}>
            <button type="button" data-var="${escapeHtml(entry.variable_id)}">
              ${escapeHtml(entry.label || entry.variable_id)}
            </button>
            <span class="similarity">${entry.best_similarity.toFixed(2)}</span>
          </li>
        `;
      })
      .join("");
    const selectedEntry = this.variables.find(
      (entry) => entry.variable_id === this.state.variableId,
    );
    panel.innerHTML = `
      <h2>Linked variables</h2>
      <ul class="variable-list">${items}</ul>
      ${selectedEntry ? this.variableDetail(selectedEntry) : ""}
    `;
    for (const button of panel.querySelectorAll<HTMLButtonElement>("button[data-var]")) {
      button.addEventListener("click", () => this.selectVariable(button.dataset.var!));
    }
    panel.querySelector(".variable-detail")?.scrollIntoView?.();
  }

  private variableDetail(entry: VariableEntry): string {
    const categories = entry.answer_categories.length
      ? `<ul class="categories">
           ${entry.answer_categories.map((c) => `<li>${escapeHtml(c)}</li>`).join("")}
         </ul>`
      : ""; // omitted entirely when the variable has no categories
    const sentences = entry.sentence_indexes
      .map(
        (index) => `
          <blockquote class="support" data-index="${index}">
            ${emphasizeTerms(this.sentenceText(index), entry.overlap_terms)}
          </blockquote>
        `,
      )
      .join("");
    return `
      <div class="variable-detail" data-var="${escapeHtml(entry.variable_id)}">
        <h3>${escapeHtml(entry.label || entry.variable_id)}</h3>
        <p class="question">${emphasizeTerms(entry.question_text, entry.overlap_terms)}</p>
        ${categories}
        <p class="similarity">Similarity: ${entry.best_similarity.toFixed(2)}</p>
        <div class="supporting">${sentences}</div>
      </div>
    `;
  }

  // --- errors -----------------------------------------------------------

  private renderError(container: HTMLElement, error: unknown, retry: () => void): void {
    const message = error instanceof Error ? error.message : String(error);
    container.innerHTML = `
      <div class="error-banner" role="alert">
        <span>${escapeHtml(message)}</span>
        <button type="button" class="retry">Retry</button>
      </div>
    `;
    container.querySelector<HTMLButtonElement>("button.retry")!.addEventListener("click", retry);
  }
}

/** Production entry: API base from a global set by the hosting page. */
export function mountApp(root: HTMLElement): App {
  const base = (window as unknown as { SVLINK_API_BASE?: string }).SVLINK_API_BASE ?? "";
  const app = new App({ root, client: new ApiClient(base) });
  void app.start();
  return app;
}
