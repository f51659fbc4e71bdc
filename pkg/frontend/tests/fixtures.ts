/** Canned REST payloads for the mock server, shaped like real responses. */
import type {
  PublicationDetail,
  SearchResponse,
  VariableEntry,
} from "../src/api.js";

export const SEARCH_RELEVANCE: SearchResponse = {
  total: 3,
  hits: [
    {
      publication_id: "p-001",
      score: 4.21,
      snippet: "citizens report high «trust» in «parliament» across waves",
      variable_count: 2,
      year: 2015,
      title: "Trust and turnout",
      summary: { kind: "extractive_fallback", text: "Trust in parliament rose steadily." },
    },
    {
      publication_id: "p-002",
      score: 2.11,
      snippet: "«trust» correlates with satisfaction",
      variable_count: 0,
      year: 2020,
      title: "Satisfaction surveys revisited",
      summary: { kind: "abstractive", text: "(en) Satisfaction is stable." },
    },
    {
      publication_id: "p-003",
      score: 1.05,
      snippet: "measuring «trust» remains hard",
      variable_count: 1,
      year: 2011,
      title: "Measurement problems",
      summary: null,
    },
  ],
};

/** Same hits re-ranked by the variable-count badge, as the service would. */
export const SEARCH_BY_COUNT: SearchResponse = {
  total: 3,
  hits: [
    SEARCH_RELEVANCE.hits[0],
    SEARCH_RELEVANCE.hits[2],
    SEARCH_RELEVANCE.hits[1],
  ],
};

export const EMPTY_SEARCH: SearchResponse = { total: 0, hits: [] };

const P1_SENTENCES = [
  "The study draws on three panel waves.",
  "How much do you personally trust the parliament?",
  "Fieldwork ran between March and June.",
  "Did you cast a vote in the last national election?",
  "Results were weighted by region.",
];

export const PUBLICATION_P1: PublicationDetail = {
  publication_id: "p-001",
  title: "Trust and turnout",
  abstract: "We study political trust and turnout.",
  authors: ["Example, Alice", "Sample, Bob"],
  year: 2015,
  language: "en",
  dataset_ids: ["ds-demo"],
  content_hash: "0123456789abcdef",
  variable_count: 2,
  sentences: P1_SENTENCES.map((text, index) => {
    const start = P1_SENTENCES.slice(0, index).reduce((n, s) => n + s.length + 1, 0);
    return { index, start, end: start + text.length, text };
  }),
  summaries: {
    extractive: {
      kind: "extractive",
      language: "en",
      text: P1_SENTENCES[1],
      source_sentence_index: 1,
    },
    extractive_fallback: {
      kind: "extractive_fallback",
      language: "en",
      text: "Trust in parliament rose steadily.",
      source_sentence_index: 1,
    },
  },
  links: [
    {
      publication_id: "p-001",
      sentence_index: 1,
      variable_id: "v-trust",
      similarity: 0.91,
      classifier_score: 0.25,
      method: "ensemble",
    },
    {
      publication_id: "p-001",
      sentence_index: 3,
      variable_id: "v-vote",
      similarity: 0.52,
      classifier_score: 0.25,
      method: "ensemble",
    },
  ],
};

export const VARIABLES_P1: VariableEntry[] = [
  {
    variable_id: "v-trust",
    label: "Trust in parliament",
    question_text: "How much do you personally trust the parliament?",
    answer_categories: ["None at all", "A little", "Some", "A lot"],
    sentence_indexes: [1],
    best_similarity: 0.91,
    overlap_terms: ["parliament", "trust"],
  },
  {
    variable_id: "v-vote",
    label: "",
    question_text: "Did you vote in the last national election?",
    answer_categories: [],
    sentence_indexes: [3],
    best_similarity: 0.52,
    overlap_terms: ["election", "vote"],
  },
];

export const PUBLICATION_P2: PublicationDetail = {
  publication_id: "p-002",
  title: "Satisfaction surveys revisited",
  abstract: "",
  authors: ["Writer, Carol"],
  year: 2020,
  language: "en",
  dataset_ids: ["ds-demo"],
  content_hash: "fedcba9876543210",
  variable_count: 0,
  sentences: [
    { index: 0, start: 0, end: 28, text: "Satisfaction remains stable." },
    { index: 1, start: 29, end: 57, text: "No instrument items matched." },
  ],
  summaries: {
    extractive: {
      kind: "extractive",
      language: "en",
      text: "Satisfaction remains stable.",
      source_sentence_index: 0,
    },
  },
  links: [],
};
