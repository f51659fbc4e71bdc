/** HTML fragments from untrusted text: escaping, snippet marks, term emphasis.
 *
 * The service marks matched snippet terms with «guillemets»; those are
 * translated to <em> here so the wire format stays plain text. Overlap
 * terms are emphasized by whole-word match, Unicode-aware, so German
 * umlauts survive.
 */

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

/** «term» spans become <em>term</em>; everything else is escaped verbatim. */
export function snippetToHtml(snippet: string): string {
  const parts: string[] = [];
  let rest = snippet;
  for (;;) {
    const open = rest.indexOf("«");
    if (open < 0) break;
    const close = rest.indexOf("»", open + 1);
    if (close < 0) break;
    parts.push(escapeHtml(rest.slice(0, open)));
    parts.push(`<em>${escapeHtml(rest.slice(open + 1, close))}</em>`);
    rest = rest.slice(close + 1);
  }
  parts.push(escapeHtml(rest));
  return parts.join("");
}

function escapeRegExp(term: string): string {
  return term.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

/** Escape ``text`` and wrap whole-word occurrences of ``terms`` in <em>. */
export function emphasizeTerms(text: string, terms: string[]): string {
  const usable = terms.filter((t) => t.length > 0);
  if (usable.length === 0) return escapeHtml(text);
  const alternatives = usable.map(escapeRegExp).join("|");
  const pattern = new RegExp(
    `(?<![\\p{L}\\p{N}])(${alternatives})(?![\\p{L}\\p{N}])`,
    "giu",
  );
  const out: string[] = [];
  let cursor = 0;
  for (const match of text.matchAll(pattern)) {
    const at = match.index ?? 0;
    out.push(escapeHtml(text.slice(cursor, at)));
    out.push(`<em>${escapeHtml(match[0])}</em>`);
    cursor = at + match[0].length;
  }
  out.push(escapeHtml(text.slice(cursor)));
  return out.join("");
}

/** Human label for a summary kind shown on cards and detail pages. */
export function summaryKindLabel(kind: string): string {
  switch (kind) {
    case "abstractive":
      return "abstractive summary";
    case "extractive_fallback":
      return "extractive summary (fallback)";
    case "extractive":
      return "extractive summary";
    default:
      return kind;
  }
}
