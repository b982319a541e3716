/**
 * Pure turn rendering: a Turn wire payload in, an HTML string out.
 *
 * Rendering is deterministic — identical payloads always produce identical
 * markup — which is what the snapshot tests pin down. Server-rendered SVG
 * attachments are inlined verbatim; table attachments become HTML tables
 * with the same truncation note the engine phrases.
 */

import {
  Attachment,
  Citation,
  SeriesPayloadSchema,
  TablePayload,
  TablePayloadSchema,
  Turn,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderCitation(citation: Citation): string {
  const title = escapeHtml(citation.title);
  const year = citation.year === null ? "" : ` (${citation.year})`;
  const ref = citation.doi_or_url;
  const link = /^https?:\/\//.test(ref)
    ? `<a href="${escapeHtml(ref)}" target="_blank" rel="noopener">${escapeHtml(ref)}</a>`
    : escapeHtml(ref);
  return `<li class="citation">${title}${year} — ${link}</li>`;
}

function renderTable(table: TablePayload): string {
  const head = table.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = table.rows
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${escapeHtml(String(cell ?? ""))}</td>`).join("")}</tr>`,
    )
    .join("\n");
  const note = table.truncated
    ? `<p class="table-note">(first ${table.rows.length} of ${table.total_row_count} total records)</p>`
    : "";
  return `<table class="result-table"><thead><tr>${head}</tr></thead>\n<tbody>${body}</tbody></table>${note}`;
}

function renderAttachment(attachment: Attachment): string {
  switch (attachment.kind) {
    case "table": {
      const table = TablePayloadSchema.parse(attachment.payload);
      return `<div class="attachment attachment-table">${renderTable(table)}</div>`;
    }
    case "svg":
      // Server-produced chart; trusted and inlined as-is.
      return `<div class="attachment attachment-svg">${String(attachment.payload)}</div>`;
    case "series": {
      // Raw curve data backs the what-if panel; in a turn it is summarized.
      const series = SeriesPayloadSchema.parse(attachment.payload);
      const labels = series.map((s) => escapeHtml(s.label)).join(", ");
      return `<p class="attachment attachment-series">Series: ${labels}</p>`;
    }
    default:
      return `<p class="attachment attachment-unknown">[${escapeHtml(attachment.kind)} attachment]</p>`;
  }
}

/** One completed turn as a chat bubble pair (question, then answer). */
export function renderTurn(turn: Turn): string {
  const parts: string[] = [];
  parts.push(`<article class="turn" data-turn-id="${escapeHtml(turn.turn_id)}">`);
  parts.push(`<p class="question">${escapeHtml(turn.query.text)}</p>`);
  if (turn.answer === null) {
    parts.push(`<p class="answer answer-missing">No answer recorded.</p>`);
  } else {
    parts.push(`<div class="answer" data-route="${escapeHtml(turn.answer.route)}">`);
    parts.push(`<span class="route-badge">${escapeHtml(turn.answer.route)}</span>`);
    parts.push(`<p class="body">${escapeHtml(turn.answer.body)}</p>`);
    if (turn.answer.citations.length > 0) {
      parts.push(
        `<ol class="citations">\n${turn.answer.citations.map(renderCitation).join("\n")}\n</ol>`,
      );
    }
    for (const attachment of turn.answer.attachments) {
      parts.push(renderAttachment(attachment));
    }
    parts.push(`</div>`);
  }
  parts.push(`</article>`);
  return parts.join("\n");
}
