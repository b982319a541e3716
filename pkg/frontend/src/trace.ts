/**
 * Trace panel: turns the flat span list from GET /trace into a tree and
 * renders it as a collapsible outline. The tree mirrors the server payload
 * exactly — parent links, ordering, names, durations, payload excerpts.
 */

import { Span } from "./types.js";
import { escapeHtml } from "./render.js";

export interface SpanNode {
  span: Span;
  children: SpanNode[];
}

/**
 * Build the span tree. Spans arrive in recording order; children keep that
 * order. Spans whose parent is missing are treated as roots so a partial
 * trace still renders.
 */
export function buildSpanTree(spans: Span[]): SpanNode[] {
  const nodes = new Map<string, SpanNode>();
  for (const span of spans) nodes.set(span.span_id, { span, children: [] });
  const roots: SpanNode[] = [];
  for (const span of spans) {
    const node = nodes.get(span.span_id)!;
    const parent = span.parent_id === null ? undefined : nodes.get(span.parent_id);
    if (parent) parent.children.push(node);
    else roots.push(node);
  }
  return roots;
}

const PAYLOAD_EXCERPT_CHARS = 120;

export function payloadExcerpt(payload: Record<string, unknown>): string {
  const text = JSON.stringify(payload);
  if (text === "{}") return "";
  return text.length <= PAYLOAD_EXCERPT_CHARS
    ? text
    : text.slice(0, PAYLOAD_EXCERPT_CHARS - 1) + "…";
}

function renderNode(node: SpanNode): string {
  const duration = (node.span.ended_at - node.span.started_at).toFixed(3);
  const excerpt = payloadExcerpt(node.span.payload);
  const label =
    `<span class="span-name">${escapeHtml(node.span.name)}</span>` +
    `<span class="span-duration">${duration}s</span>` +
    (excerpt ? `<code class="span-payload">${escapeHtml(excerpt)}</code>` : "");
  if (node.children.length === 0) {
    return `<li class="span">${label}</li>`;
  }
  const children = node.children.map(renderNode).join("\n");
  return `<li class="span"><details open><summary>${label}</summary>\n<ul class="span-children">\n${children}\n</ul>\n</details></li>`;
}

/** The whole panel; pass `null` when the trace could not be fetched. */
export function renderTracePanel(spans: Span[] | null): string {
  if (spans === null) {
    return `<p class="trace-unavailable">trace unavailable</p>`;
  }
  const roots = buildSpanTree(spans);
  return `<ul class="trace-tree">\n${roots.map(renderNode).join("\n")}\n</ul>`;
}
