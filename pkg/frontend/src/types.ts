/**
 * Wire types for the dairydesk HTTP API, validated at the boundary with zod.
 *
 * These mirror the JSON emitted by the server exactly; the UI never invents
 * fields. All TypeScript types are inferred from the schemas so the runtime
 * validation and the static types cannot drift apart.
 */

import { z } from "zod";

export const ROUTE_LABELS = [
  "text_subagent",
  "sql_subagent",
  "nosql_subagent",
  "model_subagent",
  "clarify_subagent",
] as const;

export const CitationSchema = z.object({
  title: z.string(),
  year: z.number().nullable(),
  doi_or_url: z.string(),
});

export const AttachmentSchema = z.object({
  attachment_id: z.string(),
  kind: z.string(),
  media_type: z.string(),
  payload: z.unknown(),
});

/** Payload of a `kind: "table"` attachment. */
export const TablePayloadSchema = z.object({
  columns: z.array(z.string()),
  rows: z.array(z.array(z.unknown())),
  total_row_count: z.number(),
  truncated: z.boolean(),
});

/** Payload of a `kind: "series"` attachment: one entry per curve. */
export const SeriesPayloadSchema = z.array(
  z.object({
    label: z.string(),
    points: z.array(z.tuple([z.number(), z.number()])),
  }),
);

export const AnswerSchema = z.object({
  body: z.string(),
  route: z.string(),
  elapsed: z.number(),
  citations: z.array(CitationSchema),
  attachments: z.array(AttachmentSchema),
});

export const SpanSchema = z.object({
  span_id: z.string(),
  parent_id: z.string().nullable(),
  name: z.string(),
  started_at: z.number(),
  ended_at: z.number(),
  payload: z.record(z.unknown()),
});

export const TurnSchema = z.object({
  turn_id: z.string(),
  query: z.object({
    text: z.string(),
    session_id: z.string(),
    received_at: z.string(),
  }),
  route: z.string(),
  answer: AnswerSchema.nullable(),
  spans: z.array(SpanSchema),
  total_seconds: z.number().optional(),
});

export const TraceSchema = z.object({
  turn_id: z.string(),
  spans: z.array(SpanSchema),
});

export const TurnListSchema = z.object({
  session: z.string(),
  turns: z.array(TurnSchema),
});

export const HealthSchema = z.object({
  status: z.string(),
  model_endpoint: z.string().nullable(),
});

/** Body of every 4xx response. */
export const ProblemSchema = z.object({
  error: z.string(),
  stage: z.string(),
  detail: z.string(),
});

export type Citation = z.infer<typeof CitationSchema>;
export type Attachment = z.infer<typeof AttachmentSchema>;
export type TablePayload = z.infer<typeof TablePayloadSchema>;
export type SeriesPayload = z.infer<typeof SeriesPayloadSchema>;
export type Answer = z.infer<typeof AnswerSchema>;
export type Span = z.infer<typeof SpanSchema>;
export type Turn = z.infer<typeof TurnSchema>;
export type Trace = z.infer<typeof TraceSchema>;
export type TurnList = z.infer<typeof TurnListSchema>;
export type Health = z.infer<typeof HealthSchema>;
export type Problem = z.infer<typeof ProblemSchema>;
