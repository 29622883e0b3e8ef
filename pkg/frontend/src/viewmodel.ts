/**
 * Pure projection of service responses into what the page shows.
 *
 * Nothing here recomputes blends, similarities, or tuning results: every
 * number in the view model is copied from a response field (chart
 * scaling happens later, in the chart module). Responses with unknown
 * shapes project to a SchemaDrift marker carrying the raw payload.
 */

import {
  HistoryItem,
  Prompt,
  Recommendation,
  RequestResponse,
  TrainingLog,
  isRecommendResponse,
  isRequestResponse,
  isSessionView,
} from "./schema.js";

export interface PromptSegment {
  text: string;
  fieldPath: string | null; // null for template text between spans
}

export interface ParamRow {
  name: string;
  value: string;
}

export interface ChartSeries {
  epochs: number[];
  trainLoss: number[];
  valLoss: number[];
  valMetric: number[];
}

export interface HistoryRow {
  requestText: string; // "initial recommendation" when request is absent
  requestKind: string;
  source: string;
}

export interface SessionViewModel {
  kind: "view";
  sessionId: string;
  state: string;
  promptSegments: PromptSegment[];
  paramRows: ParamRow[];
  neighborLabel: string; // e.g. "A 60% / B 40%"
  source: string;
  rationale: string;
  chart: ChartSeries | null;
  historyRows: HistoryRow[];
  raw: unknown; // full last response: the projection is lossless
}

export interface SchemaDrift {
  kind: "schema_drift";
  message: string;
  raw: unknown;
}

export type Projection = SessionViewModel | SchemaDrift;

export function formatValue(value: unknown): string {
  if (typeof value === "number") {
    if (Number.isInteger(value)) return String(value);
    const magnitude = Math.abs(value);
    if (magnitude !== 0 && (magnitude < 1e-3 || magnitude >= 1e6)) {
      return value.toExponential(4);
    }
    return String(Math.round(value * 1e6) / 1e6);
  }
  return String(value);
}

export function neighborLabel(recommendation: Recommendation): string {
  return recommendation.neighbors
    .map((n) => `${n.dataset} ${Math.round(n.weight * 100)}%`)
    .join(" / ");
}

export function paramRows(recommendation: Recommendation): ParamRow[] {
  return Object.keys(recommendation.config)
    .sort()
    .map((name) => ({ name, value: formatValue(recommendation.config[name]) }));
}

export function chartSeries(log: TrainingLog): ChartSeries {
  return {
    epochs: log.entries.map((e) => e.epoch),
    trainLoss: log.entries.map((e) => e.train_loss),
    valLoss: log.entries.map((e) => e.val_loss),
    valMetric: log.entries.map((e) => e.val_metric),
  };
}

/**
 * Split prompt text along its provenance spans. Span offsets are byte
 * ranges into the UTF-8 encoding, so the mapping to rendered character
 * ranges goes through TextEncoder/TextDecoder.
 */
export function promptSegments(prompt: Prompt): PromptSegment[] {
  const encoder = new TextEncoder();
  const decoder = new TextDecoder();
  const bytes = encoder.encode(prompt.text);
  const segments: PromptSegment[] = [];
  let cursor = 0;
  for (const span of prompt.spans) {
    if (span.start > cursor) {
      segments.push({
        text: decoder.decode(bytes.subarray(cursor, span.start)),
        fieldPath: null,
      });
    }
    segments.push({
      text: decoder.decode(bytes.subarray(span.start, span.end)),
      fieldPath: span.field_path,
    });
    cursor = span.end;
  }
  if (cursor < bytes.length) {
    segments.push({ text: decoder.decode(bytes.subarray(cursor)), fieldPath: null });
  }
  return segments;
}

function historyRows(history: HistoryItem[]): HistoryRow[] {
  return history.map((item) => ({
    requestText: item.request ? item.request.text : "initial recommendation",
    requestKind: item.request ? item.request.kind : "initial",
    source: item.recommendation.source,
  }));
}

export function projectView(
  sessionId: string,
  prompt: Prompt | null,
  response: unknown,
  history: HistoryItem[] = [],
): Projection {
  let recommendation: Recommendation;
  let log: TrainingLog;
  let state: string;

  if (isRecommendResponse(response) || isRequestResponse(response)) {
    recommendation = response.recommendation;
    log = response.predicted_log;
    state = response.state;
  } else if (isSessionView(response) && response.history.length > 0) {
    const last = response.history[response.history.length - 1];
    recommendation = last.recommendation;
    log = last.predicted_log;
    state = response.state;
    prompt = response.prompt ?? prompt;
    history = response.history;
  } else {
    return {
      kind: "schema_drift",
      message: "response shape not recognized; showing raw payload",
      raw: response,
    };
  }

  return {
    kind: "view",
    sessionId,
    state,
    promptSegments: prompt ? promptSegments(prompt) : [],
    paramRows: paramRows(recommendation),
    neighborLabel: neighborLabel(recommendation),
    source: recommendation.source,
    rationale: recommendation.rationale,
    chart: chartSeries(log),
    historyRows: historyRows(history),
    raw: response,
  };
}

/** Projection used by the flow module when a request fails with 422. */
export interface InlineError {
  code: string;
  message: string;
}

export function projectRequestOutcome(
  status: number,
  body: unknown,
): { ok: true; body: RequestResponse } | { ok: false; error: InlineError } {
  if (status === 200 && isRequestResponse(body)) {
    return { ok: true, body };
  }
  const b = body as { error?: { code?: string; message?: string } } | null;
  if (b && typeof b === "object" && b.error && typeof b.error.code === "string") {
    return {
      ok: false,
      error: { code: b.error.code, message: b.error.message ?? "" },
    };
  }
  return {
    ok: false,
    error: { code: "schema_drift", message: `unexpected response (${status})` },
  };
}
