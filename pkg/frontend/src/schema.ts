/**
 * Service payload types and runtime guards.
 *
 * The guards are what SchemaDrift detection hangs on: any response that
 * fails its guard is surfaced as a banner with the raw payload instead
 * of being half-rendered.
 */

export interface Span {
  field_path: string;
  start: number;
  end: number;
}

export interface Prompt {
  text: string;
  spans: Span[];
}

export interface LogEntry {
  epoch: number;
  train_loss: number;
  val_loss: number;
  val_metric: number;
}

export interface TrainingLog {
  entries: LogEntry[];
}

export interface NeighborWeight {
  dataset: string;
  weight: number;
}

export interface Recommendation {
  config: Record<string, unknown>;
  source: string;
  neighbors: NeighborWeight[];
  rationale: string;
}

export interface TuneResult {
  best_config: Record<string, unknown>;
  best_final_metric: number;
  queries_used: number;
  stop_reason: string;
  trajectory: { config: Record<string, unknown>; final_metric: number }[];
}

export interface SessionCreated {
  id: string;
  state: string;
}

export interface CardsResponse {
  state: string;
  prompt: Prompt;
}

export interface RecommendResponse {
  state: string;
  recommendation: Recommendation;
  predicted_log: TrainingLog;
  tune_result: TuneResult;
}

export interface RequestResponse {
  state: string;
  request: { kind: string; text: string };
  recommendation: Recommendation;
  predicted_log: TrainingLog;
}

export interface HistoryItem {
  request?: { kind: string; text: string } | null;
  recommendation: Recommendation;
  predicted_log: TrainingLog;
}

export interface SessionViewResponse {
  id: string;
  state: string;
  created_at: number;
  data_card?: Record<string, unknown>;
  model_card?: Record<string, unknown>;
  prompt?: Prompt;
  history: HistoryItem[];
}

export interface ApiError {
  error: { code: string; message: string; field?: string };
}

export type CardSchema = Record<string, Record<string, unknown>>;

const isObject = (v: unknown): v is Record<string, unknown> =>
  typeof v === "object" && v !== null && !Array.isArray(v);

const isNumber = (v: unknown): v is number => typeof v === "number" && isFinite(v);

export function isPrompt(v: unknown): v is Prompt {
  if (!isObject(v) || typeof v.text !== "string" || !Array.isArray(v.spans)) return false;
  return v.spans.every(
    (s) => isObject(s) && typeof s.field_path === "string" &&
      isNumber(s.start) && isNumber(s.end),
  );
}

export function isTrainingLog(v: unknown): v is TrainingLog {
  if (!isObject(v) || !Array.isArray(v.entries)) return false;
  return v.entries.every(
    (e) => isObject(e) && isNumber(e.epoch) && isNumber(e.train_loss) &&
      isNumber(e.val_loss) && isNumber(e.val_metric),
  );
}

export function isRecommendation(v: unknown): v is Recommendation {
  if (!isObject(v) || !isObject(v.config) || typeof v.source !== "string") return false;
  if (typeof v.rationale !== "string" || !Array.isArray(v.neighbors)) return false;
  return v.neighbors.every(
    (n) => isObject(n) && typeof n.dataset === "string" && isNumber(n.weight),
  );
}

export function isCardsResponse(v: unknown): v is CardsResponse {
  return isObject(v) && typeof v.state === "string" && isPrompt(v.prompt);
}

export function isRecommendResponse(v: unknown): v is RecommendResponse {
  return (
    isObject(v) &&
    typeof v.state === "string" &&
    isRecommendation(v.recommendation) &&
    isTrainingLog(v.predicted_log) &&
    isObject(v.tune_result)
  );
}

export function isRequestResponse(v: unknown): v is RequestResponse {
  return (
    isObject(v) &&
    typeof v.state === "string" &&
    isObject(v.request) &&
    isRecommendation(v.recommendation) &&
    isTrainingLog(v.predicted_log)
  );
}

export function isSessionView(v: unknown): v is SessionViewResponse {
  return (
    isObject(v) &&
    typeof v.id === "string" &&
    typeof v.state === "string" &&
    Array.isArray(v.history)
  );
}

export function isApiError(v: unknown): v is ApiError {
  return (
    isObject(v) &&
    isObject(v.error) &&
    typeof v.error.code === "string" &&
    typeof v.error.message === "string"
  );
}
