/**
 * The additional-request flow: validate, post, and fold the outcome into
 * console state without ever losing the prior recommendation.
 */

import { postRequestRaw } from "./api.js";
import { HistoryItem, Prompt } from "./schema.js";
import {
  InlineError,
  Projection,
  projectRequestOutcome,
  projectView,
} from "./viewmodel.js";

export interface ConsoleState {
  sessionId: string;
  prompt: Prompt | null;
  history: HistoryItem[];
  projection: Projection | null;
  inlineError: InlineError | null;
  pending: boolean;
}

export function validateRequestText(text: string): string | null {
  if (!text.trim()) return "enter a constraint or request first";
  return null;
}

export async function submitRequestFlow(
  state: ConsoleState,
  text: string,
  post: typeof postRequestRaw = postRequestRaw,
): Promise<ConsoleState> {
  const validation = validateRequestText(text);
  if (validation) {
    return { ...state, inlineError: { code: "client_validation", message: validation } };
  }
  if (state.pending) return state;

  const { status, body } = await post(state.sessionId, text.trim());
  const outcome = projectRequestOutcome(status, body);
  if (!outcome.ok) {
    // inline error; prior recommendation and history stay untouched
    return { ...state, pending: false, inlineError: outcome.error };
  }
  const history: HistoryItem[] = [
    ...state.history,
    {
      request: outcome.body.request,
      recommendation: outcome.body.recommendation,
      predicted_log: outcome.body.predicted_log,
    },
  ];
  return {
    ...state,
    pending: false,
    inlineError: null,
    history,
    projection: projectView(state.sessionId, state.prompt, outcome.body, history),
  };
}
