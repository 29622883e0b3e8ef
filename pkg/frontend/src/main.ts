/** Page wiring: one session, buttons disabled while a request is in flight. */

import {
  createSession,
  getCardSchema,
  recommendSession,
  ServiceError,
  submitCards,
} from "./api.js";
import { ConsoleState, submitRequestFlow, validateRequestText } from "./flow.js";
import { DEMO_DATA_CARD, DEMO_MODEL_CARD, formFields } from "./forms.js";
import {
  renderChart,
  renderDriftBanner,
  renderFormFields,
  renderHistory,
  renderInlineError,
  renderNeighborWeights,
  renderParamTable,
  renderPrompt,
} from "./render.js";
import { projectView, promptSegments } from "./viewmodel.js";

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

let state: ConsoleState = {
  sessionId: "",
  prompt: null,
  history: [],
  projection: null,
  inlineError: null,
  pending: false,
};

function setPending(pending: boolean): void {
  state = { ...state, pending };
  for (const id of ["submit-cards", "recommend", "send-request"]) {
    ($(id) as HTMLButtonElement).disabled = pending;
  }
}

function paint(): void {
  $("session-state").textContent =
    state.sessionId ? `session ${state.sessionId.slice(0, 8)} - ` +
      `${state.projection?.kind === "view" ? state.projection.state : "..."}` : "no session";
  $("inline-error").innerHTML = renderInlineError(state.inlineError);
  const projection = state.projection;
  if (!projection) return;
  if (projection.kind === "schema_drift") {
    $("drift").innerHTML = renderDriftBanner(projection);
    return;
  }
  $("drift").innerHTML = "";
  $("prompt").innerHTML = renderPrompt(projection.promptSegments);
  $("params").innerHTML = renderParamTable(projection);
  $("neighbors").innerHTML = renderNeighborWeights(projection);
  $("chart").innerHTML = renderChart(projection);
  $("history").innerHTML = renderHistory(projection);
  $("rationale").textContent = projection.rationale;
}

function showError(err: unknown): void {
  const message = err instanceof ServiceError
    ? `${err.code}: ${err.message}`
    : String(err);
  state = { ...state, inlineError: { code: "request_failed", message } };
  paint();
}

function parseEditor(id: string): Record<string, unknown> {
  return JSON.parse(($(id) as HTMLTextAreaElement).value) as Record<string, unknown>;
}

async function onSubmitCards(): Promise<void> {
  setPending(true);
  try {
    if (!state.sessionId) {
      state = { ...state, sessionId: (await createSession()).id };
    }
    const response = await submitCards(
      state.sessionId, parseEditor("data-card"), parseEditor("model-card"));
    state = {
      ...state,
      prompt: response.prompt,
      inlineError: null,
      history: [],
    };
    $("prompt").innerHTML = renderPrompt(promptSegments(response.prompt));
    $("session-state").textContent =
      `session ${state.sessionId.slice(0, 8)} - ${response.state}`;
  } catch (err) {
    showError(err);
  } finally {
    setPending(false);
  }
}

async function onRecommend(): Promise<void> {
  setPending(true);
  try {
    const response = await recommendSession(state.sessionId);
    state = {
      ...state,
      inlineError: null,
      history: [{
        request: null,
        recommendation: response.recommendation,
        predicted_log: response.predicted_log,
      }],
    };
    state = {
      ...state,
      projection: projectView(state.sessionId, state.prompt, response,
        state.history),
    };
    paint();
  } catch (err) {
    showError(err);
  } finally {
    setPending(false);
  }
}

async function onSendRequest(): Promise<void> {
  const text = ($("request-text") as HTMLInputElement).value;
  const validation = validateRequestText(text);
  if (validation) {
    state = { ...state, inlineError: { code: "client_validation", message: validation } };
    paint();
    return;
  }
  setPending(true);
  try {
    state = await submitRequestFlow(state, text);
    paint();
    if (!state.inlineError) ($("request-text") as HTMLInputElement).value = "";
  } catch (err) {
    showError(err);
  } finally {
    setPending(false);
  }
}

async function boot(): Promise<void> {
  ($("data-card") as HTMLTextAreaElement).value =
    JSON.stringify(DEMO_DATA_CARD, null, 2);
  ($("model-card") as HTMLTextAreaElement).value =
    JSON.stringify(DEMO_MODEL_CARD, null, 2);
  try {
    const schema = await getCardSchema();
    $("data-card-fields").innerHTML = renderFormFields(formFields(schema, "data_card"));
    $("model-card-fields").innerHTML = renderFormFields(formFields(schema, "model_card"));
  } catch {
    // schema endpoint unreachable: editors still work, field hints absent
  }
  $("submit-cards").addEventListener("click", () => void onSubmitCards());
  $("recommend").addEventListener("click", () => void onRecommend());
  $("send-request").addEventListener("click", () => void onSendRequest());
}

document.addEventListener("DOMContentLoaded", () => void boot());
