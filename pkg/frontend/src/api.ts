/** Thin fetch wrappers over the session service (same-origin). */

import {
  ApiError,
  CardSchema,
  CardsResponse,
  RecommendResponse,
  RequestResponse,
  SessionCreated,
  SessionViewResponse,
} from "./schema.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

async function call<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = (await response.json().catch(() => null)) as unknown;
  if (!response.ok) {
    const err = body as ApiError | null;
    if (err && err.error) {
      throw new ServiceError(response.status, err.error.code,
        err.error.message, err.error.field);
    }
    throw new ServiceError(response.status, "http_error",
      `request failed with status ${response.status}`);
  }
  return body as T;
}

export const createSession = () =>
  call<SessionCreated>("/v1/sessions", { method: "POST" });

export const submitCards = (
  sessionId: string,
  dataCard: Record<string, unknown>,
  modelCard: Record<string, unknown>,
) =>
  call<CardsResponse>(`/v1/sessions/${sessionId}/cards`, {
    method: "POST",
    body: JSON.stringify({ data_card: dataCard, model_card: modelCard }),
  });

export const recommendSession = (sessionId: string) =>
  call<RecommendResponse>(`/v1/sessions/${sessionId}/recommend`, {
    method: "POST",
    body: JSON.stringify({ backend: "mock" }),
  });

export const getSession = (sessionId: string) =>
  call<SessionViewResponse>(`/v1/sessions/${sessionId}`);

export const getCardSchema = () => call<CardSchema>("/v1/schema/cards");

/** Raw variant: the 422 all-filtered outcome is data, not an exception. */
export async function postRequestRaw(
  sessionId: string,
  text: string,
): Promise<{ status: number; body: unknown }> {
  const response = await fetch(`/v1/sessions/${sessionId}/requests`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ text }),
  });
  return { status: response.status, body: await response.json().catch(() => null) };
}

export type RequestOutcome =
  | { ok: true; body: RequestResponse }
  | { ok: false; error: { code: string; message: string } };
