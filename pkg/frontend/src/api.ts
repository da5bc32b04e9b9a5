/** Typed client for the annotation HTTP JSON API.
 *
 * Transient failures (network errors and 5xx responses) are retried with
 * exponential backoff; 4xx responses are surfaced as ApiError with the
 * server's reason code when one is present.
 */

import {
  AnnotationBody,
  ExportResponse,
  NextQuestionResponse,
  Question,
  SelectionResponse,
  SubmitResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    /** Server reason code, e.g. "invalid_span" on a 422. */
    public readonly reason: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
  /** Retries after the first attempt for network/5xx failures. */
  maxRetries?: number;
  /** Initial backoff in ms, doubled per retry. */
  backoffMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

function extractReason(payload: unknown): {
  reason: string | null;
  message: string;
} {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (typeof detail === "string") return { reason: null, message: detail };
    if (detail && typeof detail === "object") {
      const d = detail as { reason?: string; message?: string };
      return {
        reason: d.reason ?? null,
        message: d.message ?? JSON.stringify(detail),
      };
    }
  }
  return { reason: null, message: "request failed" };
}

export class AnnotationClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly maxRetries: number;
  private readonly backoffMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(opts: ClientOptions = {}) {
    this.baseUrl = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.fetchImpl = opts.fetchImpl ?? (fetch as unknown as FetchLike);
    this.maxRetries = opts.maxRetries ?? 3;
    this.backoffMs = opts.backoffMs ?? 250;
    this.sleep = opts.sleep ?? defaultSleep;
  }

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= this.maxRetries; attempt++) {
      if (attempt > 0) {
        await this.sleep(this.backoffMs * 2 ** (attempt - 1));
      }
      let response;
      try {
        response = await this.fetchImpl(this.baseUrl + path, {
          method,
          headers:
            body === undefined ? {} : { "Content-Type": "application/json" },
          body: body === undefined ? undefined : JSON.stringify(body),
        });
      } catch (err) {
        lastError = err; // network failure: retry
        continue;
      }
      if (response.status >= 500) {
        lastError = new ApiError(
          `server error ${response.status}`,
          response.status,
        );
        continue;
      }
      const payload = await response.json();
      if (response.status >= 400) {
        const { reason, message } = extractReason(payload);
        throw new ApiError(message, response.status, reason);
      }
      return payload as T;
    }
    throw lastError instanceof Error
      ? lastError
      : new ApiError("request failed after retries", 0);
  }

  nextQuestion(annotator: string): Promise<NextQuestionResponse> {
    return this.request(
      "GET",
      `/api/questions/next?annotator=${encodeURIComponent(annotator)}`,
    );
  }

  getQuestion(id: string): Promise<Question> {
    return this.request("GET", `/api/questions/${encodeURIComponent(id)}`);
  }

  submitAnnotation(body: AnnotationBody): Promise<SubmitResponse> {
    return this.request("POST", "/api/annotations", body);
  }

  exportRecords(): Promise<ExportResponse> {
    return this.request("GET", "/api/export");
  }

  selection(): Promise<SelectionResponse> {
    return this.request("GET", "/api/selection");
  }
}
