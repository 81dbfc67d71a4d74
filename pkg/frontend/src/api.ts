// Typed client for the moderation service JSON API. The dashboard is
// served statically under /ui, so all paths are relative to that mount
// and no CORS configuration is needed.

export interface QueueRow {
  id: string;
  thread_ref: string;
  title: string;
  probability: number;
  updated_at: string;
  action_band: string;
}

export interface QueueView {
  threshold: number;
  rows: QueueRow[];
}

export interface Prediction {
  repo: string;
  number: number;
  strategy: string;
  scd_summary: string;
  probability: number;
  template_version: string;
  created_at: string;
  transcript: string;
  raw_scd_response: string;
  raw_probability_response: string;
  elided_comments: number;
}

export interface DispositionRecord {
  action_taken: string;
  error_category: string | null;
  note: string;
  actor: string;
  at: string;
}

export interface ThreadDetail {
  id: string;
  repo: string;
  number: number;
  title: string;
  kind: string;
  updated_at: string;
  latest_prediction: Prediction | null;
  action_band: string | null;
  dispositions: DispositionRecord[];
  comment_count: number;
  predictions: Prediction[];
}

export interface DispositionForm {
  action_taken: string;
  error_category?: string | null;
  note?: string;
  actor?: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: string;
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly info: ApiErrorBody,
  ) {
    super(info.message);
    this.name = "ServiceError";
  }
}

export const API_BASE = "..";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(API_BASE + path, init);
  } catch (err) {
    throw new ServiceError(0, {
      code: "unreachable",
      message: "moderation service unreachable",
      detail: String(err),
    });
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = null;
  }
  if (!response.ok) {
    const error = (body as { error?: ApiErrorBody } | null)?.error;
    throw new ServiceError(
      response.status,
      error ?? { code: "unknown", message: `HTTP ${response.status}`, detail: "" },
    );
  }
  return body as T;
}

export interface ApiClient {
  loadQueue(threshold: number): Promise<QueueView>;
  loadThread(id: string): Promise<ThreadDetail>;
  scoreThread(id: string, strategy: string): Promise<Prediction>;
  submitDisposition(id: string, form: DispositionForm): Promise<DispositionRecord>;
}

export const api: ApiClient = {
  loadQueue: (threshold) =>
    request<QueueView>(`/flagged?threshold=${encodeURIComponent(threshold)}`),
  loadThread: (id) => request<ThreadDetail>(`/threads/${encodeURIComponent(id)}`),
  scoreThread: (id, strategy) =>
    request<Prediction>(
      `/threads/${encodeURIComponent(id)}/score?strategy=${encodeURIComponent(strategy)}`,
      { method: "POST" },
    ),
  submitDisposition: (id, form) =>
    request<DispositionRecord>(`/threads/${encodeURIComponent(id)}/disposition`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(form),
    }),
};
