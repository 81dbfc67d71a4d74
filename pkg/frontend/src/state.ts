// Dashboard state container. All numbers and texts held here are
// service response values verbatim; the only client-side mutation is
// the optimistic removal of a dismissed row, rolled back on API error.

import type {
  ApiClient,
  DispositionForm,
  QueueRow,
  ThreadDetail,
} from "./api.js";
import { ServiceError, api } from "./api.js";

export interface DashboardState {
  threshold: number;
  rows: QueueRow[];
  stale: boolean;
  error: string | null;
  selected: ThreadDetail | null;
  inlineError: string | null;
}

export type Listener = (state: DashboardState) => void;

function describe(err: unknown): string {
  if (err instanceof ServiceError) {
    return err.info.detail
      ? `${err.info.message} (${err.info.detail})`
      : err.info.message;
  }
  return String(err);
}

export class Dashboard {
  private state: DashboardState = {
    threshold: 0.5,
    rows: [],
    stale: false,
    error: null,
    selected: null,
    inlineError: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly client: ApiClient = api) {}

  getState(): DashboardState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<DashboardState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Re-query the flagged queue; on failure keep the last rows but mark
   * them stale and surface a banner. */
  async refreshQueue(): Promise<void> {
    try {
      const view = await this.client.loadQueue(this.state.threshold);
      this.update({ rows: view.rows, stale: false, error: null });
    } catch (err) {
      this.update({ stale: true, error: describe(err) });
    }
  }

  async setThreshold(threshold: number): Promise<void> {
    this.update({ threshold });
    await this.refreshQueue();
  }

  async select(id: string): Promise<void> {
    try {
      const detail = await this.client.loadThread(id);
      this.update({ selected: detail, inlineError: null });
    } catch (err) {
      this.update({ inlineError: describe(err) });
    }
  }

  closeDetail(): void {
    this.update({ selected: null, inlineError: null });
  }

  /** Trigger a fresh forecast, then reload the detail view and queue so
   * every displayed value is a stored service response. */
  async score(id: string, strategy: string): Promise<void> {
    try {
      await this.client.scoreThread(id, strategy);
    } catch (err) {
      this.update({ inlineError: describe(err) });
      return;
    }
    await this.select(id);
    await this.refreshQueue();
  }

  /** Submit a disposition. A dismissal removes the row optimistically;
   * the removal is rolled back if the service rejects it. */
  async submitDisposition(id: string, form: DispositionForm): Promise<void> {
    const previousRows = this.state.rows;
    if (form.action_taken === "dismissed") {
      this.update({ rows: previousRows.filter((row) => row.id !== id) });
    }
    try {
      await this.client.submitDisposition(id, form);
    } catch (err) {
      this.update({ rows: previousRows, inlineError: describe(err) });
      return;
    }
    if (this.state.selected?.id === id) {
      await this.select(id);
    }
    await this.refreshQueue();
  }
}
