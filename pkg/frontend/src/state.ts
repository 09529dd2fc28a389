/** DOM-free application state: session lifecycle, the card queue with
 *  optimistic removal and rollback, metrics refresh, and polling. A render
 *  callback is invoked after every state change. */

import {
  ApiError,
  Client,
  OfflineError,
  type MetricsStep,
  type QueryCard,
  type SessionConfig,
  type SessionInfo,
} from "./api.js";

export type View = "setup" | "label";

export interface Toast {
  kind: "info" | "error";
  message: string;
}

export interface AppState {
  view: View;
  session: SessionInfo | null;
  cards: QueryCard[];
  focusIndex: number;
  metrics: MetricsStep[];
  modelVersion: number;
  setupErrors: string[];
  offline: boolean;
  busy: boolean;
  toasts: Toast[];
}

export class App {
  state: AppState = {
    view: "setup",
    session: null,
    cards: [],
    focusIndex: 0,
    metrics: [],
    modelVersion: 0,
    setupErrors: [],
    offline: false,
    busy: false,
    toasts: [],
  };

  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    readonly client: Client,
    readonly render: (state: AppState) => void,
  ) {}

  private touch(): void {
    this.render(this.state);
  }

  private toast(kind: Toast["kind"], message: string): void {
    this.state.toasts.push({ kind, message });
    if (this.state.toasts.length > 4) this.state.toasts.shift();
    this.touch();
  }

  dismissToasts(): void {
    this.state.toasts = [];
    this.touch();
  }

  /** Setup view: create the session; 400/422 details become field errors. */
  async createSession(coreCsv: string, config: SessionConfig, testCsv?: string):
      Promise<boolean> {
    this.state.setupErrors = [];
    this.state.busy = true;
    this.touch();
    try {
      const session = await this.client.createSession(coreCsv, config, testCsv);
      this.state.session = session;
      this.state.view = "label";
      this.state.offline = false;
      await this.refreshMetrics();
      await this.refreshQueue();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.setupErrors = [err.detail];
      } else if (err instanceof OfflineError) {
        this.state.offline = true;
      } else {
        this.state.setupErrors = [String(err)];
      }
      return false;
    } finally {
      this.state.busy = false;
      this.touch();
    }
  }

  async refreshQueue(): Promise<void> {
    if (!this.state.session) return;
    try {
      const cards = await this.client.getQueries(this.state.session.session_id);
      this.state.offline = false;
      // keep cards the annotator is mid-way through; append the new ones
      const known = new Set(this.state.cards.map((c) => c.query_id));
      for (const card of cards) {
        if (!known.has(card.query_id)) this.state.cards.push(card);
      }
      const fresh = new Set(cards.map((c) => c.query_id));
      this.state.cards = this.state.cards.filter((c) => fresh.has(c.query_id));
      this.clampFocus();
    } catch (err) {
      this.noteFailure(err, "could not refresh the queue");
    }
    this.touch();
  }

  async refreshMetrics(): Promise<void> {
    if (!this.state.session) return;
    try {
      this.state.metrics = await this.client.getMetrics(this.state.session.session_id);
      this.state.offline = false;
      const last = this.state.metrics[this.state.metrics.length - 1];
      if (last) this.state.modelVersion = last.model_version;
    } catch (err) {
      this.noteFailure(err, "could not refresh metrics");
    }
    this.touch();
  }

  /** Optimistically remove the card, roll back if the post fails. */
  async label(queryId: string, label: 0 | 1): Promise<void> {
    if (!this.state.session) return;
    const index = this.state.cards.findIndex((c) => c.query_id === queryId);
    if (index < 0) return;
    const [card] = this.state.cards.splice(index, 1);
    this.clampFocus();
    this.touch();
    try {
      const result = await this.client.postLabels(this.state.session.session_id, [
        { query_id: queryId, label },
      ]);
      this.state.offline = false;
      if (result.model_version !== this.state.modelVersion) {
        this.state.modelVersion = result.model_version;
        await this.refreshMetrics(); // batch completed: the chart gains a point
      }
      if (this.state.cards.length === 0) {
        await this.refreshQueue();
      }
    } catch (err) {
      this.state.cards.splice(Math.min(index, this.state.cards.length), 0, card!);
      this.clampFocus();
      if (err instanceof ApiError && err.status === 409) {
        this.toast("error", `label conflict: ${err.detail}`);
      } else {
        this.noteFailure(err, "label post failed; card restored");
      }
    }
    this.touch();
  }

  moveFocus(delta: number): void {
    if (this.state.cards.length === 0) return;
    const n = this.state.cards.length;
    this.state.focusIndex = (this.state.focusIndex + delta + n) % n;
    this.touch();
  }

  labelFocused(label: 0 | 1): Promise<void> {
    const card = this.state.cards[this.state.focusIndex];
    if (!card) return Promise.resolve();
    return this.label(card.query_id, label);
  }

  private clampFocus(): void {
    if (this.state.focusIndex >= this.state.cards.length) {
      this.state.focusIndex = Math.max(0, this.state.cards.length - 1);
    }
  }

  private noteFailure(err: unknown, context: string): void {
    if (err instanceof OfflineError) {
      this.state.offline = true;
    } else if (err instanceof ApiError) {
      this.toast("error", `${context}: ${err.detail}`);
    } else {
      this.toast("error", `${context}: ${String(err)}`);
    }
  }

  startPolling(intervalMs: number): void {
    this.stopPolling();
    this.timer = setInterval(() => {
      if (this.state.view === "label" && !this.state.busy) {
        void this.refreshQueue();
      }
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
