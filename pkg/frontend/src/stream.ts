// SSE subscription with exponential-backoff reconnect. The EventSource
// factory is injectable so the reconnect behavior is testable without a
// browser.

export interface EventSourceLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamCallbacks {
  onFrame(data: string): void;
  onStatus(status: "connecting" | "connected" | "reconnecting"): void;
}

const INITIAL_BACKOFF_MS = 500;
const MAX_BACKOFF_MS = 5000;

export class StreamSubscription {
  private source: EventSourceLike | null = null;
  private backoff = INITIAL_BACKOFF_MS;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(
    private url: string,
    private callbacks: StreamCallbacks,
    private factory: EventSourceFactory,
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  ) {}

  start(): void {
    this.callbacks.onStatus("connecting");
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    this.source = this.factory(this.url);
    this.source.onopen = () => {
      this.backoff = INITIAL_BACKOFF_MS;
      this.callbacks.onStatus("connected");
    };
    this.source.onmessage = (ev) => this.callbacks.onFrame(ev.data);
    this.source.onerror = () => {
      if (this.closed) return;
      this.callbacks.onStatus("reconnecting");
      this.source?.close();
      this.source = null;
      const delay = this.backoff;
      this.backoff = Math.min(this.backoff * 2, MAX_BACKOFF_MS);
      this.timer = this.schedule(() => this.connect(), delay);
    };
  }

  get currentBackoff(): number {
    return this.backoff;
  }

  close(): void {
    this.closed = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.source?.close();
    this.source = null;
  }
}
