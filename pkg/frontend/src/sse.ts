// Server-sent-events reader over fetch (EventSource cannot send the bearer
// header). Reconnects with exponential backoff and reports drops so the UI
// can show a gap marker.

export type StreamStatus = "connecting" | "open" | "reconnecting" | "closed";

export interface StreamEvent {
  kind: string; // "alert" | "telemetry" | "system"
  data: Record<string, unknown>;
}

interface StreamHandlers {
  onEvent: (event: StreamEvent) => void;
  onStatus?: (status: StreamStatus, detail?: string) => void;
}

export class StreamClient {
  private stopped = false;
  private attempt = 0;
  private controller: AbortController | null = null;

  constructor(
    private readonly url: () => string,
    private readonly handlers: StreamHandlers,
    private readonly baseDelayMs = 500,
    private readonly maxDelayMs = 8000,
  ) {}

  start(): void {
    this.stopped = false;
    void this.loop();
  }

  close(): void {
    this.stopped = true;
    this.controller?.abort();
    this.handlers.onStatus?.("closed");
  }

  private async loop(): Promise<void> {
    while (!this.stopped) {
      this.handlers.onStatus?.(this.attempt === 0 ? "connecting" : "reconnecting");
      try {
        await this.readOnce();
      } catch {
        // fall through to backoff
      }
      if (this.stopped) return;
      const delay = Math.min(this.maxDelayMs, this.baseDelayMs * 2 ** this.attempt);
      this.attempt += 1;
      await new Promise((resolve) => setTimeout(resolve, delay));
    }
  }

  private async readOnce(): Promise<void> {
    this.controller = new AbortController();
    const resp = await fetch(this.url(), {
      signal: this.controller.signal,
      headers: { Accept: "text/event-stream" },
    });
    if (!resp.ok || !resp.body) throw new Error(`stream HTTP ${resp.status}`);
    this.handlers.onStatus?.("open");
    this.attempt = 0;

    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { value, done } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let cut: number;
      while ((cut = buffer.indexOf("\n\n")) >= 0) {
        this.dispatch(buffer.slice(0, cut));
        buffer = buffer.slice(cut + 2);
      }
    }
    throw new Error("stream ended");
  }

  private dispatch(block: string): void {
    let kind = "message";
    const dataLines: string[] = [];
    for (const line of block.split("\n")) {
      if (line.startsWith(":")) continue; // keepalive comment
      if (line.startsWith("event: ")) kind = line.slice(7).trim();
      else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
    }
    if (!dataLines.length) return;
    try {
      const data = JSON.parse(dataLines.join("\n")) as Record<string, unknown>;
      this.handlers.onEvent({ kind, data });
    } catch {
      // malformed frame from a dying connection; the reconnect path handles it
    }
  }
}
