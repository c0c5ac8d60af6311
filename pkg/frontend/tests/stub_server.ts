// Scriptable GCS stub: canned /api/state, recorded POSTs with programmable
// responses, and an /api/stream SSE fanout with injection + drop hooks.

import http from "node:http";
import { AddressInfo } from "node:net";

export interface RecordedRequest {
  method: string;
  path: string;
  headers: http.IncomingHttpHeaders;
  body: unknown;
}

interface CannedResponse {
  status: number;
  payload: unknown;
}

export class StubGcs {
  requests: RecordedRequest[] = [];
  state: Record<string, unknown> = {
    last_heartbeat_ms: null,
    mode: 0,
    armed: false,
    position: null,
    power: null,
    trash: null,
    alert_count: 0,
    link_ok: false,
  };
  missionResponse: CannedResponse = { status: 200, payload: { result: "accepted" } };
  commandResponse: CannedResponse = { status: 200, payload: { result: "accepted" } };

  private server: http.Server;
  private streams = new Set<http.ServerResponse>();
  private nextSeq = 1;

  constructor() {
    this.server = http.createServer((req, res) => this.handle(req, res));
  }

  start(): Promise<string> {
    return new Promise((resolve) => {
      this.server.listen(0, "127.0.0.1", () => {
        const { port } = this.server.address() as AddressInfo;
        resolve(`http://127.0.0.1:${port}`);
      });
    });
  }

  stop(): Promise<void> {
    for (const res of this.streams) res.destroy();
    this.streams.clear();
    return new Promise((resolve) => this.server.close(() => resolve()));
  }

  get streamCount(): number {
    return this.streams.size;
  }

  injectAlert(count: number, t_ms = 1000, camera_id = 1): void {
    this.emit("alert", {
      seq: this.nextSeq++,
      t_ms,
      kind: "ALERT",
      body: { type: "FENCEALERT", t_ms, camera_id, count },
    });
  }

  injectTelemetry(body: Record<string, unknown>): void {
    this.emit("telemetry", {
      seq: this.nextSeq++,
      t_ms: Date.now(),
      kind: "TELEMETRY",
      body,
    });
  }

  dropStreams(): void {
    for (const res of this.streams) res.destroy();
    this.streams.clear();
  }

  private emit(kind: string, event: unknown): void {
    const frame = `event: ${kind}\ndata: ${JSON.stringify(event)}\n\n`;
    for (const res of this.streams) res.write(frame);
  }

  private handle(req: http.IncomingMessage, res: http.ServerResponse): void {
    const url = new URL(req.url ?? "/", "http://stub");
    // happy-dom applies the browser same-origin policy; the stub is a
    // foreign origin in tests, so it must speak CORS (the real GCS serves
    // the console same-origin and needs none of this).
    res.setHeader("Access-Control-Allow-Origin", "*");
    res.setHeader("Access-Control-Allow-Headers", "authorization, content-type, accept");
    res.setHeader("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    if (req.method === "OPTIONS") {
      res.writeHead(204);
      res.end();
      return;
    }
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => {
      const raw = Buffer.concat(chunks).toString();
      this.requests.push({
        method: req.method ?? "",
        path: url.pathname,
        headers: req.headers,
        body: raw ? JSON.parse(raw) : null,
      });

      if (url.pathname === "/api/state") {
        this.json(res, 200, this.state);
      } else if (url.pathname === "/api/events") {
        this.json(res, 200, { events: [] });
      } else if (url.pathname === "/api/mission") {
        this.json(res, this.missionResponse.status, this.missionResponse.payload);
      } else if (url.pathname === "/api/command") {
        this.json(res, this.commandResponse.status, this.commandResponse.payload);
      } else if (url.pathname === "/api/stream") {
        res.writeHead(200, {
          "Content-Type": "text/event-stream",
          "Cache-Control": "no-cache",
        });
        res.write(": connected\n\n");
        this.streams.add(res);
        res.on("close", () => this.streams.delete(res));
      } else {
        this.json(res, 404, { error: "not found" });
      }
    });
  }

  private json(res: http.ServerResponse, status: number, payload: unknown): void {
    const body = JSON.stringify(payload);
    res.writeHead(status, { "Content-Type": "application/json" });
    res.end(body);
  }
}

export function waitFor<T>(probe: () => T | null | undefined | false,
                           timeoutMs = 1000, stepMs = 10): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  return new Promise((resolve, reject) => {
    const attempt = () => {
      const value = probe();
      if (value) return resolve(value);
      if (Date.now() > deadline) return reject(new Error("waitFor timed out"));
      setTimeout(attempt, stepMs);
    };
    attempt();
  });
}
