// Thin client for the GCS operator API. Every behavior of the console goes
// through these routes; nothing else talks to the server.

import { CommandName, EventRecord, Snapshot, SubmitResult, Waypoint } from "./types.js";

export class ApiClient {
  constructor(
    private readonly base: string,
    private token: string | null = null,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  async getState(): Promise<Snapshot> {
    const resp = await fetch(`${this.base}/api/state`, { headers: this.headers() });
    if (!resp.ok) throw new Error(`state query failed: ${resp.status}`);
    return (await resp.json()) as Snapshot;
  }

  async getEvents(since = 0, limit = 200): Promise<EventRecord[]> {
    const resp = await fetch(
      `${this.base}/api/events?since=${since}&limit=${limit}`,
      { headers: this.headers() },
    );
    if (!resp.ok) throw new Error(`event query failed: ${resp.status}`);
    return ((await resp.json()) as { events: EventRecord[] }).events;
  }

  async postMission(waypoints: Waypoint[]): Promise<SubmitResult> {
    return this.post("/api/mission", { waypoints });
  }

  async postCommand(cmd: CommandName): Promise<SubmitResult> {
    return this.post("/api/command", { cmd });
  }

  private async post(path: string, body: unknown): Promise<SubmitResult> {
    const resp = await fetch(`${this.base}${path}`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
    const payload = (await resp.json()) as { result?: string; reason?: string; error?: string };
    if (resp.ok && payload.result === "accepted") return { accepted: true };
    return { accepted: false, reason: payload.reason ?? payload.error ?? `HTTP ${resp.status}` };
  }

  streamUrl(): string {
    const suffix = this.token ? `?token=${encodeURIComponent(this.token)}` : "";
    return `${this.base}/api/stream${suffix}`;
  }
}
