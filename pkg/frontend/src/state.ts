// Console state store. Pure logic, no DOM: the render layer subscribes and
// redraws, which keeps every behavior testable against a stub server.

import { EventRecord, Snapshot, Waypoint } from "./types.js";
import { StreamStatus } from "./sse.js";

export interface AlertToast {
  id: number;
  count: number;
  t_ms: number;
  camera_id: number;
}

export const DEFAULT_WAYPOINT_RADIUS = 3.0;
const FEED_CAPACITY = 200;
const BREADCRUMB_CAPACITY = 600;
export const MAX_VISIBLE_TOASTS = 4;

const EMPTY_SNAPSHOT: Snapshot = {
  last_heartbeat_ms: null,
  mode: null,
  armed: false,
  position: null,
  power: null,
  trash: null,
  alert_count: 0,
  link_ok: false,
};

export class UiState {
  snapshot: Snapshot = EMPTY_SNAPSHOT;
  draft: Waypoint[] = [];
  uploaded: Waypoint[] = [];
  feed: EventRecord[] = []; // ring buffer, newest last
  toasts: AlertToast[] = [];
  collapsedToasts = 0; // overflow beyond MAX_VISIBLE_TOASTS, never dropped silently
  breadcrumbs: Array<[number, number]> = [];
  connection: StreamStatus = "connecting";
  lastRejection: string | null = null;

  private nextToastId = 1;
  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  // -- snapshot / stream ----------------------------------------------------

  setSnapshot(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    if (snapshot.position) this.pushBreadcrumb(snapshot.position.x, snapshot.position.y);
    this.emit();
  }

  setConnection(status: StreamStatus): void {
    this.connection = status;
    this.emit();
  }

  applyStreamEvent(kind: string, record: EventRecord): void {
    this.pushFeed(record);
    if (kind === "alert") {
      const body = record.body as { count?: number; t_ms?: number; camera_id?: number };
      this.addToast(body.count ?? 0, body.t_ms ?? 0, body.camera_id ?? 0);
      this.snapshot = { ...this.snapshot, alert_count: body.count ?? this.snapshot.alert_count };
    } else if (kind === "telemetry") {
      const body = record.body as Record<string, unknown>;
      if (body.type === "POSITION") {
        const position = {
          t_ms: body.t_ms as number,
          x: body.x as number,
          y: body.y as number,
          heading: body.heading as number,
          speed: body.speed as number,
        };
        this.snapshot = { ...this.snapshot, position };
        this.pushBreadcrumb(position.x, position.y);
      } else if (body.type === "HEARTBEAT") {
        this.snapshot = {
          ...this.snapshot,
          mode: body.mode as number,
          armed: Boolean(body.armed),
          link_ok: true,
        };
      } else if (body.type === "POWER") {
        this.snapshot = {
          ...this.snapshot,
          power: {
            soc_wh: body.soc_wh as number,
            solar_w: body.solar_w as number,
            load_w: body.load_w as number,
          },
        };
      }
    }
    this.emit();
  }

  private pushFeed(record: EventRecord): void {
    this.feed.push(record);
    if (this.feed.length > FEED_CAPACITY) this.feed.splice(0, this.feed.length - FEED_CAPACITY);
  }

  private pushBreadcrumb(x: number, y: number): void {
    const last = this.breadcrumbs[this.breadcrumbs.length - 1];
    if (last && last[0] === x && last[1] === y) return;
    this.breadcrumbs.push([x, y]);
    if (this.breadcrumbs.length > BREADCRUMB_CAPACITY) {
      this.breadcrumbs.splice(0, this.breadcrumbs.length - BREADCRUMB_CAPACITY);
    }
  }

  // -- alert toasts -----------------------------------------------------------

  addToast(count: number, t_ms: number, camera_id: number): void {
    this.toasts.push({ id: this.nextToastId++, count, t_ms, camera_id });
    if (this.toasts.length > MAX_VISIBLE_TOASTS) {
      // Collapse the oldest into the "N more alerts" summary; never drop silently.
      const overflow = this.toasts.splice(0, this.toasts.length - MAX_VISIBLE_TOASTS);
      this.collapsedToasts += overflow.length;
    }
    this.emit();
  }

  dismissToast(id: number): void {
    this.toasts = this.toasts.filter((toast) => toast.id !== id);
    this.emit();
  }

  clearCollapsedSummary(): void {
    this.collapsedToasts = 0;
    this.emit();
  }

  // -- draft mission ----------------------------------------------------------

  addDraftWaypoint(x: number, y: number, radius = DEFAULT_WAYPOINT_RADIUS): void {
    this.draft.push({ x, y, radius });
    this.emit();
  }

  moveDraftWaypoint(index: number, x: number, y: number): void {
    const wp = this.draft[index];
    if (!wp) return;
    this.draft[index] = { ...wp, x, y };
    this.emit();
  }

  removeDraftWaypoint(index: number): void {
    this.draft.splice(index, 1);
    this.emit();
  }

  clearDraft(): void {
    this.draft = [];
    this.emit();
  }

  markUploaded(): void {
    this.uploaded = this.draft.map((wp) => ({ ...wp }));
    this.draft = [];
    this.emit();
  }

  setRejection(reason: string | null): void {
    this.lastRejection = reason;
    this.emit();
  }
}
