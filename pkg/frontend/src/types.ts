// Mirrors of the GCS HTTP API payloads (see ../PROTOCOL.md and /api/* routes).

export interface Position {
  t_ms: number;
  x: number;
  y: number;
  heading: number;
  speed: number;
}

export interface PowerInfo {
  soc_wh: number;
  solar_w: number;
  load_w: number;
}

export interface TrashInfo {
  payload_kg: number;
  items: number;
}

export interface Snapshot {
  last_heartbeat_ms: number | null;
  mode: number | null;
  armed: boolean;
  position: Position | null;
  power: PowerInfo | null;
  trash: TrashInfo | null;
  alert_count: number;
  link_ok: boolean;
}

export interface EventRecord {
  seq: number;
  t_ms: number;
  kind: "TELEMETRY" | "ALERT" | "COMMAND" | "ACK" | "SYSTEM";
  body: Record<string, unknown>;
}

export interface Waypoint {
  x: number;
  y: number;
  radius: number;
}

export type CommandName =
  | "ARM"
  | "DISARM"
  | "START"
  | "HOLD"
  | "RTL"
  | "CONVEYOR_ON"
  | "CONVEYOR_OFF";

export const MODE_NAMES: Record<number, string> = {
  0: "DISARMED",
  1: "ARMED",
  2: "MISSION",
  3: "HOLD",
  4: "RTL",
  5: "COMPLETE",
};

export interface SubmitResult {
  accepted: boolean;
  reason?: string;
}
