// Console wiring: API client + SSE stream + state store + DOM panels.
// index.html calls initApp(); tests call it against a stub server.

import { ApiClient } from "./api.js";
import { MapView } from "./map.js";
import { StreamClient } from "./sse.js";
import { UiState } from "./state.js";
import { ToastPane } from "./toast.js";
import { CommandName, EventRecord, MODE_NAMES } from "./types.js";

export interface AppOptions {
  base?: string;        // API origin; default same-origin
  pollMs?: number;      // /api/state poll fallback; 0 disables
  reconnectMs?: number; // SSE backoff base
}

export interface App {
  state: UiState;
  api: ApiClient;
  stream: StreamClient;
  stop: () => void;
}

const COMMANDS: CommandName[] = [
  "ARM", "DISARM", "START", "HOLD", "RTL", "CONVEYOR_ON", "CONVEYOR_OFF",
];

export function initApp(doc: Document, opts: AppOptions = {}): App {
  const base = opts.base ?? "";
  const state = new UiState();
  const api = new ApiClient(base, readToken(doc));
  const stream = new StreamClient(
    () => api.streamUrl(),
    {
      onEvent: (event) => state.applyStreamEvent(event.kind, event.data as unknown as EventRecord),
      onStatus: (status) => {
        state.setConnection(status);
        if (status === "reconnecting") {
          state.applyStreamEvent("system", {
            seq: 0,
            t_ms: Date.now(),
            kind: "SYSTEM",
            body: { type: "STREAM_GAP", note: "stream dropped; reconnecting" },
          });
        }
      },
    },
    opts.reconnectMs ?? 500,
  );

  new ToastPane(must(doc, "#toasts"), state);
  const canvas = doc.querySelector<HTMLCanvasElement>("#map");
  if (canvas) new MapView(canvas, state);

  wireButtons(doc, state, api);
  wirePanels(doc, state);

  const refresh = () => api.getState().then((snap) => state.setSnapshot(snap)).catch(() => {
    state.setSnapshot({ ...state.snapshot, link_ok: false });
  });
  void refresh();
  const pollMs = opts.pollMs ?? 2000;
  const poller = pollMs > 0 ? setInterval(refresh, pollMs) : null;
  stream.start();

  return {
    state,
    api,
    stream,
    stop: () => {
      stream.close();
      if (poller) clearInterval(poller);
    },
  };
}

function must(doc: Document, selector: string): HTMLElement {
  const el = doc.querySelector<HTMLElement>(selector);
  if (!el) throw new Error(`required element ${selector} missing`);
  return el;
}

function readToken(doc: Document): string | null {
  try {
    return doc.defaultView?.sessionStorage.getItem("skimwatch-token") ?? null;
  } catch {
    return null;
  }
}

function wireButtons(doc: Document, state: UiState, api: ApiClient): void {
  const bar = must(doc, "#commands");
  const buttons: HTMLButtonElement[] = [];
  for (const cmd of COMMANDS) {
    const button = doc.createElement("button");
    button.textContent = cmd.replace("_", " ");
    button.dataset.cmd = cmd;
    button.addEventListener("click", async () => {
      button.disabled = true; // optimistic disable until the ack round-trips
      const result = await api.postCommand(cmd);
      state.setRejection(result.accepted ? null : `${cmd}: ${result.reason}`);
      button.disabled = false;
    });
    bar.appendChild(button);
    buttons.push(button);
  }

  const upload = must(doc, "#upload") as HTMLButtonElement;
  upload.addEventListener("click", async () => {
    const result = await api.postMission(state.draft);
    if (result.accepted) {
      state.markUploaded();
      state.setRejection(null);
    } else {
      state.setRejection(`mission upload: ${result.reason}`);
    }
  });
  const clear = must(doc, "#clear-draft") as HTMLButtonElement;
  clear.addEventListener("click", () => state.clearDraft());

  const tokenForm = doc.querySelector<HTMLFormElement>("#token-form");
  tokenForm?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = tokenForm.querySelector<HTMLInputElement>("input");
    const token = input?.value.trim() || null;
    api.setToken(token);
    try {
      if (token) doc.defaultView?.sessionStorage.setItem("skimwatch-token", token);
    } catch {
      // private-mode storage failures are non-fatal
    }
  });

  state.subscribe(() => {
    const linkDown = !state.snapshot.link_ok;
    for (const button of buttons) {
      if (button.dataset.cmd) button.disabled = linkDown;
    }
    upload.disabled = linkDown || state.draft.length === 0;
  });
}

function wirePanels(doc: Document, state: UiState): void {
  const modeChip = must(doc, "#mode-chip");
  const linkChip = must(doc, "#link-chip");
  const alertBadge = must(doc, "#alert-badge");
  const rejection = must(doc, "#rejection");
  const telemetry = must(doc, "#telemetry");
  const feed = must(doc, "#feed");
  const draftList = must(doc, "#draft-list");

  let lastAlertCount = 0;
  state.subscribe(() => {
    const snap = state.snapshot;
    modeChip.textContent = snap.mode === null ? "-" : MODE_NAMES[snap.mode] ?? `mode ${snap.mode}`;
    linkChip.textContent = snap.link_ok ? `link ok (${state.connection})` : `link down (${state.connection})`;
    linkChip.className = snap.link_ok ? "chip ok" : "chip bad";

    alertBadge.textContent = String(snap.alert_count);
    if (snap.alert_count > lastAlertCount) {
      alertBadge.classList.remove("pulse");
      void (alertBadge as HTMLElement).offsetWidth; // restart the CSS animation
      alertBadge.classList.add("pulse");
    }
    lastAlertCount = snap.alert_count;

    rejection.textContent = state.lastRejection ?? "";
    rejection.style.display = state.lastRejection ? "block" : "none";

    const lines: string[] = [];
    if (snap.position) {
      lines.push(`pos (${snap.position.x.toFixed(1)}, ${snap.position.y.toFixed(1)}) m`);
      lines.push(`heading ${(snap.position.heading * 180 / Math.PI).toFixed(0)} deg, ` +
                 `speed ${snap.position.speed.toFixed(2)} m/s`);
    }
    if (snap.power) {
      lines.push(`battery ${snap.power.soc_wh.toFixed(1)} Wh ` +
                 `(solar ${snap.power.solar_w.toFixed(1)} W, load ${snap.power.load_w.toFixed(1)} W)`);
    }
    if (snap.trash) {
      lines.push(`payload ${snap.trash.payload_kg.toFixed(2)} kg, ${snap.trash.items} items`);
    }
    telemetry.textContent = lines.join("\n") || "no telemetry yet";

    feed.replaceChildren();
    for (const record of state.feed.slice(-12).reverse()) {
      const row = doc.createElement("div");
      const label = (record.body as { type?: string }).type ?? record.kind;
      row.textContent = `#${record.seq} ${record.kind} ${label}`;
      row.className = `feed-row feed-${record.kind.toLowerCase()}`;
      feed.appendChild(row);
    }

    draftList.replaceChildren();
    state.draft.forEach((wp, i) => {
      const row = doc.createElement("div");
      row.textContent = `${i + 1}. (${wp.x}, ${wp.y}) r=${wp.radius}`;
      const remove = doc.createElement("button");
      remove.textContent = "remove";
      remove.addEventListener("click", () => state.removeDraftWaypoint(i));
      row.appendChild(remove);
      draftList.appendChild(row);
    });
  });
}
