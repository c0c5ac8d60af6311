// StreamClient against the stub: delivery, reconnect with backoff, parsing.

import { afterEach, beforeEach, expect, it } from "vitest";

import { StreamClient, StreamEvent, StreamStatus } from "../src/sse.js";
import { StubGcs, waitFor } from "./stub_server.js";

let stub: StubGcs;
let base: string;
let client: StreamClient | null = null;

beforeEach(async () => {
  stub = new StubGcs();
  base = await stub.start();
});

afterEach(async () => {
  client?.close();
  client = null;
  await stub.stop();
});

function connect(events: StreamEvent[], statuses: StreamStatus[]): StreamClient {
  client = new StreamClient(
    () => `${base}/api/stream`,
    {
      onEvent: (event) => events.push(event),
      onStatus: (status) => statuses.push(status),
    },
    20, // fast backoff for tests
  );
  client.start();
  return client;
}

it("delivers injected alerts with their payload", async () => {
  const events: StreamEvent[] = [];
  connect(events, []);
  await waitFor(() => stub.streamCount === 1);
  stub.injectAlert(3, 777, 2);
  const alert = await waitFor(() => events.find((e) => e.kind === "alert"));
  const body = (alert.data as { body: { count: number; camera_id: number } }).body;
  expect(body.count).toBe(3);
  expect(body.camera_id).toBe(2);
});

it("reconnects with backoff after the stream drops", async () => {
  const events: StreamEvent[] = [];
  const statuses: StreamStatus[] = [];
  connect(events, statuses);
  await waitFor(() => stub.streamCount === 1);

  stub.dropStreams();
  await waitFor(() => stub.streamCount === 1, 3000);
  expect(statuses).toContain("reconnecting");

  stub.injectAlert(1);
  await waitFor(() => events.some((e) => e.kind === "alert"));
});

it("skips keepalive comments and parses multiple frames per chunk", async () => {
  const events: StreamEvent[] = [];
  connect(events, []);
  await waitFor(() => stub.streamCount === 1);
  stub.injectAlert(1);
  stub.injectAlert(2);
  await waitFor(() => events.length === 2);
  const counts = events.map((e) => (e.data as { body: { count: number } }).body.count);
  expect(counts).toEqual([1, 2]);
});
