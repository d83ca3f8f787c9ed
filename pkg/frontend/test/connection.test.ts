// Liveness watchdog and retry behavior, driven on fake timers.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { CockpitLink } from "../src/connection.js";
import { MockServer } from "./mock_socket.js";

type Status = "connecting" | "connected" | "disconnected";

function tracked() {
  const server = new MockServer();
  const statuses: Status[] = [];
  const messages: string[] = [];
  const link = new CockpitLink(
    "ws://test/ws",
    {
      onMessage: (raw) => messages.push(raw),
      onStatus: (status) => statuses.push(status),
    },
    server.factory,
  );
  return { server, statuses, messages, link };
}

describe("cockpit link", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("reports disconnected within a second of server silence", () => {
    const { server, statuses, link } = tracked();
    link.connect();
    server.current.open();
    expect(statuses).toEqual(["connecting", "connected"]);
    vi.advanceTimersByTime(999);
    expect(statuses.at(-1)).toBe("connected");
    vi.advanceTimersByTime(1);
    expect(statuses.at(-1)).toBe("disconnected");
  });

  it("messages keep the watchdog happy", () => {
    const { server, statuses, link } = tracked();
    link.connect();
    server.current.open();
    for (let i = 0; i < 10; i++) {
      vi.advanceTimersByTime(500);
      server.current.push("{}");
    }
    expect(statuses.at(-1)).toBe("connected");
  });

  it("retries with growing backoff after a drop", () => {
    const { server, statuses, link } = tracked();
    link.connect();
    server.current.open();
    server.current.drop();
    expect(statuses.at(-1)).toBe("disconnected");
    expect(server.sockets.length).toBe(1);
    vi.advanceTimersByTime(250); // first backoff step
    expect(server.sockets.length).toBe(2);
    server.current.drop();
    vi.advanceTimersByTime(250);
    expect(server.sockets.length).toBe(2); // doubled backoff not yet elapsed
    vi.advanceTimersByTime(250);
    expect(server.sockets.length).toBe(3);
  });

  it("send reports failure when no socket is up", () => {
    const { link } = tracked();
    expect(link.send("hello")).toBe(false);
  });

  it("dispose stops reconnecting", () => {
    const { server, link } = tracked();
    link.connect();
    server.current.open();
    link.dispose();
    vi.advanceTimersByTime(60000);
    expect(server.sockets.length).toBe(1);
    expect(server.current.closed).toBe(true);
  });
});
