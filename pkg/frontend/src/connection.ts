// WebSocket binding with liveness watchdog and backoff retry. The socket
// factory is injectable so tests can drive the cockpit from a mock server.

export interface SocketLike {
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface LinkHandlers {
  onMessage(raw: string): void;
  onStatus(status: "connecting" | "connected" | "disconnected"): void;
}

const HEARTBEAT_MS = 1000; // server pushes at 30 Hz; a silent second is a dead link
const BACKOFF_INITIAL_MS = 250;
const BACKOFF_MAX_MS = 5000;

export class CockpitLink {
  private socket: SocketLike | null = null;
  private watchdog: ReturnType<typeof setTimeout> | null = null;
  private retry: ReturnType<typeof setTimeout> | null = null;
  private backoffMs = BACKOFF_INITIAL_MS;
  private disposed = false;

  constructor(
    private readonly url: string,
    private readonly handlers: LinkHandlers,
    private readonly factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  connect(): void {
    if (this.disposed) return;
    this.handlers.onStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = BACKOFF_INITIAL_MS;
      this.handlers.onStatus("connected");
      this.armWatchdog();
    };
    socket.onmessage = (event) => {
      this.armWatchdog();
      this.handlers.onMessage(event.data);
    };
    socket.onclose = () => this.dropped();
    socket.onerror = () => this.dropped();
  }

  send(data: string): boolean {
    if (this.socket === null) return false;
    try {
      this.socket.send(data);
      return true;
    } catch {
      return false;
    }
  }

  dispose(): void {
    this.disposed = true;
    this.clearTimers();
    this.socket?.close();
    this.socket = null;
  }

  private armWatchdog(): void {
    if (this.watchdog !== null) clearTimeout(this.watchdog);
    this.watchdog = setTimeout(() => this.dropped(), HEARTBEAT_MS);
  }

  private dropped(): void {
    if (this.disposed) return;
    this.clearTimers();
    if (this.socket !== null) {
      const socket = this.socket;
      this.socket = null;
      socket.onclose = null;
      socket.onerror = null;
      socket.close();
    }
    this.handlers.onStatus("disconnected");
    this.retry = setTimeout(() => this.connect(), this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
  }

  private clearTimers(): void {
    if (this.watchdog !== null) clearTimeout(this.watchdog);
    if (this.retry !== null) clearTimeout(this.retry);
    this.watchdog = null;
    this.retry = null;
  }
}
