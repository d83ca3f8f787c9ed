// Wire schema shared with the state service: server pushes `state` (and
// `refused`) messages over /ws, the cockpit pushes `input` setpoints back.

export interface Pose {
  x: number;
  y: number;
  heading_deg: number;
}

export interface Command {
  throttle: number;
  steering_delta_deg: number;
}

export interface LinkCounters {
  received: number;
  applied: number;
  stale_dropped: number;
  corrupt_dropped: number;
}

export interface RideInput {
  rps_target: number;
  handlebar_deg: number;
  writer: string;
}

export interface StateMessage {
  type: "state";
  t_us: number;
  pose: Pose;
  cmd: Command;
  link: LinkCounters;
  input: RideInput;
}

export interface RefusedMessage {
  type: "refused";
  reason: string;
}

export type ServerMessage = StateMessage | RefusedMessage;

export interface InputMessage {
  type: "input";
  rps_target: number;
  handlebar_deg: number;
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function hasNumbers(obj: unknown, keys: string[]): boolean {
  if (typeof obj !== "object" || obj === null) return false;
  const rec = obj as Record<string, unknown>;
  return keys.every((k) => isFiniteNumber(rec[k]));
}

/** Parse one server frame; returns null for anything malformed (the caller
 * counts and ignores those — a bad frame must never take the cockpit down). */
export function parseServerMessage(raw: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null) return null;
  const msg = value as Record<string, unknown>;
  if (msg.type === "refused") {
    return typeof msg.reason === "string" ? { type: "refused", reason: msg.reason } : null;
  }
  if (msg.type !== "state") return null;
  if (!isFiniteNumber(msg.t_us)) return null;
  if (!hasNumbers(msg.pose, ["x", "y", "heading_deg"])) return null;
  if (!hasNumbers(msg.cmd, ["throttle", "steering_delta_deg"])) return null;
  if (!hasNumbers(msg.link, ["received", "applied", "stale_dropped", "corrupt_dropped"])) return null;
  const input = msg.input as Record<string, unknown>;
  if (!hasNumbers(msg.input, ["rps_target", "handlebar_deg"]) || typeof input.writer !== "string") {
    return null;
  }
  return msg as unknown as StateMessage;
}

/** Schema guard for outbound input messages; every control path must emit
 * messages that satisfy this. */
export function isValidInputMessage(value: unknown): value is InputMessage {
  if (typeof value !== "object" || value === null) return false;
  const msg = value as Record<string, unknown>;
  return (
    msg.type === "input" &&
    isFiniteNumber(msg.rps_target) &&
    isFiniteNumber(msg.handlebar_deg) &&
    msg.handlebar_deg >= -180 &&
    msg.handlebar_deg <= 180
  );
}
