// Cockpit view state: everything rendered on screen lives here, and every
// value in it originates from a received server message. Network events and
// input events both funnel through this single reducer.

import { Command, LinkCounters, RideInput, ServerMessage, StateMessage, parseServerMessage } from "./protocol.js";

export const POSE_RING_CAPACITY = 600;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface TimedPose {
  t_us: number;
  x: number;
  y: number;
  heading_deg: number;
}

export class CockpitStore {
  readonly ring: TimedPose[] = [];
  command: Command | null = null;
  link: LinkCounters | null = null;
  serverInput: RideInput | null = null;
  status: ConnectionStatus = "connecting";
  malformedCount = 0;
  refusals: string[] = [];
  lastMessageAt = 0;

  /** Feed one raw frame from the wire; malformed frames are counted, never thrown. */
  ingest(raw: string, nowMs: number): ServerMessage | null {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.malformedCount += 1;
      return null;
    }
    this.lastMessageAt = nowMs;
    if (msg.type === "refused") {
      this.refusals.push(msg.reason);
      return msg;
    }
    this.applyState(msg);
    return msg;
  }

  private applyState(msg: StateMessage): void {
    // The ring is keyed by t_us: replayed frames after a reconnect must not
    // duplicate history.
    const last = this.ring[this.ring.length - 1];
    if (last === undefined || msg.t_us > last.t_us) {
      this.ring.push({ t_us: msg.t_us, ...msg.pose });
      if (this.ring.length > POSE_RING_CAPACITY) {
        this.ring.splice(0, this.ring.length - POSE_RING_CAPACITY);
      }
    }
    this.command = msg.cmd;
    this.link = msg.link;
    this.serverInput = msg.input;
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  poseList(): TimedPose[] {
    return [...this.ring];
  }

  currentPose(): TimedPose | null {
    return this.ring[this.ring.length - 1] ?? null;
  }
}
