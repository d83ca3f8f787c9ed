// Ride controls: arrow keys ramp the virtual treadmill, left/right keys or
// the handlebar dial steer. Every change emits exactly one input message;
// out-of-range requests are clamped client-side and flagged.

import { InputMessage } from "./protocol.js";

export const RPS_STEP = 0.25; // four presses reach the default saturation point
export const HANDLEBAR_KEY_STEP_DEG = 5.0;
export const HANDLEBAR_LIMIT_DEG = 180.0;

export class RideControls {
  rpsTarget = 0;
  handlebarDeg = 0;
  releaseToCenter = false;
  lastClamped = false;

  constructor(private readonly maxRps: number = 5.0) {}

  /** Map one key press to an input message, or null for unbound keys. */
  handleKey(key: string): InputMessage | null {
    switch (key) {
      case "ArrowUp":
        return this.setRps(this.rpsTarget + RPS_STEP);
      case "ArrowDown":
        return this.setRps(this.rpsTarget - RPS_STEP);
      case "ArrowLeft":
        return this.setHandlebar(this.handlebarDeg - HANDLEBAR_KEY_STEP_DEG);
      case "ArrowRight":
        return this.setHandlebar(this.handlebarDeg + HANDLEBAR_KEY_STEP_DEG);
      case "c":
        return this.toggleReleaseToCenter();
      case " ":
        return this.setRps(0);
      default:
        return null;
    }
  }

  setRps(target: number): InputMessage {
    const clamped = Math.max(-this.maxRps, Math.min(this.maxRps, target));
    this.lastClamped = clamped !== target;
    this.rpsTarget = clamped;
    return this.message();
  }

  setHandlebar(deg: number): InputMessage {
    const clamped = Math.max(-HANDLEBAR_LIMIT_DEG, Math.min(HANDLEBAR_LIMIT_DEG, deg));
    this.lastClamped = clamped !== deg;
    this.handlebarDeg = clamped;
    return this.message();
  }

  /** Toggling release-to-center snaps the handlebar back to straight. */
  toggleReleaseToCenter(): InputMessage {
    this.releaseToCenter = !this.releaseToCenter;
    if (this.releaseToCenter) {
      return this.setHandlebar(0);
    }
    return this.message();
  }

  message(): InputMessage {
    return { type: "input", rps_target: this.rpsTarget, handlebar_deg: this.handlebarDeg };
  }
}
