/** Pointer-to-laser bridge: a fixed-rate ticker that turns the tracked
 * pointer position and beam toggle into normalized laser messages with a
 * strictly increasing sequence number.
 */

import type { LaserMessage } from "./protocol.js";

export interface LaserSink {
  send(msg: LaserMessage): void;
  readonly ready: boolean;
}

export const DEFAULT_TICK_HZ = 30;

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

/** Normalize a client-space pointer position against a canvas rectangle. */
export function normalizePointer(
  rect: { left: number; top: number; width: number; height: number },
  clientX: number,
  clientY: number,
): { x: number; y: number } {
  return {
    x: clamp01((clientX - rect.left) / rect.width),
    y: clamp01((clientY - rect.top) / rect.height),
  };
}

export class PointerLoop {
  private seq = 0;
  private x = 0.5;
  private y = 0.5;
  private beam = false;
  private timer: ReturnType<typeof setInterval> | null = null;
  /** Messages dropped because the sink was not ready. */
  dropped = 0;

  constructor(
    private readonly sink: LaserSink,
    readonly tickHz: number = DEFAULT_TICK_HZ,
  ) {
    if (tickHz <= 0) {
      throw new Error("tickHz must be positive");
    }
  }

  setPointer(x: number, y: number): void {
    this.x = clamp01(x);
    this.y = clamp01(y);
  }

  setBeam(on: boolean): void {
    this.beam = on;
  }

  get beamOn(): boolean {
    return this.beam;
  }

  get lastSeq(): number {
    return this.seq;
  }

  /** Emit one laser message (the ticker body; callable directly in tests). */
  tick(): LaserMessage | null {
    if (!this.sink.ready) {
      this.dropped += 1;
      return null;
    }
    this.seq += 1;
    const msg: LaserMessage = {
      type: "laser",
      seq: this.seq,
      on: this.beam,
      x: this.x,
      y: this.y,
    };
    this.sink.send(msg);
    return msg;
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => this.tick(), 1000 / this.tickHz);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
