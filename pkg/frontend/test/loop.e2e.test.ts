/** End-to-end loop against the real session server: spawn it, calibrate over
 * the websocket, run the slide-advance gesture, and check both the deck
 * update latency and that replaying the recorded stream reproduces the state.
 */

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { WebSocket } from "ws";

import type { LaserMessage, SessionUpdate } from "../src/protocol.js";
import { applyUpdate, initialState, replay, type UiState } from "../src/state.js";

const SCREEN_W = 1024;
const SCREEN_H = 768;
const NORM_CORNERS: ReadonlyArray<readonly [number, number]> = [
  [0, 0],
  [1, 0],
  [1, 1],
  [0, 1],
];

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr !== null && typeof addr === "object") {
        const { port } = addr;
        srv.close(() => resolve(port));
      } else {
        srv.close(() => reject(new Error("could not allocate a port")));
      }
    });
  });
}

async function waitForServer(url: string, budgetMs: number): Promise<void> {
  const deadline = Date.now() + budgetMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(url);
      if (res.ok) {
        return;
      }
    } catch (err) {
      lastError = err;
    }
    await sleep(200);
  }
  throw new Error(`server did not come up at ${url}: ${String(lastError)}`);
}

describe("operator console loop against the live server", () => {
  let child: ChildProcess;
  let port: number;
  let stderr = "";

  beforeAll(async () => {
    port = await freePort();
    child = spawn("python3", ["-m", "laps.cli", "serve", "--port", String(port)], {
      stdio: ["ignore", "ignore", "pipe"],
    });
    child.stderr?.on("data", (chunk: Buffer) => {
      stderr += chunk.toString();
    });
    try {
      await waitForServer(`http://127.0.0.1:${port}/healthz`, 30000);
    } catch (err) {
      throw new Error(`${String(err)}\nserver stderr:\n${stderr}`);
    }
  });

  afterAll(async () => {
    if (child && child.exitCode === null) {
      child.kill("SIGTERM");
      await Promise.race([new Promise((resolve) => child.once("exit", resolve)), sleep(5000)]);
      if (child.exitCode === null) {
        child.kill("SIGKILL");
      }
    }
  });

  it("healthz answers", async () => {
    const res = await fetch(`http://127.0.0.1:${port}/healthz`);
    expect(res.status).toBe(200);
  });

  it("calibrates, advances the deck within 500 ms, and replays identically", async () => {
    const ws = new WebSocket(`ws://127.0.0.1:${port}/session`);
    const updates: SessionUpdate[] = [];
    let state: UiState = initialState();

    ws.on("message", (data) => {
      const update = JSON.parse(data.toString()) as SessionUpdate;
      updates.push(update);
      state = applyUpdate(state, update);
    });
    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });

    async function waitFor(
      pred: (u: SessionUpdate) => boolean,
      what: string,
      timeoutMs = 15000,
    ): Promise<void> {
      const deadline = Date.now() + timeoutMs;
      while (Date.now() < deadline) {
        if (updates.some(pred)) {
          return;
        }
        await sleep(5);
      }
      throw new Error(`timed out waiting for ${what}; stderr:\n${stderr}`);
    }

    let seq = 0;
    function laser(on: boolean, x = 0, y = 0): void {
      seq += 1;
      const msg: LaserMessage = { type: "laser", seq, on, x, y };
      ws.send(JSON.stringify(msg));
    }

    try {
      // calibration: ten steady samples per corner in display order
      ws.send(JSON.stringify({ type: "start_calibration" }));
      for (const [cx, cy] of NORM_CORNERS) {
        for (let i = 0; i < 10; i++) {
          laser(true, cx, cy);
        }
      }
      await waitFor(
        (u) => u.type === "calibration" && u.done,
        "calibration to complete",
      );

      // the slide-advance gesture: lower-left, pause, middle, pause, upper-right
      const gesture: Array<[boolean, number, number]> = [
        [true, 150 / (SCREEN_W - 1), 700 / (SCREEN_H - 1)],
        [false, 0, 0],
        [false, 0, 0],
        [true, 512 / (SCREEN_W - 1), 384 / (SCREEN_H - 1)],
        [false, 0, 0],
        [false, 0, 0],
        [false, 0, 0],
        [false, 0, 0],
      ];
      for (const [on, x, y] of gesture) {
        laser(on, x, y);
      }
      const sentFinalAt = Date.now();
      laser(true, 900 / (SCREEN_W - 1), 100 / (SCREEN_H - 1));
      await waitFor(
        (u) => u.type === "event" && u.kind === "NextSlide",
        "the NextSlide event",
      );
      const latencyMs = Date.now() - sentFinalAt;
      expect(latencyMs).toBeLessThanOrEqual(500);

      // settle so every update for the sent messages has been recorded
      await sleep(300);

      expect(state.calibrated).toBe(true);
      expect(state.slide).toBe(2);
      expect(state.ticker).toContainEqual({ kind: "NextSlide", frame: 8 });
      const eventUpdates = updates.filter((u) => u.type === "event");
      expect(eventUpdates.map((u) => [u.kind, u.frame])).toEqual([["NextSlide", 8]]);
      // one frame_result per accepted laser message: 40 calibration + 9 gesture
      const frameResults = updates.filter((u) => u.type === "frame_result");
      expect(frameResults).toHaveLength(49);
      expect(updates.some((u) => u.type === "error")).toBe(false);

      // replaying the recorded stream reproduces the incrementally folded state
      expect(replay(updates)).toEqual(state);
    } finally {
      ws.close();
    }
  });
});
