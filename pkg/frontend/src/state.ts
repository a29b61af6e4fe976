/** Console state and its reducer.
 *
 * The UI is a pure fold: `applyUpdate(state, update)` returns a fresh state
 * and never mutates its input, so replaying a recorded update stream
 * reproduces the exact same final state. All gesture logic lives on the
 * server; the deck, marks, and ticker change only in response to server
 * events.
 */

import type { SessionUpdate } from "./protocol.js";

export const SCREEN_W = 1024;
export const SCREEN_H = 768;

/** Corner names in calibration order. */
export const CORNER_NAMES = [
  "top-left",
  "top-right",
  "bottom-right",
  "bottom-left",
] as const;

export interface CalibrationState {
  active: boolean;
  corner: number; // 0..3 while collecting, 4 when done
  samples: number;
  samplesPerCorner: number;
  done: boolean;
}

export interface Mark {
  /** Polyline of a completed drag, screen coordinates. */
  points: Array<[number, number]>;
}

export interface TickerEntry {
  kind: string;
  frame: number;
}

export interface ClickFlash {
  kind: "LeftClick" | "DoubleClick" | "RightClick";
  x: number;
  y: number;
  frame: number;
}

export type InfoCorner = "top-left" | "top-right";

export interface UiState {
  connection: "connecting" | "open" | "closed";
  beamOn: boolean;
  /** Latest pipeline outputs. */
  spotDetected: boolean;
  cursor: [number, number] | null; // mapped screen point
  mode: string;
  region: string | null;
  /** Info box. */
  infoText: string;
  infoCorner: InfoCorner;
  /** Calibration progress. */
  calibration: CalibrationState;
  calibrated: boolean;
  /** Mock deck. */
  slide: number;
  marks: Mark[];
  dragPath: Array<[number, number]> | null;
  lastClick: ClickFlash | null;
  /** Recent events, newest last. */
  ticker: TickerEntry[];
  lastError: string | null;
}

export const TICKER_LIMIT = 50;

export function initialState(): UiState {
  return {
    connection: "closed",
    beamOn: false,
    spotDetected: false,
    cursor: null,
    mode: "Normal",
    region: null,
    infoText: "Not connected",
    infoCorner: "top-left",
    calibration: { active: false, corner: 0, samples: 0, samplesPerCorner: 10, done: false },
    calibrated: false,
    slide: 1,
    marks: [],
    dragPath: null,
    lastClick: null,
    ticker: [],
    lastError: null,
  };
}

/** The info box dodges the laser: top-left corner occupancy moves it right. */
export function infoCornerFor(cursor: [number, number] | null): InfoCorner {
  if (cursor && cursor[0] < SCREEN_W / 3 && cursor[1] < SCREEN_H / 3) {
    return "top-right";
  }
  return "top-left";
}

function pushTicker(ticker: TickerEntry[], entry: TickerEntry): TickerEntry[] {
  const next = [...ticker, entry];
  return next.length > TICKER_LIMIT ? next.slice(next.length - TICKER_LIMIT) : next;
}

function applyEvent(state: UiState, kind: string, frame: number, x?: number, y?: number): UiState {
  const next: UiState = { ...state, ticker: state.ticker, marks: state.marks };
  if (kind !== "MouseMove") {
    next.ticker = pushTicker(state.ticker, { kind, frame });
  }
  switch (kind) {
    case "NextSlide":
      next.slide = state.slide + 1;
      next.marks = [];
      next.dragPath = null;
      break;
    case "PrevSlide":
      next.slide = Math.max(1, state.slide - 1);
      next.marks = [];
      next.dragPath = null;
      break;
    case "MouseMove":
      if (state.dragPath && x !== undefined && y !== undefined) {
        next.dragPath = [...state.dragPath, [x, y]];
      }
      break;
    case "DragStart":
      if (x !== undefined && y !== undefined) {
        next.dragPath = [[x, y]];
      }
      break;
    case "DragEnd":
      if (state.dragPath) {
        const points = [...state.dragPath];
        if (x !== undefined && y !== undefined) {
          points.push([x, y]);
        }
        next.marks = [...state.marks, { points }];
        next.dragPath = null;
      }
      break;
    case "LeftClick":
    case "DoubleClick":
    case "RightClick":
      if (x !== undefined && y !== undefined) {
        next.lastClick = { kind, x, y, frame };
      }
      break;
    default:
      // MouseModeOn/Off, DragArmed, RightClickArmed need no extra state:
      // the mode string in frame_result already reflects them
      break;
  }
  return next;
}

/** Pure reducer over the (server + local) update stream. */
export function applyUpdate(state: UiState, update: SessionUpdate): UiState {
  switch (update.type) {
    case "connection":
      return { ...state, connection: update.status };
    case "beam":
      return { ...state, beamOn: update.on };
    case "frame_result": {
      const cursor = update.screen ?? null;
      return {
        ...state,
        spotDetected: update.detected,
        cursor,
        mode: update.mode,
        region: update.region ?? null,
        infoCorner: infoCornerFor(cursor),
      };
    }
    case "event":
      return applyEvent(state, update.kind, update.frame, update.x, update.y);
    case "calibration": {
      const calibration: CalibrationState = {
        active: !update.done,
        corner: update.done ? 4 : update.corner,
        samples: update.samples,
        samplesPerCorner: state.calibration.samplesPerCorner,
        done: update.done,
      };
      return {
        ...state,
        calibration,
        calibrated: update.done ? true : state.calibrated,
      };
    }
    case "info":
      return { ...state, infoText: update.text };
    case "error":
      return { ...state, lastError: update.message };
    default: {
      console.warn("ignoring unknown session update", update);
      return state;
    }
  }
}

/** Fold a whole stream; used for replay and by tests. */
export function replay(updates: readonly SessionUpdate[], start?: UiState): UiState {
  let state = start ?? initialState();
  for (const update of updates) {
    state = applyUpdate(state, update);
  }
  return state;
}
