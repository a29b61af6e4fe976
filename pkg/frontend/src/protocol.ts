/** Wire schema for the session server plus the console's local updates. */

export interface LaserMessage {
  type: "laser";
  seq: number;
  on: boolean;
  x: number; // normalized [0, 1]
  y: number; // normalized [0, 1]
}

export interface StartCalibrationMessage {
  type: "start_calibration";
}

export interface ResetMessage {
  type: "reset";
}

export interface ConfigMessage {
  type: "config";
  scene?: Record<string, unknown>;
  detector?: Record<string, unknown>;
  controller?: Record<string, unknown>;
  background?: Record<string, unknown>;
}

export type SessionMessage =
  | LaserMessage
  | StartCalibrationMessage
  | ResetMessage
  | ConfigMessage;

export interface FrameResultUpdate {
  type: "frame_result";
  seq: number;
  detected: boolean;
  camera: [number, number] | null;
  screen: [number, number] | null;
  mode: string;
  region: string | null;
}

export interface EventUpdate {
  type: "event";
  kind: string;
  frame: number;
  x?: number;
  y?: number;
}

export interface CalibrationUpdate {
  type: "calibration";
  corner: number;
  samples: number;
  done: boolean;
}

export interface InfoUpdate {
  type: "info";
  text: string;
}

export interface ErrorUpdate {
  type: "error";
  message: string;
}

/** Local (non-server) updates so the UI stays a pure fold over one stream. */
export interface ConnectionUpdate {
  type: "connection";
  status: "connecting" | "open" | "closed";
}

export interface BeamUpdate {
  type: "beam";
  on: boolean;
}

export type SessionUpdate =
  | FrameResultUpdate
  | EventUpdate
  | CalibrationUpdate
  | InfoUpdate
  | ErrorUpdate
  | ConnectionUpdate
  | BeamUpdate;
