// Wire messages for interactive sessions, mirroring the server schema.
// Every message carries the protocol version in "v". Server frames are
// validated on receipt and rejected with ProtocolError so the cockpit can
// show an error banner instead of rendering garbage.

export const PROTOCOL_VERSION = 1;

export type Vec2 = [number, number];
export type Axes = [number, number, number];

export interface Condition {
  roll_deg: number;
  pitch_deg: number;
  yaw_deg: number;
  correction: boolean;
}

export interface CameraRecord {
  focal_length_px: number;
  image_width_px: number;
  image_height_px: number;
  annulus_inner_px: number;
  annulus_outer_px: number;
  near_clip_mm: number;
}

export interface SimConfigRecord {
  roll_deg: number;
  pitch_deg: number;
  yaw_deg: number;
  correction: boolean;
  dt_s: number;
  max_duration_s: number;
  free_mode: boolean;
  intrinsics: CameraRecord;
}

export interface ViewRecord {
  sphere_center: Vec2;
  sphere_radius_px: number;
  cube_polygons: Vec2[][];
  annulus_px: Vec2;
  tick: number;
  visible: boolean;
}

export interface HelloMessage {
  v: number;
  type: "hello";
  config: SimConfigRecord;
  next_condition: Condition | null;
}

export interface StateFrameMessage {
  v: number;
  type: "state_frame";
  tick: number;
  view: ViewRecord;
  theta_deg: number;
  elapsed_s: number;
  status: "idle" | "running";
}

export interface TrialEndMessage {
  v: number;
  type: "trial_end";
  outcome: string;
  completion_time_s: number | null;
}

export interface ErrorMessage {
  v: number;
  type: "error";
  code: string;
  text: string;
}

export type ServerMessage =
  | HelloMessage
  | StateFrameMessage
  | TrialEndMessage
  | ErrorMessage;

export class ProtocolError extends Error {}

export function makeInput(seq: number, axes: Axes): object {
  return { v: PROTOCOL_VERSION, type: "input", seq, axes: [...axes] };
}

export function makeStartTrial(condition: Condition): object {
  return { v: PROTOCOL_VERSION, type: "start_trial", condition: { ...condition } };
}

export function makeToggleCorrection(): object {
  return { v: PROTOCOL_VERSION, type: "toggle_correction" };
}

export function makeAbortTrial(): object {
  return { v: PROTOCOL_VERSION, type: "abort_trial" };
}

export function encodeMessage(message: object): string {
  return JSON.stringify(message);
}

const finite = (value: unknown): value is number =>
  typeof value === "number" && Number.isFinite(value);

const isVec2 = (value: unknown): value is Vec2 =>
  Array.isArray(value) && value.length === 2 && value.every(finite);

const isRecord = (value: unknown): value is Record<string, unknown> =>
  typeof value === "object" && value !== null && !Array.isArray(value);

function requireCondition(value: unknown, where: string): Condition {
  if (!isRecord(value)) throw new ProtocolError(`${where} must be an object`);
  for (const key of ["roll_deg", "pitch_deg", "yaw_deg"]) {
    if (!finite(value[key])) {
      throw new ProtocolError(`${where}.${key} must be a finite number`);
    }
  }
  if (typeof value.correction !== "boolean") {
    throw new ProtocolError(`${where}.correction must be a boolean`);
  }
  return value as unknown as Condition;
}

function requireConfig(value: unknown): SimConfigRecord {
  if (!isRecord(value)) throw new ProtocolError("hello.config must be an object");
  const intrinsics = value.intrinsics;
  if (!isRecord(intrinsics)) {
    throw new ProtocolError("hello.config.intrinsics must be an object");
  }
  for (const key of [
    "image_width_px",
    "image_height_px",
    "annulus_inner_px",
    "annulus_outer_px",
  ]) {
    if (!finite(intrinsics[key])) {
      throw new ProtocolError(`hello.config.intrinsics.${key} must be a finite number`);
    }
  }
  if (!finite(value.dt_s) || (value.dt_s as number) <= 0) {
    throw new ProtocolError("hello.config.dt_s must be a positive number");
  }
  if (typeof value.correction !== "boolean") {
    throw new ProtocolError("hello.config.correction must be a boolean");
  }
  return value as unknown as SimConfigRecord;
}

function requireView(value: unknown): ViewRecord {
  if (!isRecord(value)) throw new ProtocolError("state_frame.view must be an object");
  if (!isVec2(value.sphere_center)) {
    throw new ProtocolError("view.sphere_center must be a pair of numbers");
  }
  if (!finite(value.sphere_radius_px)) {
    throw new ProtocolError("view.sphere_radius_px must be a finite number");
  }
  if (!isVec2(value.annulus_px)) {
    throw new ProtocolError("view.annulus_px must be a pair of numbers");
  }
  const polygons = value.cube_polygons;
  if (
    !Array.isArray(polygons) ||
    !polygons.every((polygon) => Array.isArray(polygon) && polygon.every(isVec2))
  ) {
    throw new ProtocolError("view.cube_polygons must be arrays of point pairs");
  }
  if (!Number.isInteger(value.tick) || (value.tick as number) < 0) {
    throw new ProtocolError("view.tick must be a non-negative integer");
  }
  if (typeof value.visible !== "boolean") {
    throw new ProtocolError("view.visible must be a boolean");
  }
  return value as unknown as ViewRecord;
}

export function decodeServerMessage(text: string): ServerMessage {
  let message: unknown;
  try {
    message = JSON.parse(text);
  } catch {
    throw new ProtocolError("invalid JSON");
  }
  if (!isRecord(message)) throw new ProtocolError("message must be a JSON object");
  if (message.v !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version ${JSON.stringify(message.v)}`);
  }
  switch (message.type) {
    case "hello": {
      const config = requireConfig(message.config);
      const next =
        message.next_condition == null
          ? null
          : requireCondition(message.next_condition, "hello.next_condition");
      return { v: PROTOCOL_VERSION, type: "hello", config, next_condition: next };
    }
    case "state_frame": {
      if (!Number.isInteger(message.tick) || (message.tick as number) < 0) {
        throw new ProtocolError("state_frame.tick must be a non-negative integer");
      }
      const view = requireView(message.view);
      if (!finite(message.theta_deg)) {
        throw new ProtocolError("state_frame.theta_deg must be a finite number");
      }
      if (!finite(message.elapsed_s)) {
        throw new ProtocolError("state_frame.elapsed_s must be a finite number");
      }
      if (message.status !== "idle" && message.status !== "running") {
        throw new ProtocolError(`unknown status ${JSON.stringify(message.status)}`);
      }
      return {
        v: PROTOCOL_VERSION,
        type: "state_frame",
        tick: message.tick as number,
        view,
        theta_deg: message.theta_deg,
        elapsed_s: message.elapsed_s,
        status: message.status,
      };
    }
    case "trial_end": {
      if (typeof message.outcome !== "string") {
        throw new ProtocolError("trial_end.outcome must be a string");
      }
      if (message.completion_time_s !== null && !finite(message.completion_time_s)) {
        throw new ProtocolError("trial_end.completion_time_s must be a number or null");
      }
      return {
        v: PROTOCOL_VERSION,
        type: "trial_end",
        outcome: message.outcome,
        completion_time_s: message.completion_time_s as number | null,
      };
    }
    case "error": {
      if (typeof message.code !== "string" || typeof message.text !== "string") {
        throw new ProtocolError("error.code and error.text must be strings");
      }
      return { v: PROTOCOL_VERSION, type: "error", code: message.code, text: message.text };
    }
    default:
      throw new ProtocolError(`unknown message type ${JSON.stringify(message.type)}`);
  }
}
