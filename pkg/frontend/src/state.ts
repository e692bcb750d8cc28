// Cockpit state as one plain snapshot: everything on screen is a pure
// function of the messages received plus local intent (device mode, the
// correction toggle). Reducers return fresh objects, never mutate.

import type {
  Condition,
  ServerMessage,
  SimConfigRecord,
  StateFrameMessage,
  TrialEndMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";
export type TrialStatus = "idle" | "running" | "ended";
export type DeviceMode = "keyboard" | "gamepad";

export const STALE_AFTER_MS = 200;

export interface UiSessionState {
  connection: ConnectionStatus;
  config: SimConfigRecord | null;
  frame: StateFrameMessage | null;
  frameAtMs: number | null;
  trial: TrialStatus;
  outcome: TrialEndMessage | null;
  device: DeviceMode;
  correctionOn: boolean;
  banner: string | null;
}

export function initialState(): UiSessionState {
  return {
    connection: "connecting",
    config: null,
    frame: null,
    frameAtMs: null,
    trial: "idle",
    outcome: null,
    device: "keyboard",
    correctionOn: false,
    banner: null,
  };
}

export function applyServerMessage(
  state: UiSessionState,
  message: ServerMessage,
  nowMs: number,
): UiSessionState {
  switch (message.type) {
    case "hello":
      // a hello means a fresh server-side session, even after reconnect
      return {
        ...state,
        config: message.config,
        correctionOn: message.config.correction,
        trial: "idle",
        banner: null,
      };
    case "state_frame":
      return { ...state, frame: message, frameAtMs: nowMs, trial: "running" };
    case "trial_end":
      return { ...state, trial: "ended", outcome: message };
    case "error":
      // bad_condition only ever answers a rejected start, so undo the
      // optimistic "running" from trialRequested; other errors leave the
      // trial state alone and just raise the banner
      return {
        ...state,
        trial: message.code === "bad_condition" ? "idle" : state.trial,
        banner: `${message.code}: ${message.text}`,
      };
  }
}

export function applyDecodeFailure(state: UiSessionState, reason: string): UiSessionState {
  // the last good frame stays on screen; only the banner changes
  return { ...state, banner: reason };
}

export function connectionChanged(
  state: UiSessionState,
  connection: ConnectionStatus,
): UiSessionState {
  const lostTrial = connection === "closed" && state.trial === "running";
  return { ...state, connection, trial: lostTrial ? "idle" : state.trial };
}

export function deviceChanged(state: UiSessionState, device: DeviceMode): UiSessionState {
  return { ...state, device };
}

export function trialRequested(state: UiSessionState, condition: Condition): UiSessionState {
  return {
    ...state,
    trial: "running",
    correctionOn: condition.correction,
    outcome: null,
    banner: null,
  };
}

export function correctionToggled(state: UiSessionState): UiSessionState {
  return { ...state, correctionOn: !state.correctionOn };
}

export function isStale(state: UiSessionState, nowMs: number): boolean {
  return (
    state.trial === "running" &&
    state.frameAtMs !== null &&
    nowMs - state.frameAtMs > STALE_AFTER_MS
  );
}
