import assert from "node:assert/strict";
import { test } from "node:test";

import { decodeServerMessage } from "../src/protocol.js";
import type { ServerMessage, StateFrameMessage } from "../src/protocol.js";
import {
  STALE_AFTER_MS,
  applyDecodeFailure,
  applyServerMessage,
  connectionChanged,
  correctionToggled,
  deviceChanged,
  initialState,
  isStale,
  trialRequested,
} from "../src/state.js";

const hello = decodeServerMessage(
  JSON.stringify({
    v: 1,
    type: "hello",
    config: {
      roll_deg: 0,
      pitch_deg: 0,
      yaw_deg: 0,
      correction: false,
      dt_s: 1 / 60,
      max_duration_s: 90,
      free_mode: false,
      intrinsics: {
        focal_length_px: 400,
        image_width_px: 480,
        image_height_px: 480,
        annulus_inner_px: 30,
        annulus_outer_px: 60,
        near_clip_mm: 1,
      },
    },
    next_condition: null,
  }),
);

const frame = (tick: number): StateFrameMessage => ({
  v: 1,
  type: "state_frame",
  tick,
  view: {
    sphere_center: [240, 240],
    sphere_radius_px: 50,
    cube_polygons: [[], [], []],
    annulus_px: [30, 60],
    tick,
    visible: true,
  },
  theta_deg: 0,
  elapsed_s: tick / 60,
  status: "running",
});

const condition = { roll_deg: 45, pitch_deg: 0, yaw_deg: 0, correction: true };

test("hello resets the trial and adopts the config correction flag", () => {
  const state = applyServerMessage(initialState(), hello, 0);
  assert.equal(state.trial, "idle");
  assert.equal(state.correctionOn, false);
  assert.ok(state.config);
});

test("a state frame marks the trial running and timestamps the frame", () => {
  const state = applyServerMessage(initialState(), frame(5), 123);
  assert.equal(state.trial, "running");
  assert.equal(state.frame?.tick, 5);
  assert.equal(state.frameAtMs, 123);
});

test("trial end keeps the last frame and records the outcome", () => {
  let state = applyServerMessage(initialState(), frame(5), 0);
  const end: ServerMessage = {
    v: 1,
    type: "trial_end",
    outcome: "success",
    completion_time_s: 3.55,
  };
  state = applyServerMessage(state, end, 1);
  assert.equal(state.trial, "ended");
  assert.equal(state.outcome?.outcome, "success");
  assert.equal(state.frame?.tick, 5);
});

test("a rejected condition reverts the optimistic start", () => {
  let state = trialRequested(initialState(), condition);
  assert.equal(state.trial, "running");
  state = applyServerMessage(
    state,
    { v: 1, type: "error", code: "bad_condition", text: "pitch_deg must be 0 or 45" },
    0,
  );
  assert.equal(state.trial, "idle");
  assert.match(state.banner ?? "", /bad_condition/);
});

test("other server errors raise the banner without ending the trial", () => {
  let state = applyServerMessage(initialState(), frame(1), 0);
  state = applyServerMessage(
    state,
    { v: 1, type: "error", code: "bad_message", text: "invalid JSON" },
    1,
  );
  assert.equal(state.trial, "running");
  assert.match(state.banner ?? "", /invalid JSON/);
});

test("a decode failure keeps the last good frame on screen", () => {
  let state = applyServerMessage(initialState(), frame(9), 0);
  state = applyDecodeFailure(state, "view.sphere_center must be a pair of numbers");
  assert.equal(state.frame?.tick, 9);
  assert.match(state.banner ?? "", /sphere_center/);
});

test("losing the connection mid-trial drops back to idle", () => {
  let state = applyServerMessage(initialState(), frame(1), 0);
  state = connectionChanged(state, "closed");
  assert.equal(state.connection, "closed");
  assert.equal(state.trial, "idle");
});

test("starting a trial clears the previous outcome and banner", () => {
  let state = applyServerMessage(initialState(), frame(1), 0);
  state = applyServerMessage(
    state,
    { v: 1, type: "trial_end", outcome: "aborted", completion_time_s: null },
    1,
  );
  state = applyDecodeFailure(state, "boom");
  state = trialRequested(state, condition);
  assert.equal(state.trial, "running");
  assert.equal(state.outcome, null);
  assert.equal(state.banner, null);
  assert.equal(state.correctionOn, true);
});

test("the correction toggle flips the indicator", () => {
  const state = correctionToggled(initialState());
  assert.equal(state.correctionOn, true);
  assert.equal(correctionToggled(state).correctionOn, false);
});

test("device changes only touch the device field", () => {
  const before = initialState();
  const after = deviceChanged(before, "gamepad");
  assert.equal(after.device, "gamepad");
  assert.deepEqual({ ...after, device: before.device }, before);
});

test("frames go stale after the cutoff only while a trial runs", () => {
  let state = applyServerMessage(initialState(), frame(1), 1000);
  assert.equal(isStale(state, 1000 + STALE_AFTER_MS), false);
  assert.equal(isStale(state, 1001 + STALE_AFTER_MS), true);
  state = applyServerMessage(
    state,
    { v: 1, type: "trial_end", outcome: "success", completion_time_s: 1 },
    2000,
  );
  assert.equal(isStale(state, 5000), false);
});
