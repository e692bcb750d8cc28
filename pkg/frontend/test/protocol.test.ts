import assert from "node:assert/strict";
import { test } from "node:test";

import {
  PROTOCOL_VERSION,
  ProtocolError,
  decodeServerMessage,
  encodeMessage,
  makeAbortTrial,
  makeInput,
  makeStartTrial,
  makeToggleCorrection,
} from "../src/protocol.js";

const configRecord = {
  roll_deg: 45.0,
  pitch_deg: 0.0,
  yaw_deg: 0.0,
  correction: true,
  translation_speed_mm_s: 40.0,
  dt_s: 1 / 60,
  log_rate_hz: 20.0,
  max_duration_s: 90.0,
  seed: 0,
  free_mode: false,
  intrinsics: {
    focal_length_px: 400.0,
    image_width_px: 480,
    image_height_px: 480,
    annulus_inner_px: 30.0,
    annulus_outer_px: 60.0,
    near_clip_mm: 1.0,
  },
};

const frameText = JSON.stringify({
  v: 1,
  type: "state_frame",
  tick: 3,
  view: {
    sphere_center: [240.0, 198.5],
    sphere_radius_px: 68.25,
    cube_polygons: [[[10, 10], [20, 10], [15, 20]], [], []],
    annulus_px: [30.0, 60.0],
    tick: 3,
    visible: true,
  },
  theta_deg: -45.0,
  elapsed_s: 0.05,
  status: "running",
});

test("decodes a hello with config and no pending condition", () => {
  const text = JSON.stringify({
    v: 1,
    type: "hello",
    config: configRecord,
    next_condition: null,
  });
  const message = decodeServerMessage(text);
  assert.equal(message.type, "hello");
  if (message.type !== "hello") return;
  assert.equal(message.config.intrinsics.image_width_px, 480);
  assert.equal(message.config.correction, true);
  assert.equal(message.next_condition, null);
});

test("decodes a state frame with view primitives", () => {
  const message = decodeServerMessage(frameText);
  assert.equal(message.type, "state_frame");
  if (message.type !== "state_frame") return;
  assert.deepEqual(message.view.sphere_center, [240.0, 198.5]);
  assert.equal(message.view.cube_polygons.length, 3);
  assert.equal(message.theta_deg, -45.0);
  assert.equal(message.status, "running");
});

test("decodes trial end with and without a completion time", () => {
  const done = decodeServerMessage(
    JSON.stringify({ v: 1, type: "trial_end", outcome: "success", completion_time_s: 3.55 }),
  );
  assert.equal(done.type, "trial_end");
  if (done.type === "trial_end") assert.equal(done.completion_time_s, 3.55);

  const timedOut = decodeServerMessage(
    JSON.stringify({ v: 1, type: "trial_end", outcome: "timeout", completion_time_s: null }),
  );
  if (timedOut.type === "trial_end") assert.equal(timedOut.completion_time_s, null);
});

test("decodes server errors verbatim", () => {
  const message = decodeServerMessage(
    JSON.stringify({ v: 1, type: "error", code: "bad_state", text: "no trial running" }),
  );
  assert.deepEqual(message, {
    v: 1,
    type: "error",
    code: "bad_state",
    text: "no trial running",
  });
});

test("rejects malformed server frames", () => {
  const malformed = [
    "not json",
    "[1,2,3]",
    JSON.stringify({ v: 2, type: "hello", config: configRecord, next_condition: null }),
    JSON.stringify({ v: 1, type: "mystery" }),
    JSON.stringify({ v: 1, type: "hello", config: "nope", next_condition: null }),
    JSON.stringify({ v: 1, type: "trial_end", outcome: 7, completion_time_s: null }),
    JSON.stringify({ v: 1, type: "error", code: "x" }),
  ];
  for (const text of malformed) {
    assert.throws(() => decodeServerMessage(text), ProtocolError, text);
  }
});

test("rejects frames with broken view geometry", () => {
  const base = JSON.parse(frameText);
  const broken = [
    { ...base, tick: -1 },
    { ...base, theta_deg: "wide" },
    { ...base, status: "paused" },
    { ...base, view: { ...base.view, sphere_center: [1] } },
    { ...base, view: { ...base.view, cube_polygons: [[[1]]] } },
    { ...base, view: { ...base.view, visible: "yes" } },
  ];
  for (const message of broken) {
    assert.throws(() => decodeServerMessage(JSON.stringify(message)), ProtocolError);
  }
});

test("client messages carry the version and the nested condition", () => {
  assert.deepEqual(makeInput(7, [0.5, -1, 0]), {
    v: PROTOCOL_VERSION,
    type: "input",
    seq: 7,
    axes: [0.5, -1, 0],
  });
  assert.deepEqual(
    makeStartTrial({ roll_deg: 45, pitch_deg: 0, yaw_deg: 0, correction: true }),
    {
      v: PROTOCOL_VERSION,
      type: "start_trial",
      condition: { roll_deg: 45, pitch_deg: 0, yaw_deg: 0, correction: true },
    },
  );
  assert.deepEqual(makeToggleCorrection(), { v: PROTOCOL_VERSION, type: "toggle_correction" });
  assert.deepEqual(makeAbortTrial(), { v: PROTOCOL_VERSION, type: "abort_trial" });
});

test("encoding a client message survives a JSON round trip", () => {
  const message = makeInput(0, [0, 0, 0]);
  assert.deepEqual(JSON.parse(encodeMessage(message)), message);
});
