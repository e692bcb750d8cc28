// Cockpit wiring: DOM controls, the render loop, and the message pump.
// All session state lives in one UiSessionState snapshot; the loop
// samples input, streams it while a trial runs, and redraws at display
// rate. ?subject=N picks the schedule rows, ?debug=1 unblinds conditions.

import { browserSocketFactory, createSessionClient } from "./client.js";
import { createInputSource } from "./input.js";
import { renderView } from "./render.js";
import type { Draw2d } from "./render.js";
import {
  conditionOf,
  describeEntry,
  entriesForSubject,
  loadProgress,
  parseScheduleTsv,
  saveProgress,
} from "./schedule.js";
import {
  applyDecodeFailure,
  applyServerMessage,
  connectionChanged,
  correctionToggled,
  deviceChanged,
  initialState,
  isStale,
  trialRequested,
} from "./state.js";
import type { ScheduleEntry } from "./schedule.js";
import type { Condition, TrialEndMessage } from "./protocol.js";

const params = new URLSearchParams(location.search);
const revealConditions = params.get("debug") === "1";
const subject = Number(params.get("subject") ?? "0");

const byId = <T extends HTMLElement>(id: string): T => {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
};

const canvas = byId<HTMLCanvasElement>("view");
const context = canvas.getContext("2d");
if (!context) throw new Error("2d canvas context unavailable");
const draw: Draw2d = context;

const statusLine = byId<HTMLDivElement>("status");
const scheduleLine = byId<HTMLDivElement>("schedule-line");
const outcomeCard = byId<HTMLDivElement>("outcome");
const connectButton = byId<HTMLButtonElement>("connect");
const startButton = byId<HTMLButtonElement>("start");
const abortButton = byId<HTMLButtonElement>("abort");
const toggleButton = byId<HTMLButtonElement>("toggle");
const freePlayBox = byId<HTMLInputElement>("free-play");
const rollInput = byId<HTMLInputElement>("roll");
const pitchInput = byId<HTMLInputElement>("pitch");
const yawInput = byId<HTMLInputElement>("yaw");
const correctionBox = byId<HTMLInputElement>("correction");

let state = initialState();
let schedule: ScheduleEntry[] = [];
let completed = 0;
let scheduledTrial = false; // the running trial came from the schedule

const client = createSessionClient({
  url: `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/session`,
  factory: browserSocketFactory,
  onMessage: (message) => {
    state = applyServerMessage(state, message, performance.now());
    if (message.type === "trial_end") finishTrial(message);
  },
  onDecodeError: (reason) => {
    state = applyDecodeFailure(state, reason);
  },
  onStatus: (status) => {
    state = connectionChanged(state, status);
  },
});

const input = createInputSource();
input.attach();

function finishTrial(end: TrialEndMessage): void {
  const time = end.completion_time_s === null ? "" : ` in ${end.completion_time_s.toFixed(2)} s`;
  outcomeCard.textContent = `${end.outcome}${time}`;
  outcomeCard.hidden = false;
  if (scheduledTrial) {
    scheduledTrial = false;
    completed += 1;
    saveProgress(localStorage, subject, completed);
  }
}

function nextEntry(): ScheduleEntry | null {
  return completed < schedule.length ? schedule[completed] : null;
}

function startNext(): void {
  let condition: Condition;
  if (freePlayBox.checked) {
    condition = {
      roll_deg: Number(rollInput.value),
      pitch_deg: Number(pitchInput.value),
      yaw_deg: Number(yawInput.value),
      correction: correctionBox.checked,
    };
  } else {
    const entry = nextEntry();
    if (!entry) return;
    condition = conditionOf(entry);
    scheduledTrial = true;
  }
  state = trialRequested(state, condition);
  outcomeCard.hidden = true;
  client.startTrial(condition);
}

connectButton.onclick = () => client.connect();
startButton.onclick = () => startNext();
abortButton.onclick = () => client.abortTrial();
toggleButton.onclick = () => {
  // the server only accepts the toggle mid-trial, and the cockpit only
  // offers it in free play; scheduled conditions stay locked
  client.toggleCorrection();
  state = correctionToggled(state);
};

async function loadSchedule(): Promise<void> {
  try {
    const response = await fetch("/schedule");
    const text = await response.text();
    schedule = text.trim() === "" ? [] : entriesForSubject(parseScheduleTsv(text), subject);
    completed = Math.min(loadProgress(localStorage, subject), schedule.length);
  } catch (error) {
    state = applyDecodeFailure(state, `schedule unavailable: ${String(error)}`);
  }
}

function updateControls(): void {
  const running = state.trial === "running";
  const freePlay = freePlayBox.checked;
  const device = state.device;

  statusLine.textContent =
    state.connection === "closed"
      ? "connection lost, press reconnect"
      : `${state.connection} | ${device} | subject ${subject}`;
  connectButton.hidden = state.connection !== "closed";

  const entry = nextEntry();
  if (freePlay) {
    scheduleLine.textContent = "free play";
  } else if (entry) {
    scheduleLine.textContent = describeEntry(
      entry,
      completed + 1,
      schedule.length,
      revealConditions,
    );
  } else {
    scheduleLine.textContent = schedule.length
      ? `all ${schedule.length} trials done`
      : "no schedule served";
  }

  startButton.disabled = state.connection !== "open" || running || (!freePlay && !entry);
  abortButton.disabled = !running;
  toggleButton.disabled = !freePlay || !running;
  rollInput.disabled = !freePlay || running;
  pitchInput.disabled = !freePlay || running;
  yawInput.disabled = !freePlay || running;
  correctionBox.disabled = !freePlay || running;

  if (state.config) {
    const { image_width_px, image_height_px } = state.config.intrinsics;
    if (canvas.width !== image_width_px) canvas.width = image_width_px;
    if (canvas.height !== image_height_px) canvas.height = image_height_px;
  }
}

function frameLoop(): void {
  const device = input.device();
  if (device !== state.device) state = deviceChanged(state, device);
  if (state.trial === "running" && client.connected()) {
    client.sendInput(input.axes());
  }
  renderView(draw, canvas.width, canvas.height, state.frame, {
    correctionOn: state.correctionOn,
    stale: isStale(state, performance.now()),
    banner: state.banner,
  });
  updateControls();
  requestAnimationFrame(frameLoop);
}

void loadSchedule();
client.connect();
requestAnimationFrame(frameLoop);
