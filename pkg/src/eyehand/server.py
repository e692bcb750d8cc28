"""Interactive session server.

TrialSession is the transport-free core: it consumes already-decoded
client messages, advances the simulation one tick at a time, and emits
server messages. The WebSocket layer pumps bytes in and out of it, either
paced by the wall clock (normal serving) or in lockstep with incoming
input messages (deterministic replay and tests). Because TrialSession
drives the same TrialRunner as scripted runs, replaying a recorded
message transcript writes a byte-identical trial log.
"""
from __future__ import annotations

import asyncio
import math
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import protocol
from .geometry import RpyAngles
from .schedule import Schedule, format_schedule_tsv
from .simcore import SimConfig, TrialRunner, config_to_record
from .triallog import TrialLog, write_trial_log

Vec3 = tuple[float, float, float]


class TrialSession:
    """One client's session: at most one running trial at a time.

    Input follows joystick semantics: the most recent axes are held until
    a newer input arrives, one input is consumed per tick, and messages
    with stale sequence numbers are dropped.
    """

    def __init__(self, base_config: SimConfig, log_dir=None):
        self.base_config = base_config
        self.log_dir = Path(log_dir) if log_dir is not None else None
        self.runner: TrialRunner | None = None
        self.correction_enabled = False
        self.trial_count = 0
        self.last_log: TrialLog | None = None
        self.last_log_path: Path | None = None
        self._axes: Vec3 = (0.0, 0.0, 0.0)
        self._last_seq = -1

    @property
    def running(self) -> bool:
        return self.runner is not None

    def hello(self) -> dict:
        return protocol.make_hello(config_to_record(self.base_config), None)

    def handle_message(self, message: dict) -> list[dict]:
        msg_type = message["type"]
        if msg_type == protocol.MSG_INPUT:
            if message["seq"] <= self._last_seq:
                return []  # stale input; the newest command stays in effect
            self._last_seq = message["seq"]
            self._axes = tuple(float(a) for a in message["axes"])
            return []
        if msg_type == protocol.MSG_START_TRIAL:
            return self._start_trial(message["condition"])
        if msg_type == protocol.MSG_TOGGLE_CORRECTION:
            if self.runner is None:
                return [protocol.make_error(protocol.ERR_BAD_STATE, "no trial running")]
            self.correction_enabled = not self.correction_enabled
            self.runner.set_correction(self.correction_enabled)
            return []
        if msg_type == protocol.MSG_ABORT_TRIAL:
            if self.runner is None:
                return [protocol.make_error(protocol.ERR_BAD_STATE, "no trial running")]
            self.runner.abort()
            return [self._end_trial()]
        raise protocol.ProtocolError(f"unhandled message type {msg_type!r}")

    def tick(self) -> list[dict]:
        """Advance one simulation tick; returns the frames to send."""
        if self.runner is None:
            return []
        self.runner.apply(self._axes)
        out = [self._state_frame()]
        if self.runner.finished:
            out.append(self._end_trial())
        return out

    def _start_trial(self, condition: dict) -> list[dict]:
        if self.runner is not None:
            return [
                protocol.make_error(
                    protocol.ERR_BAD_STATE, "a trial is already running"
                )
            ]
        try:
            config = replace(
                self.base_config,
                rpy=RpyAngles.from_degrees(
                    condition["roll_deg"], condition["pitch_deg"], condition["yaw_deg"]
                ),
                correction=bool(condition["correction"]),
            )
            self.runner = TrialRunner(config)
        except ValueError as exc:
            return [protocol.make_error(protocol.ERR_BAD_CONDITION, str(exc))]
        self.correction_enabled = config.correction
        self._axes = (0.0, 0.0, 0.0)
        return [self._state_frame()]

    def _state_frame(self) -> dict:
        runner = self.runner
        state = runner.state
        return protocol.make_state_frame(
            tick=state.tick,
            view=runner.view(),
            theta_deg=math.degrees(runner.theta),
            elapsed_s=state.elapsed_s,
            status=protocol.STATUS_RUNNING,
        )

    def _end_trial(self) -> dict:
        log = self.runner.finish()
        self.runner = None
        self.last_log = log
        self.trial_count += 1
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self.last_log_path = self.log_dir / f"trial_{self.trial_count:04d}.jsonl"
            write_trial_log(log, self.last_log_path)
        return protocol.make_trial_end(log.outcome, log.completion_time_s)

    def close(self) -> None:
        """Drop the connection: a running trial is logged as aborted."""
        if self.runner is not None:
            self.runner.abort()
            self._end_trial()


def create_app(
    base_config: SimConfig,
    log_dir=None,
    schedule: Schedule | None = None,
    static_dir=None,
    lockstep: bool = False,
) -> FastAPI:
    """Assemble the FastAPI app: /session WebSocket, /schedule, static UI.

    In lockstep mode the simulation advances exactly one tick per input
    message, which makes a session a pure function of its transcript; in
    normal mode an internal task ticks at the configured rate.
    """
    app = FastAPI(title="eyehand session server")

    @app.get("/schedule", response_class=PlainTextResponse)
    def get_schedule() -> str:
        if schedule is None:
            return ""
        return format_schedule_tsv(schedule)

    @app.websocket("/session")
    async def session_endpoint(websocket: WebSocket):
        await websocket.accept()
        session = TrialSession(base_config, log_dir=log_dir)
        await websocket.send_text(protocol.encode_message(session.hello()))

        async def send_all(messages: list[dict]) -> None:
            for message in messages:
                await websocket.send_text(protocol.encode_message(message))

        try:
            if lockstep:
                while True:
                    text = await websocket.receive_text()
                    await send_all(_consume(session, text, tick_after_input=True))
            else:
                await _realtime_loop(websocket, session, send_all)
        except WebSocketDisconnect:
            pass
        finally:
            session.close()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _consume(session: TrialSession, text: str, tick_after_input: bool) -> list[dict]:
    try:
        message = protocol.decode_client_message(text)
    except protocol.ProtocolError as exc:
        return [protocol.make_error(protocol.ERR_BAD_MESSAGE, str(exc))]
    out = session.handle_message(message)
    if tick_after_input and message["type"] == protocol.MSG_INPUT:
        out = out + session.tick()
    return out


async def _realtime_loop(websocket: WebSocket, session: TrialSession, send_all) -> None:
    """Receive concurrently while ticking on the wall clock."""
    dt = session.base_config.dt_s
    loop = asyncio.get_running_loop()
    stop = asyncio.Event()

    async def receiver() -> None:
        try:
            while True:
                text = await websocket.receive_text()
                await send_all(_consume(session, text, tick_after_input=False))
        finally:
            stop.set()

    async def ticker() -> None:
        started = loop.time()
        count = 0
        while not stop.is_set():
            count += 1
            delay = started + count * dt - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            if session.running:
                await send_all(session.tick())

    receive_task = asyncio.create_task(receiver())
    tick_task = asyncio.create_task(ticker())
    try:
        await asyncio.gather(receive_task, tick_task)
    finally:
        for task in (receive_task, tick_task):
            task.cancel()
