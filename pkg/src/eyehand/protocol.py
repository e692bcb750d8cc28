"""Wire messages for interactive sessions.

Messages are single JSON objects sent as WebSocket text frames (the frame
itself provides the length prefix). Every message carries the protocol
version in ``v``; unknown types and malformed fields are rejected with
ProtocolError so transports can answer with an error message instead of
dying. Floats in server frames are quantized like trial logs, which keeps
a session transcript byte-reproducible.
"""
from __future__ import annotations

import json
import math

from .simcore import ViewFrame
from .triallog import quantize

PROTOCOL_VERSION = 1

# client -> server
MSG_INPUT = "input"
MSG_TOGGLE_CORRECTION = "toggle_correction"
MSG_START_TRIAL = "start_trial"
MSG_ABORT_TRIAL = "abort_trial"
CLIENT_TYPES = (MSG_INPUT, MSG_TOGGLE_CORRECTION, MSG_START_TRIAL, MSG_ABORT_TRIAL)

# server -> client
MSG_HELLO = "hello"
MSG_STATE_FRAME = "state_frame"
MSG_TRIAL_END = "trial_end"
MSG_ERROR = "error"

STATUS_IDLE = "idle"
STATUS_RUNNING = "running"

ERR_BAD_MESSAGE = "bad_message"
ERR_BAD_STATE = "bad_state"
ERR_BAD_CONDITION = "bad_condition"


class ProtocolError(ValueError):
    """Message violates the wire schema."""


def encode_message(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def decode_client_message(text: str) -> dict:
    """Parse and validate one client frame; raises ProtocolError."""
    try:
        message = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(message, dict):
        raise ProtocolError("message must be a JSON object")
    if message.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {message.get('v')!r}")
    msg_type = message.get("type")
    if msg_type not in CLIENT_TYPES:
        raise ProtocolError(f"unknown message type {msg_type!r}")

    if msg_type == MSG_INPUT:
        seq = message.get("seq")
        if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
            raise ProtocolError("input.seq must be a non-negative integer")
        axes = message.get("axes")
        if (
            not isinstance(axes, list)
            or len(axes) != 3
            or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in axes)
            or not all(math.isfinite(float(a)) for a in axes)
        ):
            raise ProtocolError("input.axes must be three finite numbers")
    elif msg_type == MSG_START_TRIAL:
        condition = message.get("condition")
        if not isinstance(condition, dict):
            raise ProtocolError("start_trial.condition must be an object")
        for key in ("roll_deg", "pitch_deg", "yaw_deg"):
            value = condition.get(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(float(value)):
                raise ProtocolError(f"condition.{key} must be a finite number")
        if not isinstance(condition.get("correction"), bool):
            raise ProtocolError("condition.correction must be a boolean")
    return message


def make_input(seq: int, axes) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": MSG_INPUT,
        "seq": seq,
        "axes": [float(a) for a in axes],
    }


def make_start_trial(roll_deg: float, pitch_deg: float, yaw_deg: float,
                     correction: bool) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": MSG_START_TRIAL,
        "condition": {
            "roll_deg": roll_deg,
            "pitch_deg": pitch_deg,
            "yaw_deg": yaw_deg,
            "correction": correction,
        },
    }


def make_toggle_correction() -> dict:
    return {"v": PROTOCOL_VERSION, "type": MSG_TOGGLE_CORRECTION}


def make_abort_trial() -> dict:
    return {"v": PROTOCOL_VERSION, "type": MSG_ABORT_TRIAL}


def view_to_record(view: ViewFrame) -> dict:
    return {
        "sphere_center": [quantize(view.sphere_center[0]), quantize(view.sphere_center[1])],
        "sphere_radius_px": quantize(view.sphere_radius_px),
        "cube_polygons": [
            [[quantize(u), quantize(v)] for u, v in polygon]
            for polygon in view.cube_polygons
        ],
        "annulus_px": [quantize(view.annulus_px[0]), quantize(view.annulus_px[1])],
        "tick": view.tick,
        "visible": view.visible,
    }


def make_hello(config_record: dict, next_condition: dict | None) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": MSG_HELLO,
        "config": config_record,
        "next_condition": next_condition,
    }


def make_state_frame(tick: int, view: ViewFrame, theta_deg: float,
                     elapsed_s: float, status: str) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": MSG_STATE_FRAME,
        "tick": tick,
        "view": view_to_record(view),
        "theta_deg": quantize(theta_deg),
        "elapsed_s": quantize(elapsed_s),
        "status": status,
    }


def make_trial_end(outcome: str, completion_time_s: float | None) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": MSG_TRIAL_END,
        "outcome": outcome,
        "completion_time_s": None if completion_time_s is None else quantize(completion_time_s),
    }


def make_error(code: str, text: str) -> dict:
    return {"v": PROTOCOL_VERSION, "type": MSG_ERROR, "code": code, "text": text}
