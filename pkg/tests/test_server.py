"""Session server: message handling, input coalescing, trial lifecycle,
transcript determinism, and the WebSocket transport."""

import json
from dataclasses import replace

import pytest
from fastapi.testclient import TestClient

from eyehand import (
    ConditionGrid,
    NaiveProportional,
    Replay,
    RpyAngles,
    SimConfig,
    build_schedule,
    format_trial_log,
    run_scripted,
)
from eyehand import protocol
from eyehand.server import TrialSession, _consume, create_app
from eyehand.simcore import record_to_config

BASE = SimConfig()


def drive_to_completion(session, operator, max_ticks=6000):
    """Closed loop against the session; returns (transcript, trial_end)."""
    transcript = []
    seq = 0
    while seq < max_ticks:
        view = session.runner.view(include_cubes=False)
        axes = operator.command(view)
        message = protocol.make_input(seq, axes)
        transcript.append(message)
        session.handle_message(message)
        for out in session.tick():
            if out["type"] == protocol.MSG_TRIAL_END:
                return transcript, out
        seq += 1
    raise AssertionError("trial did not finish")


def test_hello_carries_the_base_config():
    session = TrialSession(BASE)
    hello = session.hello()
    assert hello["type"] == protocol.MSG_HELLO
    assert record_to_config(hello["config"]) == BASE


def test_start_trial_emits_initial_frame():
    session = TrialSession(BASE)
    out = session.handle_message(protocol.make_start_trial(45, 0, 0, True))
    assert [m["type"] for m in out] == [protocol.MSG_STATE_FRAME]
    assert out[0]["tick"] == 0
    assert out[0]["theta_deg"] == -45.0
    assert session.running


def test_start_trial_twice_is_an_error():
    session = TrialSession(BASE)
    session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    out = session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    assert out[0]["type"] == protocol.MSG_ERROR
    assert out[0]["code"] == protocol.ERR_BAD_STATE


def test_start_trial_rejects_out_of_range_condition():
    session = TrialSession(BASE)
    out = session.handle_message(protocol.make_start_trial(0, 30, 0, False))
    assert out[0]["code"] == protocol.ERR_BAD_CONDITION
    assert not session.running


def test_toggle_and_abort_require_a_trial():
    session = TrialSession(BASE)
    for message in (protocol.make_toggle_correction(), protocol.make_abort_trial()):
        out = session.handle_message(message)
        assert out[0]["type"] == protocol.MSG_ERROR
        assert out[0]["code"] == protocol.ERR_BAD_STATE


def test_inputs_coalesce_and_stale_sequence_numbers_drop():
    session = TrialSession(BASE)
    session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    session.handle_message(protocol.make_input(5, (1.0, 0.0, 0.0)))
    session.handle_message(protocol.make_input(3, (0.0, 0.0, 0.0)))
    session.tick()
    x_after_one = session.runner.state.rel_pos[0]
    assert x_after_one == pytest.approx(30.0 - 40.0 / 60.0, abs=1e-12)
    session.tick()
    assert session.runner.state.rel_pos[0] == pytest.approx(
        x_after_one - 40.0 / 60.0, abs=1e-12
    )


def test_toggle_mid_trial_changes_only_the_view():
    session = TrialSession(BASE)
    session.handle_message(protocol.make_start_trial(90, 0, 0, False))
    session.handle_message(protocol.make_input(0, (0.5, 0.0, 0.0)))
    frames = session.tick()
    assert frames[0]["theta_deg"] == 0.0
    rel_before = session.runner.state.rel_pos
    assert session.handle_message(protocol.make_toggle_correction()) == []
    assert session.runner.state.rel_pos == rel_before
    frame = session.tick()[0]
    assert frame["theta_deg"] == -90.0


def test_abort_mid_trial_writes_an_aborted_log(tmp_path):
    session = TrialSession(BASE, log_dir=tmp_path)
    session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    session.handle_message(protocol.make_input(0, (1.0, 0.0, 0.0)))
    session.tick()
    out = session.handle_message(protocol.make_abort_trial())
    assert out[0]["type"] == protocol.MSG_TRIAL_END
    assert out[0]["outcome"] == "aborted"
    assert not session.running
    assert session.last_log_path.exists()
    assert session.last_log.outcome == "aborted"


def test_close_aborts_and_logs_a_running_trial(tmp_path):
    session = TrialSession(BASE, log_dir=tmp_path)
    session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    session.handle_message(protocol.make_input(0, (1.0, 0.0, 0.0)))
    session.tick()
    session.close()
    assert not session.running
    assert session.last_log.outcome == "aborted"
    assert session.last_log_path.exists()


def test_timeout_surfaces_as_trial_end():
    session = TrialSession(replace(BASE, max_duration_s=0.5))
    session.handle_message(protocol.make_start_trial(0, 0, 0, False))
    ends = []
    for seq in range(30):
        session.handle_message(protocol.make_input(seq, (0.0, 0.0, 0.0)))
        ends += [m for m in session.tick() if m["type"] == protocol.MSG_TRIAL_END]
    assert len(ends) == 1
    assert ends[0]["outcome"] == "timeout"
    assert ends[0]["completion_time_s"] is None


def test_session_log_equals_scripted_replay(tmp_path):
    """A live session's log and a headless replay of its command
    transcript are byte-identical."""
    session = TrialSession(BASE, log_dir=tmp_path)
    config = replace(BASE, rpy=RpyAngles.from_degrees(45, 0, 0), correction=True)
    session.handle_message(protocol.make_start_trial(45, 0, 0, True))
    transcript, end = drive_to_completion(session, NaiveProportional(config))
    assert end["outcome"] == "success"
    live_bytes = session.last_log_path.read_text(encoding="utf-8")

    script = [tuple(m["axes"]) for m in transcript]
    replayed = run_scripted(config, Replay(script))
    assert format_trial_log(replayed) == live_bytes


def test_fresh_session_reproduces_a_recorded_transcript(tmp_path):
    session = TrialSession(BASE, log_dir=tmp_path / "live")
    config = replace(BASE, rpy=RpyAngles.from_degrees(315, 0, 45), correction=True)
    session.handle_message(protocol.make_start_trial(315, 0, 45, True))
    transcript, _ = drive_to_completion(session, NaiveProportional(config))
    live_bytes = session.last_log_path.read_text(encoding="utf-8")

    again = TrialSession(BASE, log_dir=tmp_path / "replayed")
    again.handle_message(protocol.make_start_trial(315, 0, 45, True))
    for message in transcript:
        again.handle_message(message)
        again.tick()
    assert again.last_log_path.read_text(encoding="utf-8") == live_bytes


def test_consume_reports_bad_messages():
    session = TrialSession(BASE)
    out = _consume(session, "{nope", tick_after_input=True)
    assert out[0]["type"] == protocol.MSG_ERROR
    assert out[0]["code"] == protocol.ERR_BAD_MESSAGE


def test_consume_lockstep_ticks_once_per_input():
    session = TrialSession(BASE)
    _consume(
        session,
        protocol.encode_message(protocol.make_start_trial(0, 0, 0, False)),
        tick_after_input=True,
    )
    out = _consume(
        session,
        protocol.encode_message(protocol.make_input(0, (1.0, 0.0, 0.0))),
        tick_after_input=True,
    )
    assert [m["type"] for m in out] == [protocol.MSG_STATE_FRAME]
    assert session.runner.state.tick == 1


def lockstep_client(tmp_path, schedule=None):
    app = create_app(BASE, log_dir=tmp_path, schedule=schedule, lockstep=True)
    return TestClient(app)


def test_schedule_endpoint(tmp_path):
    schedule = build_schedule(ConditionGrid(), 2, seed=0)
    with lockstep_client(tmp_path, schedule) as client:
        text = client.get("/schedule").text
        assert text.startswith("subject\t")
        assert len(text.splitlines()) == 1 + len(schedule.entries)
    with lockstep_client(tmp_path) as client:
        assert client.get("/schedule").text == ""


def test_websocket_session_flow(tmp_path):
    with lockstep_client(tmp_path) as client:
        with client.websocket_connect("/session") as ws:
            hello = json.loads(ws.receive_text())
            assert hello["type"] == protocol.MSG_HELLO

            ws.send_text(protocol.encode_message(protocol.make_start_trial(0, 0, 0, False)))
            frame = json.loads(ws.receive_text())
            assert frame["type"] == protocol.MSG_STATE_FRAME
            assert frame["tick"] == 0

            ws.send_text(protocol.encode_message(protocol.make_input(0, (1.0, 1.0, 1.0))))
            frame = json.loads(ws.receive_text())
            assert frame["tick"] == 1
            assert frame["view"]["visible"] is True

            ws.send_text("garbage")
            error = json.loads(ws.receive_text())
            assert error["type"] == protocol.MSG_ERROR
            assert error["code"] == protocol.ERR_BAD_MESSAGE

            ws.send_text(protocol.encode_message(protocol.make_abort_trial()))
            end = json.loads(ws.receive_text())
            assert end["type"] == protocol.MSG_TRIAL_END
            assert end["outcome"] == "aborted"


def test_websocket_disconnect_logs_running_trial(tmp_path):
    with lockstep_client(tmp_path) as client:
        with client.websocket_connect("/session") as ws:
            ws.receive_text()
            ws.send_text(protocol.encode_message(protocol.make_start_trial(0, 0, 0, False)))
            ws.receive_text()
            ws.send_text(protocol.encode_message(protocol.make_input(0, (1.0, 0.0, 0.0))))
            ws.receive_text()
    logs = sorted(tmp_path.glob("trial_*.jsonl"))
    assert len(logs) == 1
    assert '"outcome":"aborted"' in logs[0].read_text(encoding="utf-8")


def test_realtime_session_sends_frames(tmp_path):
    app = create_app(BASE, log_dir=tmp_path, lockstep=False)
    with TestClient(app) as client:
        with client.websocket_connect("/session") as ws:
            hello = json.loads(ws.receive_text())
            assert hello["type"] == protocol.MSG_HELLO
            ws.send_text(protocol.encode_message(protocol.make_start_trial(0, 0, 0, False)))
            messages = [json.loads(ws.receive_text()) for _ in range(5)]
            assert all(m["type"] == protocol.MSG_STATE_FRAME for m in messages)
            ticks = [m["tick"] for m in messages if m["tick"] > 0]
            assert ticks == sorted(ticks)
