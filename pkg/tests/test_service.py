import json
import time

import pytest
from starlette.testclient import TestClient

from navis.config import SimConfig, with_mode
from navis.service import RealtimeSession, build_app

from oracles import wrap_reference


@pytest.fixture()
def live():
    session = RealtimeSession(with_mode(SimConfig(), "realtime"), duration_s=None, time_scale=50.0)
    session.start()
    client = TestClient(build_app(session, push_hz=60.0))
    try:
        yield session, client
    finally:
        session.stop()


def _states(ws, n):
    out = []
    while len(out) < n:
        msg = json.loads(ws.receive_text())
        if msg["type"] == "state":
            out.append(msg)
    return out


def test_requires_realtime_mode():
    with pytest.raises(ValueError):
        RealtimeSession(SimConfig())  # fast-forward config


def test_state_endpoint_structured_text(live):
    _, client = live
    response = client.get("/state")
    assert response.status_code == 200
    fields = dict(line.split(None, 1) for line in response.text.strip().splitlines())
    for key in ("t_us", "pose.x", "pose.heading_deg", "cmd.throttle", "link.received", "status"):
        assert key in fields
    assert fields["status"] == "running"


def test_metrics_endpoint_flat_exposition(live):
    _, client = live
    text = client.get("/metrics").text
    for line in text.strip().splitlines():
        name, value = line.split()
        assert name.startswith("navis_")
        float(value)


def test_ws_state_message_schema(live):
    _, client = live
    with client.websocket_connect("/ws") as ws:
        msg = _states(ws, 1)[0]
    assert msg["type"] == "state"
    assert set(msg["pose"]) == {"x", "y", "heading_deg"}
    assert set(msg["cmd"]) == {"throttle", "steering_delta_deg"}
    assert set(msg["link"]) == {"received", "applied", "stale_dropped", "corrupt_dropped"}
    assert set(msg["input"]) == {"rps_target", "handlebar_deg", "writer"}


def test_right_handlebar_setpoint_turns_right(live):
    _, client = live
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "input", "rps_target": 1.0, "handlebar_deg": 30.0}))
        states = _states(ws, 80)
    headings = [s["pose"]["heading_deg"] for s in states if s["input"]["handlebar_deg"] == 30.0]
    assert len(headings) > 10
    # Unwrapped heading must climb once the setpoint is live.
    deltas = [wrap_reference(b - a) for a, b in zip(headings, headings[1:])]
    assert sum(deltas) > 10.0
    assert all(d >= 0 for d in deltas)


def test_out_of_range_setpoints_refused(live):
    session, client = live
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "input", "rps_target": 99.0, "handlebar_deg": 0.0}))
        refusal = _wait_refused(ws)
        assert "rps_target" in refusal["reason"]
        ws.send_text(json.dumps({"type": "input", "rps_target": 0.0, "handlebar_deg": 400.0}))
        refusal = _wait_refused(ws)
        assert "handlebar_deg" in refusal["reason"]
    assert session.rider.targets == (0.0, 0.0)  # nothing was applied


def test_malformed_input_refused_not_crashed(live):
    _, client = live
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{not json")
        assert "JSON" in _wait_refused(ws)["reason"]
        ws.send_text(json.dumps({"type": "state"}))
        assert _wait_refused(ws) is not None


def test_two_clients_last_writer_wins(live):
    _, client = live
    with client.websocket_connect("/ws") as ws1, client.websocket_connect("/ws") as ws2:
        ws1.send_text(json.dumps({"type": "input", "rps_target": 1.0, "handlebar_deg": 10.0}))
        _wait_input(ws1, writer="client-1")
        ws2.send_text(json.dumps({"type": "input", "rps_target": 2.0, "handlebar_deg": -20.0}))
        snap = _wait_input(ws2, writer="client-2")
        assert snap["input"]["rps_target"] == 2.0
        assert snap["input"]["handlebar_deg"] == -20.0
        # Both clients observe the same winning writer.
        snap1 = _wait_input(ws1, writer="client-2")
        assert snap1["input"]["rps_target"] == 2.0


def test_session_unaffected_without_clients(live):
    session, _ = live
    t0 = session.snapshot().t_us
    time.sleep(0.2)
    assert session.snapshot().t_us > t0
    assert session.running


def test_optional_ui_mount(tmp_path):
    (tmp_path / "index.html").write_text("<html><body>cockpit</body></html>")
    session = RealtimeSession(with_mode(SimConfig(), "realtime"), duration_s=None, time_scale=50.0)
    session.start()
    try:
        client = TestClient(build_app(session, ui_dir=str(tmp_path)))
        response = client.get("/ui/")
        assert response.status_code == 200
        assert "cockpit" in response.text
        assert client.get("/state").status_code == 200  # endpoints unaffected
    finally:
        session.stop()


def test_setpoints_feed_emulator_like_script_lines(live):
    session, client = live
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "input", "rps_target": 2.0, "handlebar_deg": 0.0}))
        states = _states(ws, 60)
    # Forward setpoint ends up as forward motion through the whole pipeline.
    assert states[-1]["pose"]["x"] > states[0]["pose"]["x"]
    assert states[-1]["cmd"]["throttle"] > 0.0


def _wait_refused(ws, tries=200):
    for _ in range(tries):
        msg = json.loads(ws.receive_text())
        if msg["type"] == "refused":
            return msg
    raise AssertionError("no refusal arrived")


def _wait_input(ws, writer, tries=300):
    for _ in range(tries):
        msg = json.loads(ws.receive_text())
        if msg["type"] == "state" and msg["input"]["writer"] == writer:
            return msg
    raise AssertionError(f"never saw writer {writer}")
