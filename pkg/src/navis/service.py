"""Live state service for realtime sessions.

Read endpoints over HTTP plus a bidirectional WebSocket stream:

  GET /state    current pose/command/counters as `key value` text
  GET /metrics  flat `name value` exposition
  WS  /ws       server pushes newline-terminated JSON state snapshots at
                30 Hz; clients push {"type":"input", rps_target,
                handlebar_deg} setpoints that feed the emulated rider
                exactly as a ride-script line would

Setpoints outside the configured physical limits are refused with a typed
message. Multiple clients race last-writer-wins; the winning writer id
travels in every state snapshot.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from .config import MODE_REALTIME, SimConfig
from .session import LiveRider, SessionEngine, SessionLog
from .telemetry import LinkCounters

PUSH_HZ = 30.0


@dataclass(frozen=True)
class StateSnapshot:
    t_us: int
    x: float
    y: float
    heading_deg: float
    throttle: float
    steering_delta_deg: float
    counters: LinkCounters
    rps_target: float
    handlebar_deg: float
    writer: str
    running: bool

    def to_message(self) -> dict:
        return {
            "type": "state",
            "t_us": self.t_us,
            "pose": {"x": self.x, "y": self.y, "heading_deg": self.heading_deg},
            "cmd": {"throttle": self.throttle, "steering_delta_deg": self.steering_delta_deg},
            "link": {
                "received": self.counters.received,
                "applied": self.counters.applied,
                "stale_dropped": self.counters.stale_dropped,
                "corrupt_dropped": self.counters.corrupt_dropped,
            },
            "input": {
                "rps_target": self.rps_target,
                "handlebar_deg": self.handlebar_deg,
                "writer": self.writer,
            },
        }

    def to_state_text(self) -> str:
        lines = [
            f"t_us {self.t_us}",
            f"pose.x {self.x:.6f}",
            f"pose.y {self.y:.6f}",
            f"pose.heading_deg {self.heading_deg:.6f}",
            f"cmd.throttle {self.throttle:.6f}",
            f"cmd.steering_delta_deg {self.steering_delta_deg:.6f}",
            f"link.received {self.counters.received}",
            f"link.applied {self.counters.applied}",
            f"link.stale_dropped {self.counters.stale_dropped}",
            f"link.corrupt_dropped {self.counters.corrupt_dropped}",
            f"input.rps_target {self.rps_target}",
            f"input.handlebar_deg {self.handlebar_deg}",
            f"input.writer {self.writer or '-'}",
            f"status {'running' if self.running else 'finished'}",
        ]
        return "\n".join(lines) + "\n"


class RealtimeSession:
    """A live session on its own thread, fed by a serialized input queue.

    time_scale > 1 compresses the wall-clock pacing (the simulated timeline
    is unchanged); tests run at high scale, riders at 1.0.
    """

    def __init__(self, config: SimConfig, duration_s: float | None = None, time_scale: float = 1.0):
        if config.mode != MODE_REALTIME:
            raise ValueError("RealtimeSession requires mode realtime")
        self.config = config
        self.rider = LiveRider(config.encoder)
        self.engine = SessionEngine(config, self.rider)
        self._duration_us = None if duration_s is None else round(duration_s * 1e6)
        self._time_scale = time_scale
        self._inputs: queue.Queue[tuple[float, float, str]] = queue.Queue()
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._writer = ""
        self._thread = threading.Thread(target=self._run, name="navis-session", daemon=True)

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=5.0)

    @property
    def running(self) -> bool:
        return self._thread.is_alive()

    def submit_input(self, rps_target: float, handlebar_deg: float, writer: str) -> str | None:
        """Queue a rider setpoint; returns a refusal reason instead of applying
        it when the setpoint exceeds the configured physical limits."""
        limit = self.config.max_rider_rps
        if not isinstance(rps_target, (int, float)) or not isinstance(handlebar_deg, (int, float)):
            return "rps_target and handlebar_deg must be numbers"
        if abs(rps_target) > limit:
            return f"rps_target {rps_target} exceeds physical limit {limit}"
        if not -180.0 <= handlebar_deg <= 180.0:
            return f"handlebar_deg {handlebar_deg} outside [-180, 180]"
        self._inputs.put((float(rps_target), float(handlebar_deg), writer))
        return None

    def snapshot(self) -> StateSnapshot:
        with self._lock:
            engine = self.engine
            cmd = engine.receiver.active_command()
            rps, deg = self.rider.targets
            counters = LinkCounters(**vars(engine.receiver.state.counters))
            return StateSnapshot(
                t_us=engine.t_us,
                x=engine.pose.x,
                y=engine.pose.y,
                heading_deg=engine.pose.heading_deg,
                throttle=cmd.throttle,
                steering_delta_deg=cmd.steering_delta_deg,
                counters=counters,
                rps_target=rps,
                handlebar_deg=deg,
                writer=self._writer,
                running=self.running,
            )

    def build_log(self) -> SessionLog:
        with self._lock:
            return self.engine.build_log()

    def _drain_inputs(self) -> None:
        while True:
            try:
                rps, deg, writer = self._inputs.get_nowait()
            except queue.Empty:
                return
            self.rider.set_targets(rps, deg, self.engine.t_us)
            self._writer = writer

    def _run(self) -> None:
        start = time.monotonic()
        sim_dt_us = self.config.kinematics.sim_dt_us
        while not self._stop.is_set():
            if self._duration_us is not None and self.engine.t_us + sim_dt_us > self._duration_us:
                break
            with self._lock:
                self._drain_inputs()
                self.engine.tick()
            deadline = start + self.engine.t_us * 1e-6 / self._time_scale
            lag = deadline - time.monotonic()
            if lag > 0:
                time.sleep(lag)
        with self._lock:
            self.engine.finish()


def build_app(session: RealtimeSession, push_hz: float = PUSH_HZ, ui_dir: str | None = None) -> FastAPI:
    """Wire the endpoints around one running session.

    ui_dir, when given, serves a built cockpit at /ui; the cockpit still
    talks to the session only through /state and /ws.
    """
    app = FastAPI(title="navis state service")
    push_period = 1.0 / push_hz
    client_counter = {"n": 0}

    @app.get("/state", response_class=PlainTextResponse)
    def state() -> str:
        return session.snapshot().to_state_text()

    @app.get("/metrics", response_class=PlainTextResponse)
    def metrics() -> str:
        snap = session.snapshot()
        c = snap.counters
        lines = [
            f"navis_t_us {snap.t_us}",
            f"navis_datagrams_received {c.received}",
            f"navis_datagrams_applied {c.applied}",
            f"navis_datagrams_stale_dropped {c.stale_dropped}",
            f"navis_datagrams_corrupt_dropped {c.corrupt_dropped}",
            f"navis_failsafe_activations {session.engine.receiver.state.failsafe_count}",
        ]
        latency = session.engine.receiver.state.last_latency_us
        if latency is not None:
            lines.append(f"navis_latency_us_last {latency}")
        return "\n".join(lines) + "\n"

    @app.websocket("/ws")
    async def ws(websocket: WebSocket) -> None:
        await websocket.accept()
        client_counter["n"] += 1
        client_id = f"client-{client_counter['n']}"

        async def pusher() -> None:
            while True:
                await websocket.send_text(json.dumps(session.snapshot().to_message()) + "\n")
                await asyncio.sleep(push_period)

        push_task = asyncio.create_task(pusher())
        try:
            while True:
                raw = await websocket.receive_text()
                refusal = _handle_input(session, raw, client_id)
                if refusal is not None:
                    await websocket.send_text(json.dumps({"type": "refused", "reason": refusal}) + "\n")
        except WebSocketDisconnect:
            pass
        finally:
            push_task.cancel()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _handle_input(session: RealtimeSession, raw: str, client_id: str) -> str | None:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError:
        return "not valid JSON"
    if not isinstance(msg, dict) or msg.get("type") != "input":
        return "expected {\"type\": \"input\", ...}"
    if "rps_target" not in msg or "handlebar_deg" not in msg:
        return "input requires rps_target and handlebar_deg"
    return session.submit_input(msg["rps_target"], msg["handlebar_deg"], client_id)
