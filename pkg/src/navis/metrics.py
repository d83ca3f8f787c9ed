"""Session accounting: link counters and latency, in a flat exposition format."""

from __future__ import annotations

from dataclasses import dataclass

from .kinematics import ScooterPose
from .session import EVENT_POSE, EVENT_RX, EVENT_TX, SessionLog
from .telemetry import LinkCounters, Receiver, default_failsafe_timeout_us


@dataclass(frozen=True)
class SessionStats:
    duration_us: int
    commands_sent: int
    counters: LinkCounters
    failsafe_count: int
    latency_last_us: int | None
    latency_mean_us: float | None
    final_pose: ScooterPose | None


def compute_stats(log: SessionLog) -> SessionStats:
    """Re-derive receiver-side accounting from a recorded session log."""
    receiver = Receiver()
    timeout_us = default_failsafe_timeout_us(log.config.pipeline.control_period_us)
    sent = 0
    latencies: list[int] = []
    duration_us = 0
    for event in log.events:
        duration_us = max(duration_us, event.t_us)
        if event.kind == EVENT_TX:
            sent += 1
        elif event.kind == EVENT_RX:
            applied = receiver.receive(bytes.fromhex(event.payload), event.t_us)
            if applied is not None and receiver.state.last_latency_us is not None:
                latencies.append(receiver.state.last_latency_us)
        elif event.kind == EVENT_POSE:
            receiver.failsafe_check(event.t_us, timeout_us)
    poses = log.poses()
    st = receiver.state
    return SessionStats(
        duration_us=duration_us,
        commands_sent=sent,
        counters=st.counters,
        failsafe_count=st.failsafe_count,
        latency_last_us=st.last_latency_us,
        latency_mean_us=sum(latencies) / len(latencies) if latencies else None,
        final_pose=poses[-1][1] if poses else None,
    )


def metrics_lines(stats: SessionStats) -> list[str]:
    """`name value` exposition lines, one metric per line."""
    c = stats.counters
    lines = [
        f"navis_session_duration_us {stats.duration_us}",
        f"navis_datagrams_sent {stats.commands_sent}",
        f"navis_datagrams_received {c.received}",
        f"navis_datagrams_applied {c.applied}",
        f"navis_datagrams_stale_dropped {c.stale_dropped}",
        f"navis_datagrams_corrupt_dropped {c.corrupt_dropped}",
        f"navis_failsafe_activations {stats.failsafe_count}",
    ]
    if stats.latency_last_us is not None:
        lines.append(f"navis_latency_us_last {stats.latency_last_us}")
    if stats.latency_mean_us is not None:
        lines.append(f"navis_latency_us_mean {stats.latency_mean_us:.1f}")
    if stats.final_pose is not None:
        p = stats.final_pose
        lines.append(f"navis_final_x_m {p.x:.6f}")
        lines.append(f"navis_final_y_m {p.y:.6f}")
        lines.append(f"navis_final_heading_deg {p.heading_deg:.6f}")
    return lines
