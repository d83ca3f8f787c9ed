"""navis command line: emulate | simulate | replay | fuzz | stats."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import click

from . import __version__
from .config import MODE_FAST_FORWARD, MODE_REALTIME, SimConfig, parse_config, with_mode, with_seed
from .encoders import RideProfile, emulate_ride, sample_clock
from .metrics import compute_stats, metrics_lines
from .session import parse_session_log, replay as replay_log, run_session, verify_replay
from .telemetry import decode_datagram
from .uart import decode_frame
from .wire import WireError


def _load_config(path: str | None, seed: int | None, fast_forward: bool) -> SimConfig:
    config = parse_config(Path(path).read_text()) if path else SimConfig()
    if seed is not None:
        config = with_seed(config, seed)
    if fast_forward:
        config = with_mode(config, MODE_FAST_FORWARD)
    return config


def _load_script(path: str) -> RideProfile:
    return RideProfile.from_text(Path(path).read_text())


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Software-defined scooter locomotion rig."""


@main.command()
@click.option("--script", required=True, type=click.Path(exists=True), help="Ride script file.")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Key-value config file.")
@click.option("--duration", default=5.0, show_default=True, help="Seconds of ride to emulate.")
@click.option("--sample-period-us", default=1000, show_default=True)
def emulate(script: str, config_path: str | None, duration: float, sample_period_us: int) -> None:
    """Run the encoder emulator alone; prints `t_us tick_count angle_deg` lines."""
    config = _load_config(config_path, None, False)
    profile = _load_script(script)
    clock = sample_clock(sample_period_us, round(duration * 1e6))
    for inc, angle in emulate_ride(profile, config.encoder, clock):
        click.echo(f"{inc.t} {inc.tick_count} {angle.degrees:.6f}")


@main.command()
@click.option("--script", type=click.Path(exists=True), help="Ride script file (required unless --serve).")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Key-value config file.")
@click.option("--duration", default=10.0, show_default=True, help="Session length in seconds.")
@click.option("--seed", type=int, help="Override the scripted-transport seed.")
@click.option("--fast-forward", is_flag=True, help="Force fast-forward mode.")
@click.option("--out", type=click.Path(), help="Write the session log here.")
@click.option("--serve", is_flag=True, help="Run realtime with the live state service.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--time-scale", default=1.0, show_default=True, help="Realtime pacing multiplier.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True), help="Serve a built cockpit from this directory at /ui.")
def simulate(
    script: str | None,
    config_path: str | None,
    duration: float,
    seed: int | None,
    fast_forward: bool,
    out: str | None,
    serve: bool,
    host: str,
    port: int,
    time_scale: float,
    ui_dir: str | None,
) -> None:
    """Run the full pipeline session, scripted or live."""
    config = _load_config(config_path, seed, fast_forward)
    if serve:
        import uvicorn

        from .service import RealtimeSession, build_app

        config = with_mode(config, MODE_REALTIME)
        session = RealtimeSession(config, duration_s=None, time_scale=time_scale)
        session.start()
        click.echo(f"state service on http://{host}:{port}  (ws://{host}:{port}/ws)", err=True)
        if ui_dir:
            click.echo(f"cockpit at http://{host}:{port}/ui/", err=True)
        try:
            uvicorn.run(build_app(session, ui_dir=ui_dir), host=host, port=port, log_level="warning")
        finally:
            session.stop()
            if out:
                Path(out).write_text(session.build_log().to_text())
        return

    if not script:
        raise click.UsageError("--script is required unless --serve is given")
    log = run_session(config, _load_script(script), duration)
    text = log.to_text()
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out} ({log.count('POSE')} poses, {log.count('TX')} commands)", err=True)
    else:
        click.echo(text, nl=False)


@main.command("replay")
@click.argument("log_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), help="Write the trajectory (`t_us x y heading`) here.")
@click.option("--verify", is_flag=True, help="Check the replay against the recorded poses.")
def replay_cmd(log_file: str, out: str | None, verify: bool) -> None:
    """Replay a session log into a pose trajectory."""
    log = parse_session_log(Path(log_file).read_text())
    if verify:
        if verify_replay(log):
            click.echo("replay OK: trajectory matches recording")
        else:
            click.echo("replay MISMATCH", err=True)
            sys.exit(1)
        return
    trajectory = replay_log(log)
    lines = [f"{t} {p.x:.6f} {p.y:.6f} {p.heading_deg:.6f}" for t, p in trajectory]
    body = "\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(body)
    else:
        click.echo(body, nl=False)


@main.command()
@click.option("--count", default=100000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def fuzz(count: int, seed: int) -> None:
    """Throw random byte strings at both decoders; any crash is a bug."""
    rng = random.Random(seed)
    outcomes: dict[str, int] = {}
    for _ in range(count):
        blob = rng.randbytes(rng.randrange(0, 40))
        for decoder in (decode_frame, decode_datagram):
            try:
                decoder(blob)
                key = "accepted"
            except WireError as exc:
                key = type(exc).__name__
            outcomes[key] = outcomes.get(key, 0) + 1
    for name in sorted(outcomes):
        click.echo(f"{name} {outcomes[name]}")
    click.echo(f"total {2 * count} decodes, no crashes")


@main.command()
@click.argument("log_file", type=click.Path(exists=True))
def stats(log_file: str) -> None:
    """Print link and ride metrics recomputed from a session log."""
    log = parse_session_log(Path(log_file).read_text())
    for line in metrics_lines(compute_stats(log)):
        click.echo(line)
