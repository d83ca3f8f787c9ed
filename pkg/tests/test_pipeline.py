import math
import random

import pytest

from navis.encoders import AbsoluteAngle, EncoderConfig, IncrementalSample
from navis.pipeline import (
    ControlStage,
    MotionCommand,
    NonFiniteInput,
    PipelineConfig,
    steering_delta,
    throttle_map,
)
from navis.wire import RangeExceeded

from oracles import wrap_reference


class TestMotionCommand:
    def test_in_range_ok(self):
        cmd = MotionCommand(0.5, -120.0)
        assert cmd.throttle == 0.5

    def test_throttle_out_of_range(self):
        with pytest.raises(RangeExceeded):
            MotionCommand(1.5, 0.0)

    def test_steering_out_of_range(self):
        with pytest.raises(RangeExceeded):
            MotionCommand(0.0, 180.5)


class TestThrottleMap:
    def test_zero(self):
        assert throttle_map(0.0, PipelineConfig(throttle_gain=0.5)) == 0.0

    def test_saturates_high(self):
        assert throttle_map(3.0, PipelineConfig(throttle_gain=0.5)) == 1.0

    def test_linear_region_matches_scalar_reference(self):
        cfg = PipelineConfig(throttle_gain=0.5)
        ref = max(-1.0, min(1.0, 0.5 * -1.0))
        assert throttle_map(-1.0, cfg) == ref == -0.5

    def test_non_finite_rejected(self):
        cfg = PipelineConfig()
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(NonFiniteInput):
                throttle_map(bad, cfg)

    def test_monotone_and_odd(self):
        rng = random.Random(5)
        cfg = PipelineConfig(throttle_gain=0.7)
        values = sorted(rng.uniform(-50, 50) for _ in range(500))
        mapped = [throttle_map(v, cfg) for v in values]
        assert mapped == sorted(mapped)
        for v in values:
            assert throttle_map(-v, cfg) == -throttle_map(v, cfg)

    def test_always_in_range(self):
        rng = random.Random(6)
        for _ in range(2000):
            gain = rng.uniform(1e-3, 100)
            rps = rng.uniform(-1e6, 1e6)
            out = throttle_map(rps, PipelineConfig(throttle_gain=gain))
            assert -1.0 <= out <= 1.0


class TestSteeringDelta:
    def test_at_reference(self):
        assert steering_delta(AbsoluteAngle(0.0), PipelineConfig()) == 0.0

    def test_wrap_long_way(self):
        cfg = PipelineConfig(reference_angle_deg=0.0)
        assert steering_delta(AbsoluteAngle(190.0), cfg) == wrap_reference(190.0) == -170.0

    def test_wrap_across_zero(self):
        cfg = PipelineConfig(reference_angle_deg=350.0)
        assert steering_delta(AbsoluteAngle(90.0), cfg) == wrap_reference(90.0 - 350.0) == 100.0

    def test_matches_wrap_oracle_everywhere(self):
        rng = random.Random(9)
        for _ in range(2000):
            cur = rng.uniform(0, 360) % 360.0
            ref = rng.uniform(0, 360) % 360.0
            got = steering_delta(AbsoluteAngle(cur), PipelineConfig(reference_angle_deg=ref))
            assert got == pytest.approx(wrap_reference(cur - ref), abs=1e-9)
            assert -180.0 <= got <= 180.0

    def test_reference_equals_current_is_zero(self):
        rng = random.Random(10)
        for _ in range(200):
            a = rng.uniform(0, 359.999)
            assert steering_delta(AbsoluteAngle(a), PipelineConfig(reference_angle_deg=a)) == 0.0

    def test_shift_invariance(self):
        # Rotating both current and reference together leaves the wrapped
        # output unchanged (up to the +/-180 boundary flip).
        rng = random.Random(11)
        for _ in range(500):
            cur, ref, shift = rng.uniform(0, 360), rng.uniform(0, 360), rng.uniform(-720, 720)
            a = steering_delta(AbsoluteAngle(cur), PipelineConfig(reference_angle_deg=ref))
            b = steering_delta(
                AbsoluteAngle(cur + shift),
                PipelineConfig(reference_angle_deg=(ref + shift) % 360.0),
            )
            assert abs(wrap_reference(a - b)) < 1e-9

    def test_exact_opposite_maps_right(self):
        # The 180-degree tie breaks to +180 for determinism.
        assert steering_delta(AbsoluteAngle(180.0), PipelineConfig(reference_angle_deg=0.0)) == 180.0


class TestControlStage:
    def _samples(self, count, t0, n, angle):
        pairs = []
        for i in range(1, n + 1):
            pairs.append((IncrementalSample(count * i // n, t0 + i * 1000), AbsoluteAngle(angle)))
        return pairs

    def test_empty_window_holds(self):
        stage = ControlStage(PipelineConfig(), EncoderConfig())
        stage.command_from(0.0, 40.0)  # prime steering to 40
        cmd = stage.tick([])
        assert cmd.throttle == 0.0
        assert cmd.steering_delta_deg == 40.0

    def test_full_speed_window(self):
        # ticks_to_rps then throttle_map, composed by hand as the reference.
        cfg = PipelineConfig(throttle_gain=1.0, control_period_us=1000000)
        enc = EncoderConfig(pulses_per_revolution=600)
        stage = ControlStage(cfg, enc)
        cmd = stage.tick(self._samples(600, 0, 100, 0.0))
        ref = max(-1.0, min(1.0, 1.0 * (600 / (600 * 1.0))))
        assert cmd.throttle == ref == 1.0

    def test_handlebar_at_reference_gives_zero(self):
        stage = ControlStage(PipelineConfig(reference_angle_deg=30.0), EncoderConfig())
        cmd = stage.tick(self._samples(0, 0, 20, 30.0))
        assert cmd.steering_delta_deg == 0.0

    def test_window_delta_not_cumulative(self):
        cfg = PipelineConfig(throttle_gain=1.0, control_period_us=1000000)
        enc = EncoderConfig(pulses_per_revolution=600)
        stage = ControlStage(cfg, enc)
        stage.tick([(IncrementalSample(300, 1000000), AbsoluteAngle(0.0))])
        cmd = stage.tick([(IncrementalSample(600, 2000000), AbsoluteAngle(0.0))])
        assert cmd.throttle == 0.5  # 300 new ticks, not 600

    def test_command_from_decoded_frame_values(self):
        stage = ControlStage(PipelineConfig(throttle_gain=0.5), EncoderConfig())
        cmd = stage.command_from(1.0, 350.0)
        assert cmd.throttle == 0.5
        assert cmd.steering_delta_deg == -10.0
