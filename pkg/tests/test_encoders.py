import random

import pytest

from navis.encoders import (
    FORWARD_ORDER,
    AbsoluteAngle,
    EncoderConfig,
    InvalidTransition,
    NonPositiveInterval,
    QuadraturePhase,
    RideProfile,
    UnorderedProfile,
    emulate_ride,
    phase_of,
    quadrature_step,
    quantize_angle,
    sample_clock,
    ticks_to_rps,
)


class TestQuadrature:
    def test_forward_step(self):
        assert quadrature_step(QuadraturePhase(0, 0), QuadraturePhase(1, 0)) == 1

    def test_no_change(self):
        assert quadrature_step(QuadraturePhase(1, 1), QuadraturePhase(1, 1)) == 0

    def test_diagonal_jump_rejected(self):
        with pytest.raises(InvalidTransition):
            quadrature_step(QuadraturePhase(0, 0), QuadraturePhase(1, 1))

    def test_full_cycle_forward_and_back(self):
        for i in range(4):
            assert quadrature_step(FORWARD_ORDER[i], FORWARD_ORDER[(i + 1) % 4]) == 1
            assert quadrature_step(FORWARD_ORDER[(i + 1) % 4], FORWARD_ORDER[i]) == -1

    def test_bad_levels_rejected(self):
        with pytest.raises(ValueError):
            QuadraturePhase(2, 0)

    def test_random_walks_recover_net_count(self):
        # Decoded steps must sum to the generating walk's net movement exactly.
        rng = random.Random(7)
        for _ in range(50):
            position = 0
            prev = phase_of(position)
            decoded = 0
            for _ in range(1000):
                position += rng.choice((-1, 1))
                cur = phase_of(position)
                decoded += quadrature_step(prev, cur)
                prev = cur
            assert decoded == position


class TestTicksToRps:
    def test_one_revolution_per_second(self):
        assert ticks_to_rps(600, EncoderConfig(600), 1.0) == 1.0

    def test_zero(self):
        assert ticks_to_rps(0, EncoderConfig(600), 0.157) == 0.0

    def test_negative_matches_single_tick_accumulation(self):
        # Reference: feed the same motion one tick at a time.
        total = 0
        for _ in range(300):
            total += -1
        assert ticks_to_rps(total, EncoderConfig(600), 0.5) == -1.0
        assert ticks_to_rps(-300, EncoderConfig(600), 0.5) == -1.0

    def test_nonpositive_interval(self):
        with pytest.raises(NonPositiveInterval):
            ticks_to_rps(1, EncoderConfig(600), 0.0)
        with pytest.raises(NonPositiveInterval):
            ticks_to_rps(1, EncoderConfig(600), -0.1)

    def test_linearity(self):
        rng = random.Random(3)
        cfg = EncoderConfig(600)
        for _ in range(200):
            ticks = rng.randrange(-5000, 5000)
            dt = rng.uniform(0.01, 2.0)
            assert ticks_to_rps(2 * ticks, cfg, dt) == 2 * ticks_to_rps(ticks, cfg, dt)


class TestEncoderConfig:
    def test_resolution_must_divide_circle(self):
        with pytest.raises(ValueError):
            EncoderConfig(angle_resolution_deg=0.7)
        EncoderConfig(angle_resolution_deg=0.5)

    def test_ppr_positive(self):
        with pytest.raises(ValueError):
            EncoderConfig(pulses_per_revolution=0)


class TestAbsoluteAngle:
    def test_normalized(self):
        assert AbsoluteAngle(370.0).degrees == 10.0
        assert AbsoluteAngle(-30.0).degrees == 330.0
        assert AbsoluteAngle(360.0).degrees == 0.0

    def test_quantize(self):
        cfg = EncoderConfig(angle_resolution_deg=0.1)
        assert quantize_angle(12.34, cfg).degrees == pytest.approx(12.3)
        assert quantize_angle(359.97, cfg).degrees == 0.0


class TestRideProfile:
    def test_parse_script(self):
        profile = RideProfile.from_text("# warmup\n0 0.0 0\n1000000 1.0 15\n\n")
        assert len(profile) == 2
        assert profile.rps_at(500000) == pytest.approx(0.5)
        assert profile.handlebar_at(500000) == pytest.approx(7.5)

    def test_hold_outside_span(self):
        profile = RideProfile.from_text("1000000 2.0 30\n2000000 4.0 30\n")
        assert profile.rps_at(0) == 2.0
        assert profile.rps_at(5000000) == 4.0

    def test_repeated_time_rejected(self):
        with pytest.raises(UnorderedProfile):
            RideProfile.from_text("0 1 0\n0 2 0\n")

    def test_bad_line_rejected(self):
        with pytest.raises(ValueError):
            RideProfile.from_text("0 1\n")

    def test_exact_integral_matches_fine_accumulator(self):
        # Reference: accumulate the interpolated rate over 1 us steps.
        profile = RideProfile.from_text("0 0.0 0\n100000 2.0 0\n300000 -1.0 0\n")
        acc = 0.0
        for t in range(0, 300000):
            acc += profile.rps_at(t) * 1e-6
        assert profile.revs_until(300000) == pytest.approx(acc, abs=1e-5)


class TestEmulateRide:
    def test_constant_profile_tick_total(self):
        # Reference accumulator: integrate the profile directly.
        profile = RideProfile.from_text("0 1.0 0\n")
        cfg = EncoderConfig(pulses_per_revolution=600)
        samples = list(emulate_ride(profile, cfg, sample_clock(1000, 1000000)))
        assert len(samples) == 1000
        final = samples[-1][0].tick_count
        assert abs(final - 600) <= 1

    def test_empty_profile_empty_stream(self):
        assert list(emulate_ride(RideProfile([]), EncoderConfig(), sample_clock(1000, 10000))) == []

    def test_sample_times_strictly_increase(self):
        profile = RideProfile.from_text("0 0.5 10\n")
        samples = list(emulate_ride(profile, EncoderConfig(), sample_clock(500, 100000)))
        times = [s.t for s, _ in samples]
        assert times == sorted(set(times))

    def test_non_monotonic_clock_rejected(self):
        profile = RideProfile.from_text("0 0.5 10\n")
        with pytest.raises(ValueError):
            list(emulate_ride(profile, EncoderConfig(), iter([1000, 1000])))

    def test_angle_follows_script_quantized(self):
        profile = RideProfile.from_text("0 0.0 0\n1000000 0.0 90\n")
        cfg = EncoderConfig(angle_resolution_deg=0.5)
        samples = dict((s.t, a.degrees) for s, a in emulate_ride(profile, cfg, sample_clock(250000, 1000000)))
        assert samples[500000] == pytest.approx(45.0)
        assert samples[1000000] == pytest.approx(90.0)

    def test_windowed_decode_tracks_profile_mean(self):
        # Any >= 10 sample window decodes to the profile's mean rate within
        # one tick quantum (two endpoint roundings of half a tick each).
        rng = random.Random(11)
        points = ["0 0.0 0"]
        t = 0
        for _ in range(6):
            t += rng.randrange(50000, 400000)
            points.append(f"{t} {rng.uniform(-3, 3):.3f} 0")
        profile = RideProfile.from_text("\n".join(points))
        cfg = EncoderConfig(pulses_per_revolution=600)
        period = 1000
        samples = list(emulate_ride(profile, cfg, sample_clock(period, t)))
        for _ in range(100):
            i = rng.randrange(0, len(samples) - 10)
            j = rng.randrange(i + 10, len(samples))
            s0, s1 = samples[i][0], samples[j][0]
            dt_s = (s1.t - s0.t) * 1e-6
            decoded = ticks_to_rps(s1.tick_count - s0.tick_count, cfg, dt_s)
            mean = (profile.revs_until(s1.t) - profile.revs_until(s0.t)) / dt_s
            quantum = 1.0 / (cfg.pulses_per_revolution * dt_s)
            assert abs(decoded - mean) <= quantum
