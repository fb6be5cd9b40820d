import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jumplock.dynamics import ReducedLambdaParams, TwoLevelParams
from jumplock.errors import ConfigurationError, DomainError
from jumplock.feedback import FeedbackConfig, FeedbackState, on_detected_click, on_tick, run_closed_loop
from jumplock.jumps import DetectionModel, RngStream
from jumplock.oracles.checks import frozen_phases
from jumplock.oracles.kapitsa import expected_drift, kapitsa_coefficients, phase_density_two_level, two_level_contraction
from jumplock.qstate import BrightDarkBasis


@pytest.fixture
def cfg():
    return FeedbackConfig(0.5, 9e-4, 1.0)


@pytest.fixture
def lambda_cfg():
    return FeedbackConfig(0.4, 0.015, 1.0, variant="lambda", alpha=math.pi / 4)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(c_bound=0.0), dict(delta_gain=-1e-3), dict(dead_time=-1.0), dict(omega=0.0)])
    def test_domain_errors(self, kwargs):
        base = dict(c_bound=0.5, delta_gain=1e-3, omega=1.0)
        with pytest.raises(DomainError):
            FeedbackConfig(**{**base, **kwargs})

    def test_lambda_needs_alpha(self):
        with pytest.raises(ConfigurationError):
            FeedbackConfig(0.4, 1e-3, 1.0, variant="lambda")

    @pytest.mark.parametrize("kwargs", [dict(variant="three-level"), dict(clip_mode="wrap")])
    def test_unknown_options(self, kwargs):
        with pytest.raises(ConfigurationError):
            FeedbackConfig(0.5, 1e-3, 1.0, **kwargs)

    def test_lambda_bound_warning(self):
        with pytest.warns(UserWarning, match="C < 1/2"):
            FeedbackConfig(0.5, 1e-3, 1.0, variant="lambda", alpha=0.3)

    def test_two_level_frequency_warning(self):
        with pytest.warns(UserWarning, match="omega"):
            FeedbackConfig(0.5, 1e-3, 0.6)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            FeedbackConfig(0.5, 1e-3, 1.0)

    def test_gain_factor(self, cfg, lambda_cfg):
        assert cfg.gain_factor == 1.0
        assert lambda_cfg.gain_factor == pytest.approx(1.0)
        assert FeedbackConfig(0.4, 1e-3, 1.0, variant="lambda", alpha=math.pi / 12).gain_factor == pytest.approx(0.5)


class TestUpdateRule:
    def test_tick_accumulates(self):
        fs = on_tick(on_tick(FeedbackState(0.1), 0.5), 0.25)
        assert fs.stopwatch == pytest.approx(0.75)
        with pytest.raises(DomainError):
            on_tick(fs, 0.0)

    def test_two_level_step(self, cfg):
        fs = FeedbackState(0.5, stopwatch=1.0)
        on_detected_click(fs, 0.0, cfg, phase=math.pi / 2)
        assert fs.delta_n == pytest.approx(0.4991)
        assert fs.counter == 1 and fs.stopwatch == 0.0
        assert fs.history[-1].matured

    def test_default_phase_from_time(self, cfg):
        fs = FeedbackState(0.2, stopwatch=1.0)
        on_detected_click(fs, 2 * math.pi + math.pi / 2, cfg)
        assert fs.history[-1].phase == pytest.approx(math.pi / 2)
        assert fs.delta_n == pytest.approx(0.2 - 9e-4)

    def test_lambda_step_uses_cosine(self, lambda_cfg):
        fs = FeedbackState(0.1, stopwatch=1.0)
        on_detected_click(fs, 0.0, lambda_cfg, phase=0.0)
        assert fs.delta_n == pytest.approx(0.085)

    def test_default_clip_maps_to_upper_bound(self, cfg):
        fs = FeedbackState(0.5, stopwatch=1.0)
        on_detected_click(fs, 0.0, cfg, phase=3 * math.pi / 2)
        assert fs.delta_n == 0.5
        fs = FeedbackState(-0.5, stopwatch=1.0)
        on_detected_click(fs, 0.0, cfg, phase=math.pi / 2)
        assert fs.delta_n == 0.5

    def test_symmetric_clip(self):
        cfg = FeedbackConfig(0.5, 9e-4, 1.0, clip_mode="symmetric")
        fs = FeedbackState(-0.5, stopwatch=1.0)
        on_detected_click(fs, 0.0, cfg, phase=math.pi / 2)
        assert fs.delta_n == -0.5

    def test_dead_time_gating(self):
        cfg = FeedbackConfig(0.5, 9e-4, 1.0, dead_time=2.0)
        fs = FeedbackState(0.3)
        on_tick(fs, 1.5)
        on_detected_click(fs, 1.5, cfg, phase=math.pi / 2)
        assert fs.delta_n == 0.3 and fs.counter == 0 and not fs.history[-1].matured
        on_tick(fs, 2.5)
        on_detected_click(fs, 4.0, cfg, phase=math.pi / 2)
        assert fs.delta_n == pytest.approx(0.3 - 9e-4) and fs.counter == 1

    def test_dead_time_is_strict(self):
        cfg = FeedbackConfig(0.5, 9e-4, 1.0, dead_time=2.0)
        fs = on_tick(FeedbackState(0.3), 2.0)
        on_detected_click(fs, 2.0, cfg, phase=math.pi / 2)
        assert fs.counter == 0

    @given(st.floats(-1, 1), st.floats(0, 2 * math.pi), st.floats(0, 0.1), st.booleans())
    def test_clip_safety_and_step_bound(self, u, phase, gain, symmetric):
        cfg = FeedbackConfig(0.5, gain, 1.0, clip_mode="symmetric" if symmetric else "paper")
        fs = FeedbackState(0.5 * u, stopwatch=1.0)
        on_detected_click(fs, 0.0, cfg, phase=phase)
        assert abs(fs.delta_n) <= 0.5
        if abs(fs.delta_n) < 0.5:
            assert abs(fs.delta_n - 0.5 * u) <= gain * (1 + 1e-12)


class TestClosedLoop:
    def test_zero_gain_keeps_detuning(self, two_level):
        cfg = FeedbackConfig(0.5, 0.0, 1.0)
        r = run_closed_loop(two_level, cfg, DetectionModel((0.9,)), RngStream(1), delta0=0.25, max_clicks=200)
        assert np.all(r.deltas == 0.25)
        assert r.n_clicks == 200

    def test_stop_on_clicks(self, two_level, cfg):
        r = run_closed_loop(two_level, cfg, DetectionModel((1.0,)), RngStream(2), delta0=0.25, max_clicks=50)
        assert r.n_clicks == 50 and r.counter[-1] == 50 and r.matured[-1]

    def test_stop_on_time(self, two_level, cfg):
        r = run_closed_loop(two_level, cfg, DetectionModel((1.0,)), RngStream(2), delta0=0.25, max_time=300.0)
        assert r.final_time <= 300.0
        assert r.final_time == pytest.approx(300.0, abs=0.1)
        assert np.all(r.t <= r.final_time)

    def test_history_invariants(self, two_level):
        cfg = FeedbackConfig(0.3, 0.02, 1.0, dead_time=3.0)
        r = run_closed_loop(two_level, cfg, DetectionModel((0.7,)), RngStream(8), delta0=0.25, max_clicks=300)
        d = r.deltas
        assert np.all(np.abs(d) <= 0.3)
        steps = np.abs(np.diff(d))[np.abs(d[1:]) < 0.3]
        assert steps.max() <= 0.02 + 1e-15
        assert np.all(np.diff(r.counter) >= 0)
        assert np.all(r.counter[~r.detected] == np.maximum.accumulate(r.counter)[~r.detected])

    def test_variant_mismatch(self, two_level, lambda_cfg):
        with pytest.raises(ConfigurationError):
            run_closed_loop(two_level, lambda_cfg, DetectionModel((1.0,)), RngStream(0), delta0=0, max_clicks=1)

    def test_unit_mismatch(self):
        plant = ReducedLambdaParams(0.0, 0.03, 20.0, BrightDarkBasis.from_angle(math.pi / 4))
        cfg = FeedbackConfig(0.4, 0.01, 10.0, variant="lambda", alpha=math.pi / 4)
        with pytest.raises(ConfigurationError, match="omega"):
            run_closed_loop(plant, cfg, DetectionModel((1.0, 1.0)), RngStream(0), delta0=0, max_clicks=1)

    def test_alpha_mismatch(self):
        plant = ReducedLambdaParams(0.0, 0.03, 20.0, BrightDarkBasis.from_angle(math.pi / 4))
        cfg = FeedbackConfig(0.4, 0.01, 20.0, variant="lambda", alpha=0.3)
        with pytest.raises(ConfigurationError, match="alpha"):
            run_closed_loop(plant, cfg, DetectionModel((1.0, 1.0)), RngStream(0), delta0=0, max_clicks=1)

    def test_initial_detuning_outside_bound(self, two_level, cfg):
        with pytest.raises(DomainError):
            run_closed_loop(two_level, cfg, DetectionModel((1.0,)), RngStream(0), delta0=0.6, max_clicks=1)

    def test_needs_stop_condition(self, two_level, cfg):
        with pytest.raises(ConfigurationError):
            run_closed_loop(two_level, cfg, DetectionModel((1.0,)), RngStream(0), delta0=0.1)

    def test_unknown_engine(self, two_level, cfg):
        with pytest.raises(ConfigurationError):
            run_closed_loop(two_level, cfg, DetectionModel((1.0,)), RngStream(0), delta0=0.1, max_clicks=1,
                            engine="euler")


class TestDrift:
    def test_mean_update_matches_oracle(self):
        delta, eps, gain = 0.3, 0.06, 9e-4
        phases = frozen_phases(TwoLevelParams(delta, eps, eps, 1.0), 20_000, 20.0, seed=5)
        updates = -gain * np.sin(phases)
        expected = expected_drift(kapitsa_coefficients(delta, 1.0, 1.0, 1.0), gain)
        se = updates.std(ddof=1) / math.sqrt(len(updates))
        assert expected < 0
        assert abs(updates.mean() - expected) < 3 * se

    @pytest.mark.parametrize("fraction", [1 / 2, 1 / 4, 1 / 8])
    def test_mean_square_contraction(self, fraction):
        # One-step E[Delta'^2] from the stationary phase density, against the
        # contraction bound up to O(eps^4).
        c, eps, omega = 0.5, 0.06, 1.0
        gain = 0.25 * eps**2
        delta = fraction * c
        density = phase_density_two_level(kapitsa_coefficients(delta, omega, 1.0, 1.0), eps)
        phi = density.grid
        w = density.values()
        w = w / w.sum()
        second = float(np.sum(w * (delta - gain * np.sin(phi)) ** 2))
        sigma = two_level_contraction(omega, c, 1.0, 1.0, 0.25)
        assert second < delta**2
        assert second <= (1 - eps**2 * sigma) * delta**2 + 10 * eps**4
