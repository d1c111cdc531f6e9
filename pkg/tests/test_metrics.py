"""Tests for transition detection and ensemble statistics."""

import numpy as np
import pytest

from tpb_sim.metrics import (
    DetectionParams,
    Regime,
    adoption_rate,
    detect_transition,
    summarize_ensemble,
)
from tpb_sim.model import BehaviorType, ModelParams
from tpb_sim.population import PopulationConfig, Trajectory


def _traj(series, n=300, seed=0):
    params = ModelParams(phi=0.7, beta=5.0, behavior=BehaviorType.BENEFICIAL)
    config = PopulationConfig.for_behavior(BehaviorType.BENEFICIAL, n=n, seed=seed)
    return Trajectory(params=params, config=config, y_avg_series=list(series))


SHORT = DetectionParams(window=10)


class TestDetectionParams:
    def test_defaults(self):
        d = DetectionParams()
        assert d.adopt_threshold == 0.98
        assert d.reject_threshold == 0.02
        assert d.window == 50
        assert d.noise_floor == 0.015

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(adopt_threshold=0.3, reject_threshold=0.5),
            dict(adopt_threshold=1.2),
            dict(reject_threshold=-0.1),
            dict(window=0),
            dict(noise_floor=-0.5),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            DetectionParams(**kwargs)


class TestDetectTransition:
    def test_constant_one_is_adoption_at_zero(self):
        out = detect_transition(_traj([1.0] * 60))
        assert out.regime is Regime.FULL_ADOPTION
        assert out.transition_time == 0
        assert out.terminal_rate == 1.0

    def test_constant_zero_is_rejection_at_zero(self):
        out = detect_transition(_traj([0.0] * 60))
        assert out.regime is Regime.FULL_REJECTION
        assert out.transition_time == 0
        assert out.terminal_rate == 0.0

    def test_time_is_first_crossing_that_holds_to_the_end(self):
        series = [0.1] * 20 + [0.99] * 40
        out = detect_transition(_traj(series))
        assert out.regime is Regime.FULL_ADOPTION
        assert out.transition_time == 20

    def test_brief_dip_after_crossing_keeps_first_crossing_time(self):
        # Terminal saturation decides the regime; the reported time is the
        # first crossing, tolerating later single-step dips.
        series = [0.1] * 20 + [0.99] * 10 + [0.97] + [0.99] * 29
        out = detect_transition(_traj(series))
        assert out.regime is Regime.FULL_ADOPTION
        assert out.transition_time == 20

    def test_crossing_without_holding_is_not_adoption(self):
        series = [0.1] * 10 + [0.99] * 10 + [0.5] * 40
        out = detect_transition(_traj(series), SHORT)
        assert out.regime is not Regime.FULL_ADOPTION
        assert out.transition_time is None

    def test_rejection_time_symmetric(self):
        series = [0.8] * 15 + [0.01] * 45
        out = detect_transition(_traj(series))
        assert out.regime is Regime.FULL_REJECTION
        assert out.transition_time == 15

    def test_appending_saturated_tail_preserves_time(self):
        series = [0.1] * 20 + [0.99] * 40
        base = detect_transition(_traj(series))
        extended = detect_transition(_traj(series + [1.0] * 100))
        assert base.regime is extended.regime is Regime.FULL_ADOPTION
        assert base.transition_time == extended.transition_time == 20

    def test_binomial_noise_is_noise_dominated(self):
        rng = np.random.default_rng(83)
        series = rng.binomial(300, 0.5, size=120) / 300.0
        out = detect_transition(_traj(series.tolist()))
        assert out.regime is Regime.NOISE_DOMINATED
        assert out.transition_time is None
        mean, std = out.fluctuation_band
        assert abs(mean - 0.5) < 0.02
        assert abs(std - 0.0289) < 0.015

    def test_flat_intermediate_level_is_stalemate(self):
        out = detect_transition(_traj([0.1] * 80))
        assert out.regime is Regime.STALEMATE
        assert out.transition_time is None
        assert out.terminal_rate == 0.1

    def test_quiet_middle_mean_is_stalemate_not_noise(self):
        # Mean near 0.5 but variance below the noise floor.
        out = detect_transition(_traj([0.5] * 80))
        assert out.regime is Regime.STALEMATE

    def test_terminal_rate_is_final_entry(self):
        series = [0.1] * 70 + [0.37]
        out = detect_transition(_traj(series))
        assert out.terminal_rate == 0.37

    def test_exactly_one_regime_for_random_series(self):
        rng = np.random.default_rng(89)
        for _ in range(200):
            series = rng.uniform(0.0, 1.0, size=60).tolist()
            out = detect_transition(_traj(series))
            assert out.regime in Regime
            has_time = out.transition_time is not None
            assert has_time == (
                out.regime in (Regime.FULL_ADOPTION, Regime.FULL_REJECTION)
            )

    def test_window_longer_than_series_rejected(self):
        with pytest.raises(ValueError):
            detect_transition(_traj([0.5] * 20))

    def test_accepts_raw_series(self):
        out = detect_transition([1.0] * 60)
        assert out.regime is Regime.FULL_ADOPTION


class TestSummarizeEnsemble:
    def test_single_trajectory_median_is_itself(self):
        series = [0.1, 0.4, 0.9, 1.0]
        summary = summarize_ensemble([_traj(series)], DetectionParams(window=4))
        assert summary.median.tolist() == series
        assert summary.q10.tolist() == series
        assert summary.q90.tolist() == series
        assert summary.replicates == 1

    def test_lower_rank_median(self):
        # Lower-nearest rank: with two replicates every quantile below 1.0
        # lands on the smaller value.
        trajs = [_traj([0.2] * 12, seed=0), _traj([0.4] * 12, seed=1)]
        summary = summarize_ensemble(trajs, SHORT)
        assert all(v == 0.2 for v in summary.median)
        assert all(v == 0.2 for v in summary.q10)
        assert all(v == 0.2 for v in summary.q90)

    def test_lower_rank_quantiles_pick_occurring_values(self):
        trajs = [_traj([i / 10.0] * 12, seed=i) for i in range(10)]
        summary = summarize_ensemble(trajs, SHORT)
        assert all(v == 0.0 for v in summary.q10)
        assert all(v == 0.4 for v in summary.median)
        assert all(v == 0.8 for v in summary.q90)

    def test_quantiles_ordered(self):
        rng = np.random.default_rng(97)
        trajs = [
            _traj(rng.uniform(0, 1, size=15).tolist(), seed=i) for i in range(9)
        ]
        summary = summarize_ensemble(trajs, SHORT)
        assert np.all(summary.q10 <= summary.median)
        assert np.all(summary.median <= summary.q90)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(101)
        trajs = [
            _traj(rng.uniform(0, 1, size=15).tolist(), seed=i) for i in range(7)
        ]
        a = summarize_ensemble(trajs, SHORT)
        b = summarize_ensemble(list(reversed(trajs)), SHORT)
        assert np.array_equal(a.median, b.median)
        assert a.regime_counts == b.regime_counts
        assert a.median_transition_time == b.median_transition_time

    def test_regime_counts_sum_to_replicates(self):
        trajs = [
            _traj([1.0] * 12, seed=0),
            _traj([0.0] * 12, seed=1),
            _traj([0.1] * 12, seed=2),
        ]
        summary = summarize_ensemble(trajs, SHORT)
        assert sum(summary.regime_counts.values()) == 3
        assert summary.regime_counts[Regime.FULL_ADOPTION] == 1
        assert summary.regime_counts[Regime.FULL_REJECTION] == 1
        assert summary.regime_counts[Regime.STALEMATE] == 1
        assert set(summary.regime_counts) == set(Regime)

    def test_median_transition_time_lower_rank_over_transitioned(self):
        trajs = [
            _traj([0.1] * 3 + [1.0] * 11, seed=0),   # crosses at t=3
            _traj([0.1] * 7 + [1.0] * 7, seed=1),    # crosses at t=7
            _traj([0.1] * 11 + [1.0] * 3, seed=2),   # crosses at t=11
            _traj([0.1] * 14, seed=3),               # never crosses
        ]
        summary = summarize_ensemble(trajs, SHORT)
        assert summary.median_transition_time == 7
        assert summary.transition_time_iqr == (3, 7)

    def test_no_transitions_gives_none(self):
        summary = summarize_ensemble([_traj([0.1] * 12)], SHORT)
        assert summary.median_transition_time is None
        assert summary.transition_time_iqr is None

    def test_terminal_median(self):
        trajs = [_traj([0.2] * 12, seed=0), _traj([0.6] * 12, seed=1)]
        summary = summarize_ensemble(trajs, SHORT)
        assert summary.terminal_median == 0.2

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            summarize_ensemble([], SHORT)

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            summarize_ensemble([_traj([0.1] * 12), _traj([0.1] * 13)], SHORT)

    def test_mismatched_params_rejected(self):
        a = _traj([0.1] * 12)
        b = Trajectory(
            params=ModelParams(phi=0.3, beta=5.0, behavior=BehaviorType.BENEFICIAL),
            config=a.config,
            y_avg_series=[0.1] * 12,
        )
        with pytest.raises(ValueError):
            summarize_ensemble([a, b], SHORT)


class TestAdoptionRate:
    def test_all_ones_and_zeros(self):
        assert adoption_rate([1, 1, 1, 1]) == 1.0
        assert adoption_rate([0, 0, 0, 0]) == 0.0

    def test_ten_percent(self):
        assert adoption_rate([0] * 270 + [1] * 30) == 0.1

    def test_exact_mean(self):
        assert adoption_rate([1, 0, 1, 1]) == 0.75

    def test_validation(self):
        with pytest.raises(ValueError):
            adoption_rate([])
        with pytest.raises(ValueError):
            adoption_rate([0, 2])
