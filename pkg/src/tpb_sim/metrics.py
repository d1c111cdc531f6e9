"""Trajectory classification and ensemble summaries.

A trajectory's long-run fate is one of four regimes. FullAdoption means
the adoption rate ends saturated: it is at or above the adoption threshold
and stays there through the last step. FullRejection is the mirror image
below the rejection threshold. A trajectory that ends saturated gets a
transition time: the first step at which the rate ever crossed the
threshold. Otherwise the final window decides: noisy around a middling
mean is NoiseDominated, anything else is Stalemate.

Quantiles everywhere use the lower-nearest-rank rule (no interpolation),
so summary values are always values that actually occurred.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .population import Trajectory

__all__ = [
    "Regime",
    "DetectionParams",
    "TransitionOutcome",
    "EnsembleSummary",
    "detect_transition",
    "summarize_ensemble",
    "adoption_rate",
]


class Regime(enum.Enum):
    FULL_ADOPTION = "full_adoption"
    FULL_REJECTION = "full_rejection"
    STALEMATE = "stalemate"
    NOISE_DOMINATED = "noise_dominated"


@dataclass(frozen=True)
class DetectionParams:
    """Thresholds for regime classification.

    With n = 300 the default adoption threshold 0.98 tolerates six agents
    flipping near saturation; the noise floor 0.015 sits between the
    single-agent flicker of a stalemate and the ~0.029 stddev of coin-flip
    choice at that population size.
    """

    adopt_threshold: float = 0.98
    reject_threshold: float = 0.02
    window: int = 50
    noise_floor: float = 0.015

    def __post_init__(self):
        a, r = float(self.adopt_threshold), float(self.reject_threshold)
        if not (0.0 <= r < a <= 1.0):
            raise ValueError(
                "thresholds must satisfy 0 <= reject_threshold < adopt_threshold <= 1, "
                f"got reject={self.reject_threshold!r} adopt={self.adopt_threshold!r}"
            )
        object.__setattr__(self, "adopt_threshold", a)
        object.__setattr__(self, "reject_threshold", r)
        if isinstance(self.window, bool) or not isinstance(self.window, (int, np.integer)) or self.window < 1:
            raise ValueError(f"window must be a positive integer, got {self.window!r}")
        object.__setattr__(self, "window", int(self.window))
        nf = float(self.noise_floor)
        if not nf >= 0.0:
            raise ValueError(f"noise_floor must be >= 0, got {self.noise_floor!r}")
        object.__setattr__(self, "noise_floor", nf)


@dataclass(frozen=True)
class TransitionOutcome:
    """Classification of a single trajectory.

    transition_time is None unless the regime is FullAdoption or
    FullRejection; fluctuation_band is (mean, stddev) of the final window.
    """

    regime: Regime
    transition_time: int | None
    terminal_rate: float
    fluctuation_band: tuple[float, float]


def _series_of(traj) -> np.ndarray:
    if isinstance(traj, Trajectory):
        series = np.asarray(traj.y_avg_series, dtype=np.float64)
    else:
        series = np.asarray(traj, dtype=np.float64)
    if series.ndim != 1 or len(series) < 1:
        raise ValueError("trajectory must be a non-empty 1-d series")
    return series


def detect_transition(traj, detection: DetectionParams | None = None) -> TransitionOutcome:
    """Classify one trajectory (a Trajectory or a plain rate series).

    A FullAdoption trajectory must hold at or above the adoption threshold
    through the final step; its transition time is the first step at which
    the rate reached the threshold, matching the usual reading of "full
    adoption is reached by t". Appending saturated values to a saturated
    trajectory therefore never changes the reported time. FullRejection is
    symmetric. Everything else is NoiseDominated when the final window is
    both noisy (stddev above the floor) and mid-range, else Stalemate.
    """
    detection = detection if detection is not None else DetectionParams()
    if not isinstance(detection, DetectionParams):
        raise ValueError(f"detection must be a DetectionParams, got {detection!r}")
    s = _series_of(traj)
    if detection.window > len(s):
        raise ValueError(
            f"window {detection.window} exceeds trajectory length {len(s)}"
        )
    adopt, reject = detection.adopt_threshold, detection.reject_threshold
    tail = s[-detection.window:]
    band = (float(tail.mean()), float(tail.std()))
    terminal = float(s[-1])

    if terminal >= adopt:
        k = len(s)
        while k > 0 and s[k - 1] >= adopt:
            k -= 1
        if k == 0:  # saturated from the start
            return TransitionOutcome(Regime.FULL_ADOPTION, 0, terminal, band)
        first = int(np.nonzero(s >= adopt)[0][0])
        return TransitionOutcome(Regime.FULL_ADOPTION, first, terminal, band)
    if terminal <= reject:
        k = len(s)
        while k > 0 and s[k - 1] <= reject:
            k -= 1
        if k == 0:
            return TransitionOutcome(Regime.FULL_REJECTION, 0, terminal, band)
        first = int(np.nonzero(s <= reject)[0][0])
        return TransitionOutcome(Regime.FULL_REJECTION, first, terminal, band)
    if band[1] > detection.noise_floor and reject < band[0] < adopt:
        return TransitionOutcome(Regime.NOISE_DOMINATED, None, terminal, band)
    return TransitionOutcome(Regime.STALEMATE, None, terminal, band)


def _quantile_lower(values, q) -> float:
    return float(np.quantile(np.asarray(values, dtype=np.float64), q, method="lower"))


@dataclass(eq=False, frozen=True)
class EnsembleSummary:
    """Order statistics and regime tallies over an ensemble of replicates."""

    q10: np.ndarray
    median: np.ndarray
    q90: np.ndarray
    regime_counts: dict
    median_transition_time: float | None
    transition_time_iqr: tuple[float, float] | None
    outcomes: tuple

    @property
    def replicates(self) -> int:
        return len(self.outcomes)

    @property
    def terminal_median(self) -> float:
        return float(self.median[-1])

    @property
    def per_step_quantiles(self) -> list[tuple[float, float, float]]:
        return [
            (float(a), float(b), float(c))
            for a, b, c in zip(self.q10, self.median, self.q90)
        ]


def summarize_ensemble(
    trajs: Sequence, detection: DetectionParams | None = None
) -> EnsembleSummary:
    """Per-step q10/median/q90 plus regime counts and transition times.

    All trajectories must share one length and one parameter set. The
    median transition time is taken over the replicates that transitioned
    (either direction); it is None when none did.
    """
    trajs = list(trajs)
    if not trajs:
        raise ValueError("ensemble must contain at least one trajectory")
    series = [_series_of(t) for t in trajs]
    length = len(series[0])
    if any(len(s) != length for s in series):
        raise ValueError("ensemble trajectories must share one length")
    params = [t.params for t in trajs if isinstance(t, Trajectory)]
    if params and any(p != params[0] for p in params[1:]):
        raise ValueError("ensemble trajectories must share one parameter set")

    stacked = np.vstack(series)
    q10 = np.quantile(stacked, 0.10, axis=0, method="lower")
    median = np.quantile(stacked, 0.50, axis=0, method="lower")
    q90 = np.quantile(stacked, 0.90, axis=0, method="lower")

    outcomes = tuple(detect_transition(s, detection) for s in series)
    counts = Counter(o.regime for o in outcomes)
    regime_counts = {regime: counts.get(regime, 0) for regime in Regime}

    times = sorted(
        o.transition_time for o in outcomes if o.transition_time is not None
    )
    if times:
        med_t = _quantile_lower(times, 0.50)
        iqr = (_quantile_lower(times, 0.25), _quantile_lower(times, 0.75))
    else:
        med_t, iqr = None, None

    return EnsembleSummary(
        q10=q10,
        median=median,
        q90=q90,
        regime_counts=regime_counts,
        median_transition_time=med_t,
        transition_time_iqr=iqr,
        outcomes=outcomes,
    )


def adoption_rate(actions) -> float:
    """Fraction of ones in a non-empty list of binary actions."""
    seq = list(actions)
    if not seq:
        raise ValueError("actions must be non-empty")
    ones = 0
    for a in seq:
        if isinstance(a, bool) or not (a == 0 or a == 1):
            raise ValueError(f"actions must be 0 or 1, got {a!r}")
        ones += int(a)
    return ones / len(seq)
