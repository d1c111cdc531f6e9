"""Population construction and synchronous stepping.

A population is a fixed-order collection of agents plus the RNG substreams
that drive it. Within a step every agent reads the same previous-step
adoption rate; the realized actions then define the next rate. Agent
storage order is otherwise irrelevant because agent i's action stream is
keyed by its stream id (defaulting to i), not by array position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as seeding
from ._kernels import get_kernel
from .model import (
    AgentState,
    BehaviorType,
    ModelParams,
    choice_probability,
    sample_action,
)

__all__ = [
    "PopulationConfig",
    "Population",
    "PopulationSnapshot",
    "Trajectory",
    "default_ranges",
    "init_population",
    "step",
    "run",
]

# (majority, minority) initial-attitude ranges
BENEFICIAL_RANGES = ((0.0, 0.4), (0.6, 0.7))
HARMFUL_RANGES = ((0.6, 1.0), (0.3, 0.4))


def default_ranges(behavior) -> tuple[tuple[float, float], tuple[float, float]]:
    """Default (majority, minority) initial-attitude ranges.

    Beneficial behaviors start mostly rejected (low-attitude majority with
    a small high-attitude minority); harmful ones start mostly adopted.
    """
    behavior = BehaviorType.parse(behavior)
    if behavior is BehaviorType.BENEFICIAL:
        return BENEFICIAL_RANGES
    return HARMFUL_RANGES


def _check_range(name: str, value) -> tuple[float, float]:
    try:
        lo, hi = value
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a (lo, hi) pair, got {value!r}") from None
    lo, hi = float(lo), float(hi)
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"{name} must satisfy 0 <= lo <= hi <= 1, got {value!r}")
    return (lo, hi)


@dataclass(frozen=True)
class PopulationConfig:
    """Immutable recipe for building an initial population.

    The first floor(alpha * n) agents in storage order form the majority
    and draw their initial attitudes uniformly from majority_range; the
    rest draw from minority_range. seed is the replicate's master seed.
    """

    n: int
    alpha: float
    behavior: BehaviorType
    majority_range: tuple[float, float]
    minority_range: tuple[float, float]
    seed: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        alpha = float(self.alpha)
        if not 0.5 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0.5,1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "behavior", BehaviorType.parse(self.behavior))
        object.__setattr__(
            self, "majority_range", _check_range("majority_range", self.majority_range)
        )
        object.__setattr__(
            self, "minority_range", _check_range("minority_range", self.minority_range)
        )
        object.__setattr__(self, "seed", seeding.check_seed(self.seed))

    @classmethod
    def for_behavior(
        cls,
        behavior,
        n: int = 300,
        alpha: float = 0.9,
        seed: int = 0,
        majority_range: tuple[float, float] | None = None,
        minority_range: tuple[float, float] | None = None,
    ) -> "PopulationConfig":
        """Config with the default attitude ranges of a behavior type."""
        behavior = BehaviorType.parse(behavior)
        dmaj, dmin = default_ranges(behavior)
        return cls(
            n=n,
            alpha=alpha,
            behavior=behavior,
            majority_range=dmaj if majority_range is None else majority_range,
            minority_range=dmin if minority_range is None else minority_range,
            seed=seed,
        )

    @property
    def majority_size(self) -> int:
        return int(math.floor(self.alpha * self.n))


@dataclass(eq=False, frozen=True)
class PopulationSnapshot:
    """Copies of every agent array at one time step."""

    t: int
    x: np.ndarray
    z: np.ndarray
    p: np.ndarray
    y: np.ndarray
    h: np.ndarray


class Population:
    """Mutable population state plus its private RNG substreams.

    Build with :func:`init_population` or :meth:`from_attitudes`, advance
    with :func:`step` or :func:`run`. The constructor is internal.
    """

    def __init__(self, config, x0, x, z, p, y, h, y_avg, bitgens, t=0):
        self.config = config
        self.t = t
        self.y_avg = y_avg
        self._x0 = x0
        self._x = x
        self._z = z
        self._p = p
        self._y = y
        self._h = h
        self._bitgens = bitgens

    @property
    def n(self) -> int:
        return self.config.n

    def agent(self, i: int) -> AgentState:
        """Value copy of agent i's state."""
        return AgentState(
            x0=float(self._x0[i]),
            x=float(self._x[i]),
            z=float(self._z[i]),
            p=float(self._p[i]),
            y=int(self._y[i]),
            h=int(self._h[i]),
        )

    @property
    def agents(self) -> list[AgentState]:
        return [self.agent(i) for i in range(self.n)]

    def snapshot(self) -> PopulationSnapshot:
        return PopulationSnapshot(
            t=self.t,
            x=self._x.copy(),
            z=self._z.copy(),
            p=self._p.copy(),
            y=self._y.copy(),
            h=self._h.copy(),
        )

    @classmethod
    def from_attitudes(
        cls,
        x0_values: Sequence[float],
        params: ModelParams,
        seed: int,
        stream_ids: Sequence[int] | None = None,
    ) -> "Population":
        """Population with explicitly given initial attitudes.

        Bypasses the majority/minority draw (the config's range fields are
        recorded as the trivial [0, 1]). stream_ids pins each agent to an
        action substream independently of storage order, which makes agent
        permutations reproducible.
        """
        x0 = np.asarray([float(v) for v in x0_values], dtype=np.float64)
        if x0.ndim != 1 or len(x0) < 1:
            raise ValueError("x0_values must be a non-empty 1-d sequence")
        if np.any(x0 < 0.0) or np.any(x0 > 1.0):
            raise ValueError("initial attitudes must lie in [0,1]")
        config = PopulationConfig(
            n=len(x0),
            alpha=1.0,
            behavior=params.behavior,
            majority_range=(0.0, 1.0),
            minority_range=(0.0, 1.0),
            seed=seed,
        )
        bitgens = seeding.agent_bit_generators(config.seed, config.n, stream_ids)
        return _finish_init(config, params, x0, bitgens)


def _finish_init(config, params, x0, bitgens) -> Population:
    """Shared tail of population construction: p(0), y(0), h(0)."""
    n = config.n
    x = x0.copy()
    z = x0.copy()  # initial intention equals initial attitude
    p = np.empty(n, dtype=np.float64)
    y = np.zeros(n, dtype=np.int8)
    h = np.zeros(n, dtype=np.int64)
    for i in range(n):
        pi = choice_probability(float(x0[i]), params.beta)
        p[i] = pi
        y[i] = sample_action(pi, np.random.Generator(bitgens[i]))
    h[:] = y
    y_avg = int(y.sum()) / n
    return Population(config, x0, x, z, p, y, h, y_avg, bitgens)


def init_population(config: PopulationConfig, params: ModelParams) -> Population:
    """Draw the initial population state from the config's master seed.

    Initial attitudes come from the init stream (uniform on the majority
    or minority range); the action at t = 0 is already a Bernoulli draw
    from each agent's own stream, so h(0) = y(0).
    """
    if not isinstance(config, PopulationConfig):
        raise ValueError(f"config must be a PopulationConfig, got {config!r}")
    if not isinstance(params, ModelParams):
        raise ValueError(f"params must be a ModelParams, got {params!r}")
    if config.behavior is not params.behavior:
        raise ValueError(
            "config.behavior and params.behavior disagree: "
            f"{config.behavior.value} vs {params.behavior.value}"
        )
    n = config.n
    m = config.majority_size
    u = seeding.init_generator(config.seed).random(n)
    x0 = np.empty(n, dtype=np.float64)
    lo, hi = config.majority_range
    x0[:m] = lo + (hi - lo) * u[:m]
    lo, hi = config.minority_range
    x0[m:] = lo + (hi - lo) * u[m:]
    bitgens = seeding.agent_bit_generators(config.seed, n)
    return _finish_init(config, params, x0, bitgens)


@dataclass(eq=False)
class Trajectory:
    """Per-step adoption-rate record of one replicate.

    y_avg_series has length horizon + 1; entry t is the rate after step t,
    entry 0 the initial rate. state_snapshots, when recorded, holds one
    snapshot per entry of the series.
    """

    params: ModelParams
    config: PopulationConfig
    y_avg_series: list[float]
    state_snapshots: list[PopulationSnapshot] | None = None

    @property
    def horizon(self) -> int:
        return len(self.y_avg_series) - 1


def _check_advance_args(pop, params):
    if not isinstance(pop, Population):
        raise ValueError(f"expected a Population, got {pop!r}")
    if not isinstance(params, ModelParams):
        raise ValueError(f"params must be a ModelParams, got {params!r}")
    if pop.config.behavior is not params.behavior:
        raise ValueError(
            "population and params disagree on behavior: "
            f"{pop.config.behavior.value} vs {params.behavior.value}"
        )


def _advance(pop, params, n_steps, record, backend):
    """Run the kernel for n_steps; returns (rates, snapshots or None)."""
    kernel = get_kernel(backend)
    n = pop.n
    yavg_out = np.empty(n_steps, dtype=np.float64)
    if record:
        snap_x = np.empty((n_steps, n), dtype=np.float64)
        snap_z = np.empty((n_steps, n), dtype=np.float64)
        snap_p = np.empty((n_steps, n), dtype=np.float64)
        snap_y = np.empty((n_steps, n), dtype=np.int8)
        snap_h = np.empty((n_steps, n), dtype=np.int64)
    else:
        snap_x = snap_z = snap_p = snap_y = snap_h = None
    pop.y_avg = kernel.run_steps(
        pop._x0,
        pop._x,
        pop._z,
        pop._p,
        pop._y,
        pop._h,
        pop.y_avg,
        params.phi,
        params.beta,
        params.lam,
        params.behavior is BehaviorType.BENEFICIAL,
        pop._bitgens,
        n_steps,
        yavg_out,
        snap_x,
        snap_z,
        snap_p,
        snap_y,
        snap_h,
    )
    t0 = pop.t
    pop.t = t0 + n_steps
    snaps = None
    if record:
        snaps = [
            PopulationSnapshot(
                t=t0 + k + 1,
                x=snap_x[k],
                z=snap_z[k],
                p=snap_p[k],
                y=snap_y[k],
                h=snap_h[k],
            )
            for k in range(n_steps)
        ]
    return yavg_out, snaps


def step(pop: Population, params: ModelParams, backend: str | None = None) -> Population:
    """Advance one synchronous step in place; returns the same population."""
    _check_advance_args(pop, params)
    _advance(pop, params, 1, False, backend)
    return pop


def run(
    config: PopulationConfig,
    params: ModelParams,
    horizon: int,
    record_states: bool = False,
    backend: str | None = None,
) -> Trajectory:
    """Initialize a population and advance it horizon steps."""
    if isinstance(horizon, bool) or not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
    horizon = int(horizon)
    pop = init_population(config, params)
    series = np.empty(horizon + 1, dtype=np.float64)
    series[0] = pop.y_avg
    snaps = [pop.snapshot()] if record_states else None
    rates, tail_snaps = _advance(pop, params, horizon, record_states, backend)
    series[1:] = rates
    if record_states:
        snaps.extend(tail_snaps)
    return Trajectory(
        params=params,
        config=config,
        y_avg_series=series.tolist(),
        state_snapshots=snaps,
    )
