"""Ensembles over replicates and cross-product parameter sweeps.

Seeding is hierarchical: an ensemble's base seed spawns one master seed
per replicate; a sweep derives each cell's base seed from the grid's base
seed and the cell's resolved parameter values alone. Cells are therefore
independent: adding, removing or reordering axes never changes the result
of any other cell.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from . import rng as seeding
from .metrics import (
    DetectionParams,
    EnsembleSummary,
    Regime,
    summarize_ensemble,
)
from .model import BehaviorType, ModelParams
from .population import PopulationConfig, Trajectory, run

__all__ = [
    "Scenario",
    "GridSpec",
    "SweepCell",
    "SWEEPABLE",
    "run_ensemble",
    "sweep_grid",
    "sweep_summaries",
    "cell_scenario",
    "cell_from_summary",
    "classify_regime",
]

SWEEPABLE = ("alpha", "beta", "lambda", "phi")

DEFAULT_MAX_CELLS = 10_000


@dataclass(frozen=True)
class Scenario:
    """One parameter point: model params, population recipe, run lengths.

    Replicate seeds derive from base_seed, so the config's own seed field
    is dead weight here; it is normalized to base_seed on construction.
    """

    params: ModelParams
    config: PopulationConfig
    horizon: int = 300
    replicates: int = 50
    base_seed: int = 0
    detection: DetectionParams = field(default_factory=DetectionParams)
    snapshot_states: bool = False

    def __post_init__(self):
        if not isinstance(self.params, ModelParams):
            raise ValueError(f"params must be a ModelParams, got {self.params!r}")
        if not isinstance(self.config, PopulationConfig):
            raise ValueError(f"config must be a PopulationConfig, got {self.config!r}")
        if self.config.behavior is not self.params.behavior:
            raise ValueError(
                "config.behavior and params.behavior disagree: "
                f"{self.config.behavior.value} vs {self.params.behavior.value}"
            )
        for name in ("horizon", "replicates"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        object.__setattr__(self, "base_seed", seeding.check_seed(self.base_seed))
        if self.config.seed != self.base_seed:
            object.__setattr__(self, "config", replace(self.config, seed=self.base_seed))
        if not isinstance(self.detection, DetectionParams):
            raise ValueError(
                f"detection must be a DetectionParams, got {self.detection!r}"
            )
        object.__setattr__(self, "snapshot_states", bool(self.snapshot_states))


def _resolve_threads(threads) -> int:
    if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
        raise ValueError(f"threads must be a positive integer, got {threads!r}")
    return min(threads, os.cpu_count() or 1)


def run_ensemble(
    scenario: Scenario, threads: int = 1
) -> tuple[list[Trajectory], EnsembleSummary]:
    """Run scenario.replicates independent replicates and summarize them.

    Replicate r's master seed is derived from (base_seed, r), so results
    are identical for any thread count; threads only change wall time.
    """
    if not isinstance(scenario, Scenario):
        raise ValueError(f"expected a Scenario, got {scenario!r}")
    threads = _resolve_threads(threads)

    def one(r: int) -> Trajectory:
        config = replace(
            scenario.config, seed=seeding.replicate_seed(scenario.base_seed, r)
        )
        return run(
            config,
            scenario.params,
            scenario.horizon,
            record_states=scenario.snapshot_states,
        )

    indices = range(scenario.replicates)
    if threads == 1 or scenario.replicates == 1:
        trajs = [one(r) for r in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(one, indices))
    return trajs, summarize_ensemble(trajs, scenario.detection)


@dataclass(frozen=True)
class GridSpec:
    """Cross-product sweep over any subset of alpha, beta, lambda, phi.

    base supplies every non-swept value plus n, behavior, horizon,
    replicates and the base seed. Axis value order controls row order
    only; each cell's seed and result depend on its parameter values
    alone.
    """

    base: Scenario
    axes: Mapping[str, Sequence[float]]
    max_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self):
        if not isinstance(self.base, Scenario):
            raise ValueError(f"base must be a Scenario, got {self.base!r}")
        axes = {}
        for name, values in dict(self.axes).items():
            if name not in SWEEPABLE:
                raise ValueError(
                    f"unknown sweep axis {name!r}; axes must be among {list(SWEEPABLE)}"
                )
            values = tuple(float(v) for v in values)
            if not values:
                raise ValueError(f"axis {name!r} must list at least one value")
            axes[name] = values
        if not axes:
            raise ValueError("grid must define at least one axis")
        object.__setattr__(self, "axes", axes)
        if isinstance(self.max_cells, bool) or not isinstance(self.max_cells, int) or self.max_cells < 1:
            raise ValueError(
                f"max_cells must be a positive integer, got {self.max_cells!r}"
            )

    def cells(self) -> list[dict[str, float]]:
        """All cells in row order: sorted axis names, values as listed."""
        names = sorted(self.axes)
        out: list[dict[str, float]] = [{}]
        for name in names:
            out = [
                {**cell, name: value} for cell in out for value in self.axes[name]
            ]
        return out


@dataclass(frozen=True)
class SweepCell:
    """One grid cell's resolved parameters and classified outcome."""

    phi: float
    beta: float
    lam: float
    alpha: float
    behavior: BehaviorType
    regime: Regime
    regime_counts: dict
    median_transition_time: float | None
    terminal_median: float


def classify_regime(summary: EnsembleSummary, majority_fraction: float = 0.5) -> Regime:
    """Modal regime of an ensemble, conservatively demoted to Stalemate.

    Ties for the mode, and modes carried by fewer than majority_fraction
    of the replicates, both report Stalemate rather than declaring a
    transition the ensemble does not clearly support.
    """
    if not 0.5 <= float(majority_fraction) <= 1.0:
        raise ValueError(
            f"majority_fraction must lie in [0.5,1], got {majority_fraction!r}"
        )
    counts = summary.regime_counts
    total = sum(counts.values())
    if total == 0:
        raise ValueError("summary has no outcomes")
    top = max(counts.values())
    modal = [regime for regime in Regime if counts.get(regime, 0) == top]
    if len(modal) > 1 or top < float(majority_fraction) * total:
        return Regime.STALEMATE
    return modal[0]


def _resolved_cell(base: Scenario, cell: Mapping[str, float]) -> dict[str, float]:
    return {
        "alpha": float(cell.get("alpha", base.config.alpha)),
        "beta": float(cell.get("beta", base.params.beta)),
        "lambda": float(cell.get("lambda", base.params.lam)),
        "phi": float(cell.get("phi", base.params.phi)),
    }


def cell_scenario(grid: GridSpec, resolved: Mapping[str, float]) -> Scenario:
    """The base scenario specialized to one cell's resolved parameters."""
    base = grid.base
    params = replace(
        base.params,
        phi=resolved["phi"],
        beta=resolved["beta"],
        lam=resolved["lambda"],
    )
    config = replace(base.config, alpha=resolved["alpha"])
    return replace(
        base,
        params=params,
        config=config,
        base_seed=seeding.cell_seed(base.base_seed, resolved),
    )


def sweep_summaries(
    grid: GridSpec, threads: int = 1
) -> list[tuple[dict[str, float], EnsembleSummary]]:
    """Run every cell's ensemble; yields (resolved params, summary) rows.

    Raises before running anything when the cross product exceeds
    grid.max_cells; raise the cap explicitly to run bigger grids.
    """
    if not isinstance(grid, GridSpec):
        raise ValueError(f"expected a GridSpec, got {grid!r}")
    cells = grid.cells()
    if len(cells) > grid.max_cells:
        raise ValueError(
            f"grid has {len(cells)} cells, exceeding the cap of {grid.max_cells}; "
            "raise max_cells to run it anyway"
        )
    out = []
    for cell in cells:
        resolved = _resolved_cell(grid.base, cell)
        _, summary = run_ensemble(cell_scenario(grid, resolved), threads=threads)
        out.append((resolved, summary))
    return out


def cell_from_summary(
    resolved: Mapping[str, float], behavior: BehaviorType, summary: EnsembleSummary
) -> SweepCell:
    """Phase-table row for one classified cell."""
    return SweepCell(
        phi=resolved["phi"],
        beta=resolved["beta"],
        lam=resolved["lambda"],
        alpha=resolved["alpha"],
        behavior=behavior,
        regime=classify_regime(summary),
        regime_counts=dict(summary.regime_counts),
        median_transition_time=summary.median_transition_time,
        terminal_median=summary.terminal_median,
    )


def sweep_grid(grid: GridSpec, threads: int = 1) -> list[SweepCell]:
    """Run every cell's ensemble and classify it into a phase-table row."""
    behavior = grid.base.params.behavior
    return [
        cell_from_summary(resolved, behavior, summary)
        for resolved, summary in sweep_summaries(grid, threads=threads)
    ]
