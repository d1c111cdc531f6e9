"""Agent-based simulator of collective behavior change.

A population of agents repeatedly decides whether to perform a behavior.
Attitudes respond to each agent's own accumulated actions, intentions mix
attitude with the population-wide adoption rate, and a logit choice rule
turns intention into a stochastic binary action. Ensembles over seeded
replicates and parameter grids reproduce the collective transitions this
model exhibits, deterministically for a given seed.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .config import ConfigError, parse_config, serialize_config
from .metrics import (
    DetectionParams,
    EnsembleSummary,
    Regime,
    TransitionOutcome,
    adoption_rate,
    detect_transition,
    summarize_ensemble,
)
from .model import (
    AgentState,
    BehaviorType,
    ModelParams,
    attitude_update,
    choice_probability,
    cumulative_count_update,
    intention_update,
    sample_action,
)
from .population import (
    Population,
    PopulationConfig,
    PopulationSnapshot,
    Trajectory,
    default_ranges,
    init_population,
    run,
    step,
)
from .sweep import (
    GridSpec,
    Scenario,
    SweepCell,
    classify_regime,
    run_ensemble,
    sweep_grid,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "AgentState",
    "BehaviorType",
    "ModelParams",
    "attitude_update",
    "intention_update",
    "choice_probability",
    "sample_action",
    "cumulative_count_update",
    "Population",
    "PopulationConfig",
    "PopulationSnapshot",
    "Trajectory",
    "default_ranges",
    "init_population",
    "step",
    "run",
    "Regime",
    "DetectionParams",
    "TransitionOutcome",
    "EnsembleSummary",
    "detect_transition",
    "summarize_ensemble",
    "adoption_rate",
    "Scenario",
    "GridSpec",
    "SweepCell",
    "run_ensemble",
    "sweep_grid",
    "classify_regime",
    "ConfigError",
    "parse_config",
    "serialize_config",
]
