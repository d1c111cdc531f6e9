"""Single-agent update rules for the planned-behavior feedback model.

Each agent carries four coupled variables on [0, 1]: attitude x, intention
z, choice probability p, and a binary action y, plus the lifetime count h
of actions performed so far. Attitude is a closed form in the initial
attitude and h, saturating hyperbolically (psychophysical numbing), so it
never drifts under repeated evaluation. Intention mixes attitude with the
population-wide adoption rate, and the choice probability maps intention
through a two-alternative logit.

Everything here is a pure scalar function. The vectorized hot loops live
in ``tpb_sim._kernels`` and must stay bit-compatible with these
definitions; any semantic change here has to be mirrored there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "BehaviorType",
    "ModelParams",
    "AgentState",
    "attitude_update",
    "intention_update",
    "choice_probability",
    "sample_action",
    "cumulative_count_update",
]


class BehaviorType(enum.Enum):
    """Direction of the action-to-attitude feedback.

    Repeating a BENEFICIAL behavior drives attitude toward 1; repeating a
    HARMFUL one drives it toward 0.
    """

    BENEFICIAL = "beneficial"
    HARMFUL = "harmful"

    @classmethod
    def parse(cls, value) -> "BehaviorType":
        """Accept a member or its lowercase string name."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls(value.strip().lower())
            except ValueError:
                pass
        raise ValueError(
            "behavior must be one of "
            f"{[m.value for m in cls]}, got {value!r}"
        )


def _check_unit(name: str, value: float) -> float:
    # not-in-range also catches NaN
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0,1], got {value!r}")
    return float(value)


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or value != int(value) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ModelParams:
    """Behavioral parameters shared by every agent in a population.

    phi      weight of personal attitude in intention formation, in [0, 1];
             1 - phi weighs the population norm
    beta     decision rationality, finite and >= 0; 0 means coin-flip
             choices, large values approach deterministic choice
    lam      sensitivity of attitude to the cumulative action count, > 0
    behavior feedback direction, see BehaviorType
    """

    phi: float
    beta: float
    lam: float = 1.0
    behavior: BehaviorType = BehaviorType.BENEFICIAL

    def __post_init__(self):
        object.__setattr__(self, "phi", _check_unit("phi", self.phi))
        beta = float(self.beta)
        if not (beta >= 0.0 and math.isfinite(beta)):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")
        object.__setattr__(self, "beta", beta)
        lam = float(self.lam)
        if not (lam > 0.0 and math.isfinite(lam)):
            raise ValueError(f"lam must be finite and > 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "behavior", BehaviorType.parse(self.behavior))


@dataclass
class AgentState:
    """One agent's state at a single time step."""

    x0: float  # initial attitude, fixed anchor of the attitude curve
    x: float   # current attitude
    z: float   # intention
    p: float   # choice probability
    y: int     # latest action, 0 or 1
    h: int     # lifetime action count, y included


def attitude_update(x0: float, lam: float, h, behavior) -> float:
    """Attitude after h lifetime actions, anchored at the initial attitude.

    Hyperbolic in h: every further action moves attitude by a smaller step
    (numbing), toward 1 for beneficial behaviors and toward 0 for harmful
    ones. h = 0 returns x0 exactly, bypassing the formula so that float
    rounding cannot perturb the anchor.
    """
    x0 = _check_unit("x0", x0)
    lam = float(lam)
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError(f"lam must be finite and > 0, got {lam!r}")
    h = _check_count("h", h)
    behavior = BehaviorType.parse(behavior)
    if h == 0:
        return x0
    if behavior is BehaviorType.BENEFICIAL:
        return 1.0 - (1.0 - x0) / (1.0 + lam * h)
    return x0 / (1.0 + lam * h)


def intention_update(x_new: float, y_avg_prev: float, phi: float) -> float:
    """Convex mix of the agent's attitude and the previous adoption rate.

    The result is clamped to the closed interval spanned by the two inputs
    so float rounding can never push it outside [min, max] (and therefore
    never outside [0, 1]).
    """
    x_new = _check_unit("x_new", x_new)
    y_avg_prev = _check_unit("y_avg_prev", y_avg_prev)
    phi = _check_unit("phi", phi)
    z = phi * x_new + (1.0 - phi) * y_avg_prev
    lo, hi = (x_new, y_avg_prev) if x_new <= y_avg_prev else (y_avg_prev, x_new)
    if z < lo:
        return lo
    if z > hi:
        return hi
    return z


def _sigmoid(t: float) -> float:
    # single bounded exponential per branch; kernels replicate this exactly
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def choice_probability(z: float, beta: float) -> float:
    """Two-alternative logit over the utilities z and 1 - z.

    Evaluated as 1 / (1 + exp(-beta * (2 z - 1))), with the exponential
    argument kept non-positive so large beta cannot overflow. beta = 0
    gives exactly 0.5. The result lives in (0, 1) mathematically; in
    floats it saturates to exactly 0.0 or 1.0 once |beta * (2 z - 1)|
    exceeds roughly 745.
    """
    z = _check_unit("z", z)
    beta = float(beta)
    if not (beta >= 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be finite and >= 0, got {beta!r}")
    return _sigmoid(beta * (2.0 * z - 1.0))


def sample_action(p: float, rng) -> int:
    """Bernoulli action draw; consumes exactly one uniform from rng.

    rng is a ``numpy.random.Generator``. The uniform is drawn from [0, 1),
    so p = 0 can never fire and p = 1 always does.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p!r}")
    return 1 if rng.random() < p else 0


def cumulative_count_update(h, y) -> int:
    """Advance the lifetime action count by the latest action."""
    h = _check_count("h", h)
    if not (y == 0 or y == 1) or isinstance(y, bool):
        raise ValueError(f"y must be 0 or 1, got {y!r}")
    return h + int(y)
