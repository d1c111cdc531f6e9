"""TOML scenario and grid configs: parsing, validation, serialization.

Schema (keys optional unless marked; a non-empty [grid] table turns the
config into a sweep):

    behavior = "beneficial" | "harmful"   (required)
    phi = 0.7            (required unless swept; attitude weight, [0,1])
    beta = 5.0           (required unless swept; rationality, >= 0)
    lambda = 1.0         (attitude sensitivity, > 0)
    n = 300              (population size)
    alpha = 0.9          (majority share, [0.5,1])
    seed = 0             (base seed, [0, 2^64))
    horizon = 300        (steps per replicate)
    replicates = 50      (replicates per cell)
    snapshot_states = false
    max_cells = 10000    (grid configs: cross-product cap)

    [init]
    majority_range = [0.0, 0.4]   (defaults depend on behavior)
    minority_range = [0.6, 0.7]

    [detection]
    adopt_threshold = 0.98
    reject_threshold = 0.02
    window = 50
    noise_floor = 0.015

    [grid]
    phi = [0.3, 0.7]     (any subset of phi, beta, lambda, alpha;
    beta = [5.0, 10.0]    top-level scalars fix the others)

Unknown keys are rejected. serialize_config writes every field back out
explicitly (defaults materialized), and parse_config inverts it exactly.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .metrics import DetectionParams
from .model import BehaviorType, ModelParams
from .population import PopulationConfig, default_ranges
from .sweep import DEFAULT_MAX_CELLS, SWEEPABLE, GridSpec, Scenario

__all__ = ["ConfigError", "parse_config", "serialize_config"]


class ConfigError(ValueError):
    """Malformed or invalid configuration text."""


_TOP_KEYS = {
    "behavior",
    "phi",
    "beta",
    "lambda",
    "n",
    "alpha",
    "seed",
    "horizon",
    "replicates",
    "snapshot_states",
    "max_cells",
    "init",
    "detection",
    "grid",
}
_INIT_KEYS = {"majority_range", "minority_range"}
_DETECTION_KEYS = {"adopt_threshold", "reject_threshold", "window", "noise_floor"}


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r} in {where}")


def _get_float(table: dict, key: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    return float(v)


def _get_int(table: dict, key: str, default):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    return v


def _get_bool(table: dict, key: str, default):
    if key not in table:
        return default
    v = table[key]
    if not isinstance(v, bool):
        raise ConfigError(f"{key} must be a boolean, got {v!r}")
    return v


def _get_range(table: dict, key: str, default):
    if key not in table:
        return default
    v = table[key]
    if (
        not isinstance(v, list)
        or len(v) != 2
        or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in v)
    ):
        raise ConfigError(f"{key} must be a [lo, hi] pair of numbers, got {v!r}")
    return (float(v[0]), float(v[1]))


def parse_config(text: str):
    """Parse TOML text into a Scenario or, with a [grid] table, a GridSpec."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config parse error: {e}") from None
    _reject_unknown(doc, _TOP_KEYS, "the top level")

    grid_table = doc.get("grid", {})
    if not isinstance(grid_table, dict):
        raise ConfigError(f"[grid] must be a table, got {grid_table!r}")
    _reject_unknown(grid_table, set(SWEEPABLE), "[grid]")
    axes: dict[str, tuple[float, ...]] = {}
    for name, values in grid_table.items():
        if not isinstance(values, list) or not values or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in values
        ):
            raise ConfigError(
                f"grid axis {name!r} must be a non-empty list of numbers, got {values!r}"
            )
        axes[name] = tuple(float(v) for v in values)

    if "behavior" not in doc:
        raise ConfigError("missing required config key 'behavior'")
    try:
        behavior = BehaviorType.parse(doc["behavior"])
    except ValueError as e:
        raise ConfigError(str(e)) from None

    # a swept parameter needs no top-level value; its base value is the
    # first axis entry and only seeds per-cell overrides
    phi = _get_float(doc, "phi", required="phi" not in axes)
    if phi is None:
        phi = axes["phi"][0]
    beta = _get_float(doc, "beta", required="beta" not in axes)
    if beta is None:
        beta = axes["beta"][0]
    lam = _get_float(doc, "lambda", default=None)
    if lam is None:
        lam = axes["lambda"][0] if "lambda" in axes else 1.0
    alpha = _get_float(doc, "alpha", default=None)
    if alpha is None:
        alpha = axes["alpha"][0] if "alpha" in axes else 0.9

    n = _get_int(doc, "n", 300)
    seed = _get_int(doc, "seed", 0)
    horizon = _get_int(doc, "horizon", 300)
    replicates = _get_int(doc, "replicates", 50)
    snapshot_states = _get_bool(doc, "snapshot_states", False)
    max_cells = _get_int(doc, "max_cells", DEFAULT_MAX_CELLS)

    init_table = doc.get("init", {})
    if not isinstance(init_table, dict):
        raise ConfigError(f"[init] must be a table, got {init_table!r}")
    _reject_unknown(init_table, _INIT_KEYS, "[init]")
    dmaj, dmin = default_ranges(behavior)
    majority_range = _get_range(init_table, "majority_range", dmaj)
    minority_range = _get_range(init_table, "minority_range", dmin)

    det_table = doc.get("detection", {})
    if not isinstance(det_table, dict):
        raise ConfigError(f"[detection] must be a table, got {det_table!r}")
    _reject_unknown(det_table, _DETECTION_KEYS, "[detection]")

    try:
        detection = DetectionParams(
            adopt_threshold=_get_float(det_table, "adopt_threshold", 0.98),
            reject_threshold=_get_float(det_table, "reject_threshold", 0.02),
            window=_get_int(det_table, "window", 50),
            noise_floor=_get_float(det_table, "noise_floor", 0.015),
        )
        params = ModelParams(phi=phi, beta=beta, lam=lam, behavior=behavior)
        config = PopulationConfig(
            n=n,
            alpha=alpha,
            behavior=behavior,
            majority_range=majority_range,
            minority_range=minority_range,
            seed=seed,
        )
        scenario = Scenario(
            params=params,
            config=config,
            horizon=horizon,
            replicates=replicates,
            base_seed=seed,
            detection=detection,
            snapshot_states=snapshot_states,
        )
        if axes:
            return GridSpec(base=scenario, axes=axes, max_cells=max_cells)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return scenario


def _toml_float(v: float) -> str:
    # repr round-trips doubles exactly and is valid TOML for finite values
    return repr(float(v))


def _toml_range(v: tuple[float, float]) -> str:
    return f"[{_toml_float(v[0])}, {_toml_float(v[1])}]"


def serialize_config(obj) -> str:
    """TOML text for a Scenario or GridSpec, every field explicit.

    parse_config(serialize_config(x)) reconstructs x exactly, float bits
    included.
    """
    if isinstance(obj, GridSpec):
        scenario, grid = obj.base, obj
    elif isinstance(obj, Scenario):
        scenario, grid = obj, None
    else:
        raise ValueError(f"expected a Scenario or GridSpec, got {obj!r}")

    p, c, d = scenario.params, scenario.config, scenario.detection
    lines = [
        f'behavior = "{p.behavior.value}"',
        f"phi = {_toml_float(p.phi)}",
        f"beta = {_toml_float(p.beta)}",
        f"lambda = {_toml_float(p.lam)}",
        f"n = {c.n}",
        f"alpha = {_toml_float(c.alpha)}",
        f"seed = {scenario.base_seed}",
        f"horizon = {scenario.horizon}",
        f"replicates = {scenario.replicates}",
        f"snapshot_states = {'true' if scenario.snapshot_states else 'false'}",
    ]
    if grid is not None:
        lines.append(f"max_cells = {grid.max_cells}")
    lines += [
        "",
        "[init]",
        f"majority_range = {_toml_range(c.majority_range)}",
        f"minority_range = {_toml_range(c.minority_range)}",
        "",
        "[detection]",
        f"adopt_threshold = {_toml_float(d.adopt_threshold)}",
        f"reject_threshold = {_toml_float(d.reject_threshold)}",
        f"window = {d.window}",
        f"noise_floor = {_toml_float(d.noise_floor)}",
    ]
    if grid is not None:
        lines += ["", "[grid]"]
        for name in sorted(grid.axes):
            values = ", ".join(_toml_float(v) for v in grid.axes[name])
            lines.append(f"{name} = [{values}]")
    return "\n".join(lines) + "\n"
