"""Seed derivation and per-agent random substreams.

Every replicate owns one 64-bit master seed. Substreams come from numpy
``SeedSequence`` spawn keys:

* spawn key ``(0,)``     initialization stream; one uniform per agent for
                         the initial attitudes, consumed in storage order
* spawn key ``(1 + i,)`` action stream of agent ``i``; one uniform per
                         sampled action, the draw at t = 0 included

Fresh master seeds for replicates and sweep cells are folded out of a
base seed with ``derive_seed``. Float parameters enter the key material
through their IEEE-754 bit patterns (``float_key``), so a sweep cell's
seed depends only on its parameter values, never on which axis a value
came from or how axes were ordered.
"""

from __future__ import annotations

import struct
from typing import Mapping, Sequence

import numpy as np

U64_MAX = 2**64 - 1

_INIT_STREAM = 0
_AGENT_STREAM_BASE = 1

# sweepable parameters, with fixed codes that tag key material
_CELL_PARAM_CODES = {"alpha": 0, "beta": 1, "lambda": 2, "phi": 3}


def check_seed(seed) -> int:
    """Validate a master seed: an integer in [0, 2^64)."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= U64_MAX:
        raise ValueError(f"seed must lie in [0, 2^64), got {seed!r}")
    return seed


def derive_seed(base_seed: int, *key: int) -> int:
    """Fold non-negative integer key material into a fresh 64-bit seed."""
    entropy = [check_seed(base_seed)]
    for k in key:
        k = int(k)
        if k < 0:
            raise ValueError(f"key material must be non-negative, got {k!r}")
        entropy.append(k)
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, np.uint64)[0])


def float_key(value: float) -> int:
    """IEEE-754 bit pattern of a float, as a non-negative integer key."""
    return struct.unpack("<Q", struct.pack("<d", float(value)))[0]


def replicate_seed(base_seed: int, r: int) -> int:
    """Master seed of replicate r within an ensemble."""
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or r < 0:
        raise ValueError(f"replicate index must be a non-negative integer, got {r!r}")
    return derive_seed(base_seed, int(r))


def cell_seed(base_seed: int, cell_params: Mapping[str, float]) -> int:
    """Master seed of one sweep cell.

    ``cell_params`` must hold exactly the keys alpha, beta, lambda and phi,
    resolved to the cell's values. The key material is assembled in sorted
    name order from (code, bit-pattern) pairs, which makes the seed a pure
    function of the parameter values.
    """
    if set(cell_params) != set(_CELL_PARAM_CODES):
        raise ValueError(
            "cell_params must provide exactly "
            f"{sorted(_CELL_PARAM_CODES)}, got {sorted(cell_params)}"
        )
    key: list[int] = []
    for name in sorted(_CELL_PARAM_CODES):
        key.append(_CELL_PARAM_CODES[name])
        key.append(float_key(cell_params[name]))
    return derive_seed(base_seed, *key)


def init_generator(seed: int) -> np.random.Generator:
    """Generator for the initialization stream of one run."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(_INIT_STREAM,))
    return np.random.Generator(np.random.PCG64(ss))


def agent_bit_generators(
    seed: int, n: int, stream_ids: Sequence[int] | None = None
) -> list[np.random.PCG64]:
    """One PCG64 action stream per agent.

    Stream identity is keyed by ``stream_ids`` (defaults to 0..n-1), not by
    storage position, so a population built with permuted agents and
    matching ids evolves identically agent-for-agent.
    """
    seed = check_seed(seed)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"need at least one agent stream, got n={n!r}")
    if stream_ids is None:
        ids = range(n)
    else:
        ids = [int(i) for i in stream_ids]
        if len(ids) != n:
            raise ValueError(f"expected {n} stream ids, got {len(ids)}")
        if any(i < 0 for i in ids):
            raise ValueError("stream ids must be non-negative")
        if len(set(ids)) != n:
            raise ValueError("stream ids must be distinct")
    return [
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_AGENT_STREAM_BASE + i,)))
        for i in ids
    ]
