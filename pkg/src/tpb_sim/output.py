"""Byte-stable CSV, SVG and manifest writers.

Every writer is deterministic: the same inputs produce the same bytes, so
output files can be digest-verified. Rates are printed with seven decimal
places, which recovers counts out of n = 300 exactly on re-parse. The SVG
writer is self-contained (no plotting library) because library output
embeds ids and metadata that break byte-stability.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence
from xml.sax.saxutils import escape

from .metrics import EnsembleSummary, Regime
from .population import Trajectory
from .sweep import SweepCell

__all__ = [
    "write_trajectory_csv",
    "write_states_csv",
    "write_phase_table_csv",
    "render_plot_svg",
    "RunManifest",
    "file_digest",
    "write_manifest",
    "load_manifest",
]


def _fmt(v: float) -> str:
    return f"{v:.7f}"


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def write_trajectory_csv(obj, path) -> None:
    """Write a Trajectory as t,y_avg or an EnsembleSummary as quantiles."""
    if isinstance(obj, Trajectory):
        lines = ["t,y_avg"]
        lines += [f"{t},{_fmt(v)}" for t, v in enumerate(obj.y_avg_series)]
    elif isinstance(obj, EnsembleSummary):
        lines = ["t,q10,median,q90"]
        lines += [
            f"{t},{_fmt(a)},{_fmt(b)},{_fmt(c)}"
            for t, (a, b, c) in enumerate(zip(obj.q10, obj.median, obj.q90))
        ]
    else:
        raise ValueError(f"expected a Trajectory or EnsembleSummary, got {obj!r}")
    _write_text(path, "\n".join(lines) + "\n")


def write_states_csv(traj: Trajectory, path) -> None:
    """Per-agent state dump of a snapshot-recording trajectory."""
    if not isinstance(traj, Trajectory) or traj.state_snapshots is None:
        raise ValueError("trajectory was run without state snapshots")
    lines = ["t,agent,x,z,p,y,h"]
    for snap in traj.state_snapshots:
        for i in range(len(snap.x)):
            lines.append(
                f"{snap.t},{i},{_fmt(snap.x[i])},{_fmt(snap.z[i])},"
                f"{_fmt(snap.p[i])},{int(snap.y[i])},{int(snap.h[i])}"
            )
    _write_text(path, "\n".join(lines) + "\n")


def write_phase_table_csv(rows: Sequence[SweepCell], path) -> None:
    """One row per sweep cell: parameters, regime, tallies, times."""
    header = (
        "phi,beta,lambda,alpha,behavior,regime,full_adoption,full_rejection,"
        "stalemate,noise_dominated,median_transition_time,terminal_median_y_avg"
    )
    lines = [header]
    for row in rows:
        counts = row.regime_counts
        med = "" if row.median_transition_time is None else f"{row.median_transition_time:g}"
        lines.append(
            f"{row.phi!r},{row.beta!r},{row.lam!r},{row.alpha!r},"
            f"{row.behavior.value},{row.regime.value},"
            f"{counts.get(Regime.FULL_ADOPTION, 0)},"
            f"{counts.get(Regime.FULL_REJECTION, 0)},"
            f"{counts.get(Regime.STALEMATE, 0)},"
            f"{counts.get(Regime.NOISE_DOMINATED, 0)},"
            f"{med},{_fmt(row.terminal_median)}"
        )
    _write_text(path, "\n".join(lines) + "\n")


# fixed palette, cycled per series
_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

_W, _H = 720, 460
_ML, _MR, _MT, _MB = 62, 18, 18, 46


def _x_ticks(t_max: int) -> list[int]:
    if t_max <= 0:
        return [0]
    raw = t_max / 5
    mag = 10 ** max(0, len(str(int(raw))) - 1)
    for mult in (1, 2, 5, 10):
        if mult * mag >= raw:
            step = mult * mag
            break
    return list(range(0, t_max + 1, step))


def render_plot_svg(series: Sequence[tuple[str, Sequence[float]]], path) -> None:
    """Self-contained line chart of rate series; y axis fixed to [0, 1].

    series is a list of (label, values) pairs of equal length. Output
    bytes depend only on the input.
    """
    series = list(series)
    if not series:
        raise ValueError("need at least one series to plot")
    lengths = {len(vals) for _, vals in series}
    if len(lengths) != 1:
        raise ValueError("all series must share one length")
    npts = lengths.pop()
    if npts < 1:
        raise ValueError("series must be non-empty")
    t_max = npts - 1

    x0p, x1p = _ML, _W - _MR
    y0p, y1p = _H - _MB, _MT  # y grows upward

    def sx(t: float) -> float:
        return x0p + (x1p - x0p) * (t / t_max if t_max else 0.0)

    def sy(v: float) -> float:
        return y0p + (y1p - y0p) * v

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<rect x="{x0p}" y="{y1p}" width="{x1p - x0p}" height="{y0p - y1p}" '
        f'fill="none" stroke="#222222" stroke-width="1"/>',
    ]
    for i in range(6):  # y ticks at 0, 0.2, ..., 1
        v = i / 5
        yy = sy(v)
        parts.append(
            f'<line x1="{x0p - 4}" y1="{yy:.2f}" x2="{x0p}" y2="{yy:.2f}" '
            f'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0p - 8}" y="{yy + 4:.2f}" font-family="sans-serif" '
            f'font-size="12" text-anchor="end">{v:.1f}</text>'
        )
    for t in _x_ticks(t_max):
        xx = sx(t)
        parts.append(
            f'<line x1="{xx:.2f}" y1="{y0p}" x2="{xx:.2f}" y2="{y0p + 4}" '
            f'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{xx:.2f}" y="{y0p + 18}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle">{t}</text>'
        )
    parts.append(
        f'<text x="{(x0p + x1p) / 2:.2f}" y="{_H - 10}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">t</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0p + y1p) / 2:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0p + y1p) / 2:.2f})">adoption rate</text>'
    )
    for idx, (label, vals) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(t):.2f},{sy(float(v)):.2f}" for t, v in enumerate(vals))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        ly = y1p + 16 + 16 * idx
        parts.append(
            f'<line x1="{x0p + 10}" y1="{ly - 4}" x2="{x0p + 34}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{x0p + 40}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{escape(str(label))}</text>'
        )
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


@dataclass
class RunManifest:
    """Reproduction record for one CLI invocation.

    config_text is the fully resolved configuration; outputs maps file
    names to sha256 digests. created is informational only and excluded
    from all digests, so a replayed run can verify outputs byte for byte.
    """

    version: str
    mode: str  # "run" or "sweep"
    base_seed: int
    config_text: str
    outputs: list[dict]
    created: str
    backend: str
    tool: str = "tpb-sim"


def file_digest(path) -> str:
    """sha256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(65536), b""):
                digest.update(chunk)
    except OSError as e:
        raise OSError(f"cannot read {path}: {e}") from e
    return digest.hexdigest()


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(manifest: RunManifest, path) -> None:
    doc = {
        "tool": manifest.tool,
        "version": manifest.version,
        "mode": manifest.mode,
        "base_seed": manifest.base_seed,
        "backend": manifest.backend,
        "created": manifest.created,
        "config": manifest.config_text,
        "outputs": manifest.outputs,
    }
    _write_text(path, json.dumps(doc, indent=2) + "\n")


def load_manifest(path) -> RunManifest:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise OSError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed manifest {path}: {e}") from None
    try:
        return RunManifest(
            version=doc["version"],
            mode=doc["mode"],
            base_seed=doc["base_seed"],
            config_text=doc["config"],
            outputs=list(doc["outputs"]),
            created=doc.get("created", ""),
            backend=doc.get("backend", ""),
            tool=doc.get("tool", "tpb-sim"),
        )
    except KeyError as e:
        raise ValueError(f"manifest {path} is missing field {e}") from None
