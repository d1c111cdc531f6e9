"""Command-line front end: run, sweep, replay.

Exit codes: 0 success, 1 invalid usage or configuration (and replay
verification failure), 2 filesystem errors. Thread count comes from
--threads, then the TPB_SIM_THREADS environment variable, then 1.
"""

from __future__ import annotations

import importlib.resources
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import click

from . import __version__
from ._kernels import BACKEND
from .config import ConfigError, parse_config, serialize_config
from .output import (
    RunManifest,
    file_digest,
    load_manifest,
    render_plot_svg,
    timestamp,
    write_manifest,
    write_phase_table_csv,
    write_states_csv,
    write_trajectory_csv,
)
from .sweep import (
    GridSpec,
    Scenario,
    cell_from_summary,
    run_ensemble,
    sweep_summaries,
)

_AXIS_GLYPHS = {"alpha": "α", "beta": "β", "lambda": "λ", "phi": "φ"}


def _bundled_names() -> list[str]:
    data = importlib.resources.files("tpb_sim").joinpath("data")
    return sorted(
        p.name[: -len(".toml")] for p in data.iterdir() if p.name.endswith(".toml")
    )


def _load_config_text(source: str) -> str:
    path = Path(source)
    if path.exists():
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise OSError(f"cannot read {source}: {e}") from e
    name = source if source.endswith(".toml") else source + ".toml"
    res = importlib.resources.files("tpb_sim").joinpath("data").joinpath(name)
    if res.is_file():
        return res.read_text(encoding="utf-8")
    raise ConfigError(
        f"no such config file and no bundled config named {source!r}; "
        f"bundled configs: {', '.join(_bundled_names())}"
    )


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        return threads
    env = os.environ.get("TPB_SIM_THREADS", "").strip()
    if env:
        try:
            threads = int(env)
        except ValueError:
            raise ConfigError(f"TPB_SIM_THREADS must be an integer, got {env!r}") from None
        if threads < 1:
            raise ConfigError(f"TPB_SIM_THREADS must be >= 1, got {env!r}")
        return threads
    return 1


def _make_out_dir(out_dir: str) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out_dir}: {e}") from e
    return path


def _run_label(scenario: Scenario) -> str:
    return f"(φ={scenario.params.phi:g}, β={scenario.params.beta:g})"


def _cell_label(grid: GridSpec, resolved: dict) -> str:
    parts = [
        f"{_AXIS_GLYPHS[name]}={resolved[name]:g}" for name in sorted(grid.axes)
    ]
    return "(" + ", ".join(parts) + ")"


def _execute_run(
    scenario: Scenario, out_dir: Path, want_svg: bool, threads: int
) -> tuple[list[str], object]:
    trajs, summary = run_ensemble(scenario, threads=threads)
    written: list[str] = []
    if scenario.replicates == 1:
        write_trajectory_csv(trajs[0], out_dir / "trajectory.csv")
        written.append("trajectory.csv")
    else:
        write_trajectory_csv(summary, out_dir / "ensemble.csv")
        written.append("ensemble.csv")
    if scenario.snapshot_states:
        write_states_csv(trajs[0], out_dir / "states.csv")
        written.append("states.csv")
    if want_svg:
        values = trajs[0].y_avg_series if scenario.replicates == 1 else summary.median
        render_plot_svg([(_run_label(scenario), values)], out_dir / "plot.svg")
        written.append("plot.svg")
    return written, summary


def _execute_sweep(
    grid: GridSpec, out_dir: Path, want_svg: bool, threads: int
) -> tuple[list[str], list]:
    pairs = sweep_summaries(grid, threads=threads)
    behavior = grid.base.params.behavior
    rows = [cell_from_summary(resolved, behavior, s) for resolved, s in pairs]
    write_phase_table_csv(rows, out_dir / "phase_table.csv")
    written = ["phase_table.csv"]
    if want_svg:
        series = [
            (_cell_label(grid, resolved), summary.median)
            for resolved, summary in pairs
        ]
        render_plot_svg(series, out_dir / "plot.svg")
        written.append("plot.svg")
    return written, rows


def _finish_manifest(mode: str, resolved, written: list[str], out_dir: Path) -> None:
    base_seed = resolved.base_seed if isinstance(resolved, Scenario) else resolved.base.base_seed
    manifest = RunManifest(
        version=__version__,
        mode=mode,
        base_seed=base_seed,
        config_text=serialize_config(resolved),
        outputs=[
            {"path": name, "sha256": file_digest(out_dir / name)} for name in written
        ],
        created=timestamp(),
        backend=BACKEND,
    )
    write_manifest(manifest, out_dir / "manifest.json")


@click.group()
@click.version_option(__version__, prog_name="tpb-sim")
def cli():
    """Agent-based simulator of collective behavior change."""


@cli.command("run")
@click.option("--config", "config_source", required=True, metavar="PATH_OR_NAME",
              help="Config file path or bundled config name.")
@click.option("--out", "out_dir", required=True, metavar="DIR",
              help="Output directory (created if missing).")
@click.option("--seed", type=int, default=None, help="Override the base seed.")
@click.option("--replicates", type=int, default=None, help="Override replicate count.")
@click.option("--threads", type=int, default=None, help="Worker threads.")
@click.option("--svg/--no-svg", "want_svg", default=False, help="Also render plot.svg.")
@click.option("--snapshot-states", is_flag=True, default=False,
              help="Write per-agent states (replicates = 1 only).")
def run_cmd(config_source, out_dir, seed, replicates, threads, want_svg, snapshot_states):
    """Run one scenario's ensemble and write CSV outputs plus a manifest."""
    threads = _resolve_threads(threads)
    parsed = parse_config(_load_config_text(config_source))
    if isinstance(parsed, GridSpec):
        raise ConfigError(
            "this config defines a [grid]; use 'tpb-sim sweep' for grid configs"
        )
    scenario = parsed
    if seed is not None:
        scenario = replace(scenario, base_seed=seed)
    if replicates is not None:
        scenario = replace(scenario, replicates=replicates)
    if snapshot_states:
        scenario = replace(scenario, snapshot_states=True)
    if scenario.snapshot_states and scenario.replicates != 1:
        raise ConfigError("state snapshots require replicates = 1")
    out_path = _make_out_dir(out_dir)
    written, summary = _execute_run(scenario, out_path, want_svg, threads)
    _finish_manifest("run", scenario, written, out_path)
    for name in written + ["manifest.json"]:
        click.echo(f"wrote {out_path / name}")
    counts = ", ".join(
        f"{regime.value}={count}" for regime, count in summary.regime_counts.items() if count
    )
    click.echo(f"replicates: {scenario.replicates}  regimes: {counts or 'none'}")
    if summary.median_transition_time is not None:
        lo, hi = summary.transition_time_iqr
        click.echo(
            f"median transition time: {summary.median_transition_time:g} "
            f"(IQR {lo:g}..{hi:g})"
        )
    click.echo(f"terminal median y_avg: {summary.terminal_median:.7f}")


@cli.command("sweep")
@click.option("--config", "config_source", required=True, metavar="PATH_OR_NAME",
              help="Config file path or bundled config name.")
@click.option("--out", "out_dir", required=True, metavar="DIR",
              help="Output directory (created if missing).")
@click.option("--seed", type=int, default=None, help="Override the base seed.")
@click.option("--replicates", type=int, default=None, help="Override replicates per cell.")
@click.option("--threads", type=int, default=None, help="Worker threads.")
@click.option("--max-cells", type=int, default=None, help="Override the grid size cap.")
@click.option("--svg/--no-svg", "want_svg", default=False, help="Also render plot.svg.")
def sweep_cmd(config_source, out_dir, seed, replicates, threads, max_cells, want_svg):
    """Run a parameter grid and write the phase table plus a manifest."""
    threads = _resolve_threads(threads)
    parsed = parse_config(_load_config_text(config_source))
    if isinstance(parsed, Scenario):
        raise ConfigError(
            "this config has no [grid] table; use 'tpb-sim run' for single scenarios"
        )
    grid = parsed
    base = grid.base
    if seed is not None:
        base = replace(base, base_seed=seed)
    if replicates is not None:
        base = replace(base, replicates=replicates)
    grid = replace(grid, base=base)
    if max_cells is not None:
        grid = replace(grid, max_cells=max_cells)
    out_path = _make_out_dir(out_dir)
    written, rows = _execute_sweep(grid, out_path, want_svg, threads)
    _finish_manifest("sweep", grid, written, out_path)
    for name in written + ["manifest.json"]:
        click.echo(f"wrote {out_path / name}")
    for row in rows:
        t = "-" if row.median_transition_time is None else f"{row.median_transition_time:g}"
        click.echo(
            f"phi={row.phi:g} beta={row.beta:g} lambda={row.lam:g} alpha={row.alpha:g} "
            f"regime={row.regime.value} median_t={t} terminal={row.terminal_median:.4f}"
        )


@cli.command("replay")
@click.option("--manifest", "manifest_path", required=True, metavar="FILE",
              help="manifest.json from an earlier run or sweep.")
@click.option("--out", "out_dir", default=None, metavar="DIR",
              help="Where to regenerate outputs (default: a temp directory).")
@click.option("--threads", type=int, default=None, help="Worker threads.")
def replay_cmd(manifest_path, out_dir, threads):
    """Re-run a manifest's config and verify the output digests."""
    threads = _resolve_threads(threads)
    manifest = load_manifest(manifest_path)
    parsed = parse_config(manifest.config_text)
    names = [entry["path"] for entry in manifest.outputs]
    want_svg = "plot.svg" in names

    def regenerate(target: Path) -> None:
        if manifest.mode == "run":
            if not isinstance(parsed, Scenario):
                raise ConfigError("manifest mode 'run' but config defines a grid")
            _execute_run(parsed, target, want_svg, threads)
        elif manifest.mode == "sweep":
            if not isinstance(parsed, GridSpec):
                raise ConfigError("manifest mode 'sweep' but config is a single scenario")
            _execute_sweep(parsed, target, want_svg, threads)
        else:
            raise ConfigError(f"unknown manifest mode {manifest.mode!r}")

    if out_dir is None:
        with tempfile.TemporaryDirectory(prefix="tpb-sim-replay-") as tmp:
            target = Path(tmp)
            regenerate(target)
            failures = _verify_outputs(manifest, target)
    else:
        target = _make_out_dir(out_dir)
        regenerate(target)
        failures = _verify_outputs(manifest, target)
    if failures:
        return 1
    click.echo("replay verified")
    return 0


def _verify_outputs(manifest: RunManifest, target: Path) -> int:
    failures = 0
    for entry in manifest.outputs:
        name, expected = entry["path"], entry["sha256"]
        actual = file_digest(target / name)
        if actual == expected:
            click.echo(f"verified {name}")
        else:
            click.echo(f"MISMATCH {name}: expected {expected}, got {actual}")
            failures += 1
    return failures


def cli_main(argv=None) -> int:
    """Entry point returning an exit code instead of raising SystemExit."""
    try:
        rv = cli.main(args=argv, prog_name="tpb-sim", standalone_mode=False)
        return int(rv) if isinstance(rv, int) else 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        return 1


def main() -> None:
    sys.exit(cli_main())
