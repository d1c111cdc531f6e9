"""Tests for CSV/SVG writers and the run manifest."""

import hashlib
import re

import numpy as np
import pytest

from tpb_sim.metrics import DetectionParams, summarize_ensemble
from tpb_sim.model import BehaviorType, ModelParams
from tpb_sim.output import (
    RunManifest,
    file_digest,
    load_manifest,
    render_plot_svg,
    write_manifest,
    write_phase_table_csv,
    write_states_csv,
    write_trajectory_csv,
)
from tpb_sim.population import PopulationConfig, Trajectory, run
from tpb_sim.sweep import GridSpec, Scenario, sweep_grid

BENEFICIAL = BehaviorType.BENEFICIAL


def _traj(series, n=300):
    params = ModelParams(phi=0.7, beta=5.0, behavior=BENEFICIAL)
    config = PopulationConfig.for_behavior(BENEFICIAL, n=n)
    return Trajectory(params=params, config=config, y_avg_series=list(series))


class TestTrajectoryCsv:
    def test_header_and_line_count(self, tmp_path):
        path = tmp_path / "traj.csv"
        write_trajectory_csv(_traj([0.1] * 301), path)
        text = path.read_text(encoding="utf-8")
        lines = text.split("\n")
        assert lines[0] == "t,y_avg"
        assert len(lines) == 303  # header + 301 rows + trailing newline
        assert lines[-1] == ""
        assert lines[1] == "0,0.1000000"

    def test_saturated_rows_format(self, tmp_path):
        path = tmp_path / "traj.csv"
        write_trajectory_csv(_traj([0.5, 0.99, 1.0, 1.0]), path)
        rows = path.read_text(encoding="utf-8").strip().split("\n")[1:]
        assert rows[2] == "2,1.0000000"
        assert rows[3] == "3,1.0000000"

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "traj.csv"
        write_trajectory_csv(_traj([0.1, 0.2]), path)
        assert b"\r" not in path.read_bytes()

    def test_reparse_error_within_half_ulp_of_seven_decimals(self, tmp_path):
        rng = np.random.default_rng(113)
        series = (rng.integers(0, 301, size=80) / 300.0).tolist()
        path = tmp_path / "traj.csv"
        write_trajectory_csv(_traj(series), path)
        rows = path.read_text(encoding="utf-8").strip().split("\n")[1:]
        for (t_str, v_str), expect in zip((r.split(",") for r in rows), series):
            assert abs(float(v_str) - expect) <= 5e-8

    def test_byte_identical_rewrites(self, tmp_path):
        series = (np.random.default_rng(127).integers(0, 301, size=50) / 300.0).tolist()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trajectory_csv(_traj(series), a)
        write_trajectory_csv(_traj(series), b)
        assert a.read_bytes() == b.read_bytes()

    def test_ensemble_quantile_csv(self, tmp_path):
        trajs = [_traj([i / 10.0] * 12) for i in range(10)]
        summary = summarize_ensemble(trajs, DetectionParams(window=10))
        path = tmp_path / "ens.csv"
        write_trajectory_csv(summary, path)
        lines = path.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == "t,q10,median,q90"
        assert lines[1] == "0,0.0000000,0.4000000,0.8000000"
        assert len(lines) == 13

    def test_rejects_other_types(self, tmp_path):
        with pytest.raises(ValueError):
            write_trajectory_csv([0.1, 0.2], tmp_path / "x.csv")

    def test_unwritable_path_raises_oserror_with_path(self, tmp_path):
        target = tmp_path / "missing" / "traj.csv"
        with pytest.raises(OSError, match="traj.csv"):
            write_trajectory_csv(_traj([0.1]), target)


class TestStatesCsv:
    def test_round_trip_against_snapshots(self, tmp_path):
        config = PopulationConfig.for_behavior(BENEFICIAL, n=7, seed=3)
        params = ModelParams(phi=0.6, beta=2.0, behavior=BENEFICIAL)
        traj = run(config, params, horizon=4, record_states=True)
        path = tmp_path / "states.csv"
        write_states_csv(traj, path)
        lines = path.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == "t,agent,x,z,p,y,h"
        assert len(lines) == 1 + 5 * 7
        first = lines[1].split(",")
        assert first[0] == "0" and first[1] == "0"
        snap = traj.state_snapshots[0]
        assert first[2] == f"{snap.x[0]:.7f}"
        assert first[5] == str(int(snap.y[0]))

    def test_requires_snapshots(self, tmp_path):
        config = PopulationConfig.for_behavior(BENEFICIAL, n=5, seed=3)
        params = ModelParams(phi=0.6, beta=2.0, behavior=BENEFICIAL)
        traj = run(config, params, horizon=4)
        with pytest.raises(ValueError):
            write_states_csv(traj, tmp_path / "states.csv")


class TestPhaseTableCsv:
    def test_header_and_rows(self, tmp_path):
        params = ModelParams(phi=0.7, beta=5.0, behavior=BENEFICIAL)
        config = PopulationConfig.for_behavior(BENEFICIAL, n=40)
        base = Scenario(
            params=params,
            config=config,
            horizon=25,
            replicates=3,
            base_seed=5,
            detection=DetectionParams(window=10),
        )
        rows = sweep_grid(GridSpec(base=base, axes={"phi": (0.3, 0.7)}))
        path = tmp_path / "phase.csv"
        write_phase_table_csv(rows, path)
        lines = path.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == (
            "phi,beta,lambda,alpha,behavior,regime,full_adoption,full_rejection,"
            "stalemate,noise_dominated,median_transition_time,terminal_median_y_avg"
        )
        assert len(lines) == 3
        for line, phi in zip(lines[1:], (0.3, 0.7)):
            fields = line.split(",")
            assert fields[0] == repr(phi)
            assert fields[1] == "5.0"
            assert fields[4] == "beneficial"
            assert sum(int(c) for c in fields[6:10]) == 3
            assert re.fullmatch(r"0\.\d{7}|1\.\d{7}", fields[11])

    def test_median_time_empty_when_none(self, tmp_path):
        from tpb_sim.metrics import Regime
        from tpb_sim.sweep import SweepCell

        cell = SweepCell(
            phi=0.7, beta=50.0, lam=1.0, alpha=0.9, behavior=BENEFICIAL,
            regime=Regime.STALEMATE,
            regime_counts={r: 0 for r in Regime},
            median_transition_time=None,
            terminal_median=0.1,
        )
        path = tmp_path / "phase.csv"
        write_phase_table_csv([cell], path)
        line = path.read_text(encoding="utf-8").strip().split("\n")[1]
        assert ",stalemate," in line
        assert line.endswith(",,0.1000000")


class TestSvg:
    def test_constant_half_draws_a_horizontal_midline(self, tmp_path):
        path = tmp_path / "plot.svg"
        render_plot_svg([("flat", [0.5] * 20)], path)
        text = path.read_text(encoding="utf-8")
        points = re.search(r'<polyline points="([^"]+)"', text).group(1)
        ys = {pair.split(",")[1] for pair in points.split(" ")}
        assert len(ys) == 1
        # midway between the plot frame's top and bottom edges
        y = float(ys.pop())
        top = float(re.search(r'<rect x="\d+" y="(\d+)"', text).group(1))
        assert y == pytest.approx((414 + 18) / 2)
        assert top == 18.0

    def test_four_series_four_polylines_and_labels(self, tmp_path):
        path = tmp_path / "plot.svg"
        series = [
            ("(phi=0.3, beta=5)", [0.1] * 10),
            ("(phi=0.7, beta=5)", [0.3] * 10),
            ("(phi=0.3, beta=10)", [0.5] * 10),
            ("(phi=0.7, beta=10)", [0.9] * 10),
        ]
        render_plot_svg(series, path)
        text = path.read_text(encoding="utf-8")
        assert text.count("<polyline") == 4
        for label, _ in series:
            assert label in text
        # distinct palette colors per series
        colors = set(re.findall(r'polyline[^>]*stroke="(#\w{6})"', text))
        assert len(colors) == 4

    def test_byte_identical_output(self, tmp_path):
        series = [("a", [0.0, 0.5, 1.0]), ("b", [1.0, 0.5, 0.0])]
        p1, p2 = tmp_path / "one.svg", tmp_path / "two.svg"
        render_plot_svg(series, p1)
        render_plot_svg(series, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_label_escaping(self, tmp_path):
        path = tmp_path / "plot.svg"
        render_plot_svg([("a<b&c", [0.1, 0.2])], path)
        text = path.read_text(encoding="utf-8")
        assert "a&lt;b&amp;c" in text
        assert "a<b&c" not in text

    def test_validation(self, tmp_path):
        with pytest.raises(ValueError):
            render_plot_svg([], tmp_path / "x.svg")
        with pytest.raises(ValueError):
            render_plot_svg([("a", [0.1]), ("b", [0.1, 0.2])], tmp_path / "x.svg")
        with pytest.raises(ValueError):
            render_plot_svg([("a", [])], tmp_path / "x.svg")


class TestManifest:
    def _manifest(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_bytes(b"t,y_avg\n0,0.1000000\n")
        return RunManifest(
            version="0.1.0",
            mode="run",
            base_seed=42,
            config_text='behavior = "beneficial"\n',
            outputs=[{"path": "data.csv", "sha256": file_digest(data)}],
            created="2024-05-01T00:00:00+00:00",
            backend="cython",
        )

    def test_round_trip(self, tmp_path):
        manifest = self._manifest(tmp_path)
        path = tmp_path / "manifest.json"
        write_manifest(manifest, path)
        back = load_manifest(path)
        assert back == manifest
        assert back.tool == "tpb-sim"

    def test_file_digest_matches_hashlib(self, tmp_path):
        data = tmp_path / "blob.bin"
        payload = b"\x00\x01" * 40000
        data.write_bytes(payload)
        assert file_digest(data) == hashlib.sha256(payload).hexdigest()

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text('{"tool": "tpb-sim", "mode": "run"}', encoding="utf-8")
        with pytest.raises(ValueError, match="version"):
            load_manifest(path)

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValueError, match="malformed"):
            load_manifest(path)

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_manifest(tmp_path / "absent.json")
        with pytest.raises(OSError):
            file_digest(tmp_path / "absent.bin")
