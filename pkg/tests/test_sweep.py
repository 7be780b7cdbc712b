import io
import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xenon_xpm.config import build_sweep
from xenon_xpm.errors import ConfigError, EmptyResultError
from xenon_xpm.sweep import (COLUMNS, PhasePoint, SweepSpec, divergence_report, emit_table,
                             find_max_phase, parse_table, run_sweep)

HEADER = "delta_hz,phi_pert_rad,phi_gauss_rad,phi_diag_rad,n1,valid_pert,dressed_overlap,error"


@pytest.fixture(scope="module")
def default_points(default_config):
    return run_sweep(build_sweep(default_config))


def point(delta, pert, diag, n1=0.0, overlap=1.0, error=None):
    return PhasePoint(delta, pert, None, diag, n1, n1 < 0.1, overlap, error)


class TestSpec:
    def test_equal_bounds(self, default_system):
        with pytest.raises(ConfigError):
            run_sweep(SweepSpec(default_system, 1e6, 1e6))

    @pytest.mark.parametrize("kwargs", [{"points": 1}, {"points": 100_001}, {"spacing": "cubic"},
                                        {"delta_over_2pi_min": 0.0},
                                        {"small_delta_over_2pi": 0.0}])
    def test_invalid(self, default_system, kwargs):
        with pytest.raises(ConfigError):
            run_sweep(SweepSpec(default_system, **kwargs))

    def test_log_grid(self, default_system):
        g = SweepSpec(default_system, 1e6, 1e10, 9).grid()
        assert len(g) == 9 and g[0] == 1e6 and g[-1] == 1e10
        assert np.allclose(g[1:] / g[:-1], math.sqrt(10.0), rtol=1e-13)

    def test_linear_grid(self, default_system):
        g = SweepSpec(default_system, 1e6, 2e6, 11, spacing="linear").grid()
        assert g[0] == 1e6 and g[-1] == 2e6
        assert np.allclose(np.diff(g), 1e5, rtol=1e-9)


class TestRunSweep:
    def test_one_point_per_grid_value(self, default_points):
        assert len(default_points) == 200
        d = [p.delta_hz for p in default_points]
        assert d == sorted(d)

    def test_power_law(self, default_points):
        x = np.log([p.delta_hz for p in default_points])
        y = np.log([p.phi_pert_rad for p in default_points])
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
        assert r2 > 0.999999
        assert slope == pytest.approx(-2.0, rel=1e-9)

    def test_phi_pert_recomputable(self, default_points, default_system):
        c, n, t = default_system.couplings, default_system.n_eff, default_system.mode.interaction_time
        d = 2 * math.pi * 10e6
        for p in default_points:
            big = 2 * math.pi * p.delta_hz
            expected = n * c.g1**2 * c.g2**2 * t / (big**2 * d)
            assert p.phi_pert_rad == pytest.approx(expected, rel=1e-12)

    def test_every_point_populated(self, default_points):
        for p in default_points:
            assert p.error is not None or (p.phi_diag_rad is not None and math.isfinite(p.phi_diag_rad))

    def test_deterministic(self, default_config, default_points):
        again = run_sweep(build_sweep(default_config))
        assert emit_table(again) == emit_table(default_points)

    def test_gauss_column(self, default_config):
        pts = run_sweep(build_sweep(default_config.replace(sweep_points=3, sweep_gauss=True)))
        for p in pts:
            assert 0.95 <= p.phi_gauss_rad / p.phi_pert_rad <= 1.0

    def test_strong_mixing_tagged(self, default_config):
        cfg = default_config.replace(sweep_points=3, overlap_threshold=0.9,
                                     sweep_min_mhz=1, sweep_max_mhz=10)
        pts = run_sweep(build_sweep(cfg))
        for p in pts:
            assert p.error == "strong_mixing"
            assert p.phi_diag_rad is None and p.dressed_overlap < 0.9
            assert p.phi_pert_rad is not None


class TestMaxPhase:
    def test_single(self):
        assert find_max_phase([point(1e6, 0.1, -0.02)]) == (1e6, -0.02)

    def test_monotone(self):
        pts = [point(d, 1.0, 1.0 / d) for d in (1.0, 2.0, 3.0)]
        assert find_max_phase(pts) == (1.0, 1.0)

    def test_skips_errors_and_mixed(self):
        pts = [point(1.0, 1.0, None, error="strong_mixing"),
               point(2.0, 1.0, 5.0, overlap=0.4), point(3.0, 1.0, 0.1)]
        assert find_max_phase(pts) == (3.0, 0.1)

    def test_empty(self):
        with pytest.raises(EmptyResultError):
            find_max_phase([point(1.0, 1.0, None, error="strong_mixing")])


class TestDivergence:
    def test_identical(self):
        pts = [point(d, 0.5, 0.5) for d in (1.0, 2.0, 3.0)]
        r = divergence_report(pts)
        assert r.found and r.delta_hz == 1.0

    def test_five_percent(self):
        pts = [point(d, 1.05, 1.0) for d in (1.0, 2.0, 3.0)]
        assert not divergence_report(pts).found

    def test_onset(self):
        pts = [point(1.0, 2.0, 1.0, n1=5.0), point(2.0, 1.01, 1.0, n1=0.02),
               point(3.0, 1.0, 1.0, n1=0.01)]
        r = divergence_report(pts)
        assert r.found and r.delta_hz == 2.0 and r.n1 == 0.02

    def test_empty(self):
        with pytest.raises(EmptyResultError):
            divergence_report([])


class TestEmit:
    def test_header_only(self):
        assert emit_table([]) == (HEADER + "\n").encode()

    def test_line_count(self, default_points):
        assert emit_table(default_points[:3]).decode().count("\n") == 4

    def test_columns(self):
        assert ",".join(COLUMNS) == HEADER

    def test_round_trip(self, default_points):
        pts = list(default_points[:20]) + [point(5.0, 0.1, None, error="strong_mixing")]
        for fmt in ("csv", "jsonl"):
            assert parse_table(emit_table(pts, fmt), fmt) == pts

    @given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False,
           allow_infinity=False), st.booleans())
    def test_round_trip_property(self, a, b, flag):
        pts = [PhasePoint(1e6, a, None, b, abs(a), flag, 0.75, None)]
        assert parse_table(emit_table(pts, "csv"), "csv") == pts
        assert parse_table(emit_table(pts, "jsonl"), "jsonl") == pts

    def test_seventeen_digits(self):
        line = emit_table([point(1.0, 1 / 3, 0.1)]).decode().splitlines()[1]
        assert line.split(",")[1] == "0.33333333333333331"

    def test_jsonl_keys(self):
        obj = json.loads(emit_table([point(1.0, 0.2, None, error="x")], "jsonl"))
        assert tuple(obj) == COLUMNS and obj["phi_diag_rad"] is None

    def test_file_destination(self, tmp_path):
        path = tmp_path / "out.csv"
        data = emit_table([point(1.0, 0.2, 0.1)], "csv", path)
        assert path.read_bytes() == data
        buf = io.BytesIO()
        emit_table([point(1.0, 0.2, 0.1)], "csv", buf)
        assert buf.getvalue() == data

    def test_write_failure_names_path(self, tmp_path):
        bad = tmp_path / "missing" / "out.csv"
        with pytest.raises(OSError) as info:
            emit_table([], "csv", bad)
        assert str(bad) in str(info.value)

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            emit_table([], "xml")
