import csv
import json
import math

import numpy as np
import pytest

from poracbell import analysis
from poracbell.analysis import (
    GRID_FLOOR,
    PINNED_XI,
    critical_q_at_xi,
    critical_q_unfiltered,
    export_figure,
    export_grid,
    figure_panels,
    min_critical_q,
    quantum_minus_pnc,
    scan_region,
    vanishing_filter_limit,
    xi_search_grid,
)
from poracbell.bell import bell_value_closed, local_bound, pnc_bound
from poracbell.states import Q_MIN


UNFILTERED_THRESHOLDS = [
    ("local", 2, 1 / math.sqrt(2)),
    ("local", 3, math.sqrt(3) / 2),
    ("local", 4, 0.75),
    ("local", 5, 30 / (16 * math.sqrt(5))),
    ("pnc", 2, 1 / math.sqrt(2)),
    ("pnc", 3, 1 / math.sqrt(3)),
    ("pnc", 4, 0.5),
    ("pnc", 5, 1 / math.sqrt(5)),
]

FILTERED_THRESHOLDS = [
    (2, 0.79, "local", 0.6779673936),
    (3, 0.90, "local", 0.8593083835),
    (3, 0.70, "pnc", 0.5003638496),
    (5, 0.72, "local", 0.8036415156),
]


@pytest.mark.parametrize("kind,n,expected", UNFILTERED_THRESHOLDS)
def test_unfiltered_thresholds(kind, n, expected):
    res = critical_q_unfiltered(n, kind)
    assert res.q_critical == pytest.approx(expected)
    assert res.converged
    assert res.xi is None


def test_unfiltered_pnc_threshold_is_inverse_root_n():
    for n in range(2, 9):
        assert critical_q_unfiltered(n, "pnc").q_critical == pytest.approx(1 / math.sqrt(n))


@pytest.mark.parametrize("n,xi,kind,expected", FILTERED_THRESHOLDS)
def test_filtered_thresholds(n, xi, kind, expected):
    res = critical_q_at_xi(n, xi, kind)
    assert res.converged
    assert res.q_critical == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("n,xi,kind,expected", FILTERED_THRESHOLDS)
def test_bisection_lands_on_the_crossing(n, xi, kind, expected):
    res = critical_q_at_xi(n, xi, kind)
    bound = local_bound(n) if kind == "local" else pnc_bound(n)
    assert bell_value_closed(n, res.q_critical, xi) >= bound - 1e-3
    assert bell_value_closed(n, res.q_critical, xi) <= bound + 1e-3
    assert bell_value_closed(n, min(1.0, res.q_critical + 0.05), xi) > bound


def test_no_violation_reports_unconverged():
    res = critical_q_at_xi(2, 0.3, "local")
    assert not res.converged
    assert res.q_critical == 1.0


def test_violation_at_the_floor():
    # weak filters push the n=6 value over the local bound for every q
    res = critical_q_at_xi(6, 1e-4, "local")
    assert res.converged
    assert res.q_critical == Q_MIN


def test_bisection_tolerance_validation():
    with pytest.raises(ValueError):
        critical_q_at_xi(3, 0.5, "local", tol=0.0)
    with pytest.raises(ValueError):
        critical_q_unfiltered(3, "chsh")


def test_xi_search_grid_contents():
    grid = xi_search_grid(25)
    assert grid[0] == pytest.approx(1e-4)
    assert grid[-1] == 1.0
    assert np.all(np.diff(grid) > 0)
    for pinned in PINNED_XI:
        assert pinned in grid
    with pytest.raises(ValueError):
        xi_search_grid(5)


def test_min_threshold_for_four_bits():
    res = min_critical_q(4, "local")
    assert res.converged
    assert res.q_critical == pytest.approx(0.6618, abs=2e-3)
    assert 0.55 < res.xi < 0.70
    # filtering beats the unfiltered threshold by a wide margin
    assert res.q_critical < critical_q_unfiltered(4, "local").q_critical - 0.05


def test_min_threshold_improves_with_grid_refinement():
    # geometric grids with resolutions r, 2r-1, 4r-3 nest, so the minimum
    # can only move down
    qs = [min_critical_q(4, "local", xi_grid_resolution=r).q_critical for r in (12, 23, 45)]
    assert qs[1] <= qs[0] + 1e-12
    assert qs[2] <= qs[1] + 1e-12


def test_min_threshold_survives_a_coarse_grid():
    # the pinned benchmark strengths keep the searched region honest even
    # when the geometric grid itself is sparse
    res = min_critical_q(2, "pnc", xi_grid_resolution=10)
    assert res.converged
    assert res.q_critical < 0.72


def test_vanishing_filter_limits():
    assert vanishing_filter_limit(2) == pytest.approx(0.0)
    assert vanishing_filter_limit(3) == pytest.approx(4 / math.sqrt(3))
    assert vanishing_filter_limit(4) == pytest.approx(32 / 3)
    assert vanishing_filter_limit(5) == pytest.approx(176 / (3 * math.sqrt(5)))
    assert vanishing_filter_limit(6) == pytest.approx(192 * math.sqrt(6) / 7)
    assert vanishing_filter_limit(7) == pytest.approx(2752 / (7 * math.sqrt(7)))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_limit_matches_weak_filter_evaluation(n):
    """The q independence of the weak-filter limit shows up numerically."""
    for q in (0.01, 0.4, 1.0):
        assert bell_value_closed(n, q, 1e-6) == pytest.approx(
            vanishing_filter_limit(n), rel=1e-4
        )


def test_weak_filter_activation_pattern():
    for n in (4, 5):
        assert vanishing_filter_limit(n) > pnc_bound(n)
        assert vanishing_filter_limit(n) < local_bound(n)
    for n in (6, 7):
        assert vanishing_filter_limit(n) > local_bound(n)


def test_quantum_minus_pnc_signs():
    assert quantum_minus_pnc(4, 0.5, 1e-4) > 0
    assert quantum_minus_pnc(5, 0.01, 1e-4) > 0
    assert quantum_minus_pnc(2, 0.3, 0.2) < 0
    assert quantum_minus_pnc(2, 0.9, 0.9) > 0
    out = quantum_minus_pnc(3, np.array([0.2, 0.9]), 0.5)
    assert out.shape == (2,)


class TestScanRegion:
    def test_grid_shapes_and_flags(self):
        grid = scan_region(3, "pnc", 7, 5)
        assert grid.bell_values.shape == (7, 5)
        assert grid.q_axis[0] == GRID_FLOOR and grid.q_axis[-1] == 1.0
        assert grid.bound == 4.0
        np.testing.assert_array_equal(grid.violating, grid.bell_values > 4.0)
        qq, xx = np.meshgrid(grid.q_axis, grid.xi_axis, indexing="ij")
        np.testing.assert_array_equal(grid.superunit, xx > np.sqrt(qq))
        assert np.all(np.isfinite(grid.bell_values))

    def test_arrays_are_frozen(self):
        grid = scan_region(2, "local", 4, 4)
        with pytest.raises(ValueError):
            grid.bell_values[0, 0] = 0.0

    def test_cell_states_override(self):
        grid = scan_region(2, "local", 6, 6)
        labels = grid.cell_states()
        assert labels[grid.superunit][0] == "superunit-flagged"
        honest = ~grid.superunit
        assert set(labels[honest]) <= {"violating", "non-violating"}

    def test_step_validation(self):
        with pytest.raises(ValueError):
            scan_region(3, "local", 1, 5)


class TestExports:
    def test_csv_roundtrip(self, tmp_path):
        grid = scan_region(3, "local", 5, 4)
        path = export_grid(grid, tmp_path / "grid.csv")
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 20
        # rows are q-major: the first xi block shares the smallest q
        assert float(rows[0]["q"]) == pytest.approx(GRID_FLOOR)
        assert float(rows[3]["q"]) == pytest.approx(GRID_FLOOR)
        probe = rows[7]
        i, j = 1, 3
        assert float(probe["bell_value"]) == pytest.approx(
            grid.bell_values[i, j], rel=1e-11
        )
        assert probe["violating"] in {"0", "1"}
        assert probe["bound"] == "6"

    def test_csv_deterministic(self, tmp_path):
        grid = scan_region(4, "pnc", 6, 6)
        a = export_grid(grid, tmp_path / "a.csv").read_bytes()
        b = export_grid(grid, tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_json_payload(self, tmp_path):
        grid = scan_region(2, "pnc", 4, 3)
        path = export_grid(grid, tmp_path / "grid.json", fmt="json")
        payload = json.loads(path.read_text())
        assert payload["n"] == 2
        assert payload["bound_kind"] == "pnc"
        assert payload["columns"] == list(analysis.EXPORT_COLUMNS)
        assert len(payload["rows"]) == 12
        assert isinstance(payload["rows"][0][4], bool)

    def test_unknown_format(self, tmp_path):
        grid = scan_region(2, "pnc", 3, 3)
        with pytest.raises(ValueError, match="fmt"):
            export_grid(grid, tmp_path / "grid.xml", fmt="xml")


class TestFigures:
    def test_panel_selection(self):
        panels = figure_panels(1, steps=5)
        assert set(panels) == {"figure1_even", "figure1_odd"}
        assert [g.n for g in panels["figure1_even"]] == [2, 4, 6, 8]
        assert all(g.bound_kind == "local" for g in panels["figure1_odd"])
        with pytest.raises(ValueError):
            figure_panels(4)

    def test_figure2_uses_noncontextual_bound(self):
        panels = figure_panels(2, steps=4)
        assert all(g.bound_kind == "pnc" for g in panels["figure2_even"])

    def test_figure3_difference_grid(self):
        data = figure_panels(3, steps=6)["figure3"]
        assert sorted(data["diffs"]) == [2, 3, 4, 5]
        assert data["diffs"][4].shape == (6, 6)

    def test_export_figure1_csv(self, tmp_path):
        paths = export_figure(1, tmp_path, steps=4)
        names = sorted(p.name for p in paths)
        assert names == ["figure1_even.csv", "figure1_odd.csv"]
        with open(paths[0], newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4 * 16
        assert {row["n"] for row in rows} == {"2", "4", "6", "8"}

    def test_export_figure3_json(self, tmp_path):
        (path,) = export_figure(3, tmp_path, steps=5, fmt="json")
        payload = json.loads(path.read_text())
        assert payload["columns"] == ["q", "xi", "d_n2", "d_n3", "d_n4", "d_n5"]
        assert len(payload["rows"]) == 25

    def test_figure_format_validation(self, tmp_path):
        with pytest.raises(ValueError):
            export_figure(1, tmp_path, fmt="txt")
