"""Threshold searches, region sweeps, and deterministic grid export.

Everything here runs on the closed-form value, so whole grids evaluate as
vectorized numpy expressions and export byte-identically between runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bell import bell_value_closed, local_bound, optimal_value, pnc_bound
from .states import Q_MIN, is_superunit, _check_n

BISECTION_MAX_ITER = 200
DEFAULT_BISECTION_TOL = 1e-6
PINNED_XI = (0.70, 0.72, 0.79, 0.90)
GRID_FLOOR = 1e-6

BOUND_KINDS = ("local", "pnc")


@dataclass(frozen=True)
class CriticalResult:
    """Smallest q that still violates a bound; xi=None means no filtering."""

    n: int
    bound_kind: str
    xi: float | None
    q_critical: float
    converged: bool


@dataclass(frozen=True)
class RegionGrid:
    n: int
    bound_kind: str
    bound: float
    q_axis: np.ndarray
    xi_axis: np.ndarray
    bell_values: np.ndarray
    violating: np.ndarray
    superunit: np.ndarray

    def cell_states(self) -> np.ndarray:
        """Per-cell label; superunit filtering flags the cell regardless of violation."""
        return np.where(
            self.superunit,
            "superunit-flagged",
            np.where(self.violating, "violating", "non-violating"),
        )


def _bound_value(n: int, bound_kind: str) -> float:
    if bound_kind not in BOUND_KINDS:
        raise ValueError(f"bound_kind must be one of {BOUND_KINDS}, got {bound_kind!r}")
    return float(local_bound(n) if bound_kind == "local" else pnc_bound(n))


def critical_q_unfiltered(n: int, bound_kind: str) -> CriticalResult:
    """Threshold without filtering: the value scales linearly in q."""
    n = _check_n(n)
    bound = _bound_value(n, bound_kind)
    q = bound / optimal_value(n)
    return CriticalResult(
        n=n, bound_kind=bound_kind, xi=None, q_critical=float(q), converged=q < 1.0
    )


def critical_q_at_xi(
    n: int, xi: float, bound_kind: str, tol: float = DEFAULT_BISECTION_TOL
) -> CriticalResult:
    """Bisect for the smallest q whose filtered value exceeds the bound.

    Returns converged=False with q_critical=1 when even q=1 does not violate.
    When every admissible q violates, the floor Q_MIN is reported.
    """
    n = _check_n(n)
    bound = _bound_value(n, bound_kind)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    lo, hi = Q_MIN, 1.0
    if bell_value_closed(n, hi, xi) <= bound:
        return CriticalResult(n, bound_kind, float(xi), 1.0, False)
    if bell_value_closed(n, lo, xi) > bound:
        return CriticalResult(n, bound_kind, float(xi), lo, True)
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if bell_value_closed(n, mid, xi) > bound:
            hi = mid
        else:
            lo = mid
    return CriticalResult(n, bound_kind, float(xi), float(hi), True)


def xi_search_grid(resolution: int = 40) -> np.ndarray:
    """Log-spaced filter strengths from 1e-4 to 1 with the benchmark values pinned in."""
    if resolution < 10:
        raise ValueError(f"resolution must be at least 10, got {resolution}")
    pts = set(np.geomspace(1e-4, 1.0, resolution).tolist()) | set(PINNED_XI)
    return np.array(sorted(pts))


def min_critical_q(
    n: int, bound_kind: str, xi_grid_resolution: int = 40, tol: float = DEFAULT_BISECTION_TOL
) -> CriticalResult:
    """Minimum threshold over the filter-strength grid, reported with its xi.

    If no grid point produces a violation the result carries xi=nan,
    q_critical=1, converged=False.
    """
    n = _check_n(n)
    _bound_value(n, bound_kind)
    best: CriticalResult | None = None
    for xi in xi_search_grid(xi_grid_resolution):
        res = critical_q_at_xi(n, float(xi), bound_kind, tol=tol)
        if not res.converged:
            continue
        if best is None or res.q_critical < best.q_critical:
            best = res
    if best is None:
        return CriticalResult(n, bound_kind, math.nan, 1.0, False)
    return best


def vanishing_filter_limit(n: int) -> float:
    """Exact limit of the closed-form value as the filter strength goes to zero.

    Independent of q, which is what makes arbitrarily weak noise detectable
    whenever this limit clears a bound.
    """
    n = _check_n(n)
    m = n // 2
    scale = (1.0 - 2.0 ** (1 - m)) / (1.0 - 2.0**-m)
    if n % 2 == 0:
        return 2 ** (n - 1) * math.sqrt(n) * scale
    return (2 * m * 4**m / math.sqrt(n)) * scale + 4**m / math.sqrt(n)


def quantum_minus_pnc(n: int, q, xi):
    """Filtered value minus the noncontextual bound (positive means contextuality)."""
    return bell_value_closed(n, q, xi) - pnc_bound(n)


def scan_region(n: int, bound_kind: str, q_steps: int, xi_steps: int) -> RegionGrid:
    """Closed-form values over a uniform (q, xi) grid with violation flags."""
    n = _check_n(n)
    bound = _bound_value(n, bound_kind)
    if q_steps < 2 or xi_steps < 2:
        raise ValueError("q_steps and xi_steps must both be at least 2")
    q_axis = np.linspace(GRID_FLOOR, 1.0, q_steps)
    xi_axis = np.linspace(GRID_FLOOR, 1.0, xi_steps)
    qq, xx = np.meshgrid(q_axis, xi_axis, indexing="ij")
    values = bell_value_closed(n, qq, xx)
    grid = RegionGrid(
        n=n,
        bound_kind=bound_kind,
        bound=bound,
        q_axis=q_axis,
        xi_axis=xi_axis,
        bell_values=values,
        violating=values > bound,
        superunit=np.asarray(is_superunit(qq, xx)),
    )
    for arr in (grid.q_axis, grid.xi_axis, grid.bell_values, grid.violating, grid.superunit):
        arr.setflags(write=False)
    return grid


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _round12(x: float) -> float:
    return float(_fmt(x))


EXPORT_COLUMNS = ("q", "xi", "bell_value", "bound", "violating", "superunit")


def export_grid(grid: RegionGrid, path, fmt: str = "csv") -> Path:
    """Write a region grid with a fixed column order and 12 significant digits.

    Row order is q-major, xi-minor; re-exporting the same grid reproduces the
    file byte for byte.
    """
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(EXPORT_COLUMNS)]
        for i, q in enumerate(grid.q_axis):
            for j, xi in enumerate(grid.xi_axis):
                lines.append(
                    ",".join(
                        (
                            _fmt(q),
                            _fmt(xi),
                            _fmt(grid.bell_values[i, j]),
                            _fmt(grid.bound),
                            "1" if grid.violating[i, j] else "0",
                            "1" if grid.superunit[i, j] else "0",
                        )
                    )
                )
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        rows = []
        for i, q in enumerate(grid.q_axis):
            for j, xi in enumerate(grid.xi_axis):
                rows.append(
                    [
                        _round12(q),
                        _round12(xi),
                        _round12(grid.bell_values[i, j]),
                        _round12(grid.bound),
                        bool(grid.violating[i, j]),
                        bool(grid.superunit[i, j]),
                    ]
                )
        payload = {
            "n": grid.n,
            "bound_kind": grid.bound_kind,
            "bound": _round12(grid.bound),
            "columns": list(EXPORT_COLUMNS),
            "rows": rows,
        }
        path.write_text(json.dumps(payload, separators=(",", ": "), indent=1) + "\n")
    else:
        raise ValueError(f"fmt must be 'csv' or 'json', got {fmt!r}")
    return path


FIGURE_EVEN_NS = (2, 4, 6, 8)
FIGURE_ODD_NS = (3, 5, 7, 9)
FIGURE_DIFF_NS = (2, 3, 4, 5)


def figure_panels(which: int, steps: int = 101) -> dict[str, object]:
    """Grids backing the three region/difference figures.

    Figures 1 and 2 are violation regions (local and noncontextual bound)
    split into an even-n and an odd-n panel; figure 3 is the value minus the
    noncontextual bound for n = 2..5 on one shared grid.
    """
    if which not in (1, 2, 3):
        raise ValueError(f"figure must be 1, 2, or 3, got {which!r}")
    if which in (1, 2):
        kind = "local" if which == 1 else "pnc"
        return {
            f"figure{which}_even": [scan_region(n, kind, steps, steps) for n in FIGURE_EVEN_NS],
            f"figure{which}_odd": [scan_region(n, kind, steps, steps) for n in FIGURE_ODD_NS],
        }
    q_axis = np.linspace(GRID_FLOOR, 1.0, steps)
    xi_axis = np.linspace(GRID_FLOOR, 1.0, steps)
    qq, xx = np.meshgrid(q_axis, xi_axis, indexing="ij")
    diffs = {n: quantum_minus_pnc(n, qq, xx) for n in FIGURE_DIFF_NS}
    return {"figure3": {"q_axis": q_axis, "xi_axis": xi_axis, "diffs": diffs}}


def export_figure(which: int, out_dir, steps: int = 101, fmt: str = "csv") -> list[Path]:
    """Write the figure grids into out_dir; returns the created paths."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"fmt must be 'csv' or 'json', got {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    panels = figure_panels(which, steps)
    written: list[Path] = []
    if which in (1, 2):
        for name, grids in panels.items():
            path = out_dir / f"{name}.{fmt}"
            if fmt == "csv":
                lines = [",".join(("n",) + EXPORT_COLUMNS)]
                for grid in grids:
                    for i, q in enumerate(grid.q_axis):
                        for j, xi in enumerate(grid.xi_axis):
                            lines.append(
                                ",".join(
                                    (
                                        str(grid.n),
                                        _fmt(q),
                                        _fmt(xi),
                                        _fmt(grid.bell_values[i, j]),
                                        _fmt(grid.bound),
                                        "1" if grid.violating[i, j] else "0",
                                        "1" if grid.superunit[i, j] else "0",
                                    )
                                )
                            )
                path.write_text("\n".join(lines) + "\n")
            else:
                payload = {
                    "columns": ["n"] + list(EXPORT_COLUMNS),
                    "rows": [
                        [
                            grid.n,
                            _round12(q),
                            _round12(xi),
                            _round12(grid.bell_values[i, j]),
                            _round12(grid.bound),
                            bool(grid.violating[i, j]),
                            bool(grid.superunit[i, j]),
                        ]
                        for grid in grids
                        for i, q in enumerate(grid.q_axis)
                        for j, xi in enumerate(grid.xi_axis)
                    ],
                }
                path.write_text(json.dumps(payload, separators=(",", ": "), indent=1) + "\n")
            written.append(path)
        return written

    data = panels["figure3"]
    q_axis, xi_axis, diffs = data["q_axis"], data["xi_axis"], data["diffs"]
    columns = ["q", "xi"] + [f"d_n{n}" for n in FIGURE_DIFF_NS]
    path = out_dir / f"figure3.{fmt}"
    if fmt == "csv":
        lines = [",".join(columns)]
        for i, q in enumerate(q_axis):
            for j, xi in enumerate(xi_axis):
                row = [_fmt(q), _fmt(xi)] + [_fmt(diffs[n][i, j]) for n in FIGURE_DIFF_NS]
                lines.append(",".join(row))
        path.write_text("\n".join(lines) + "\n")
    else:
        payload = {
            "columns": columns,
            "rows": [
                [_round12(q), _round12(xi)] + [_round12(diffs[n][i, j]) for n in FIGURE_DIFF_NS]
                for i, q in enumerate(q_axis)
                for j, xi in enumerate(xi_axis)
            ],
        }
        path.write_text(json.dumps(payload, separators=(",", ": "), indent=1) + "\n")
    written.append(path)
    return written
