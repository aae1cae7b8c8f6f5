"""Tabulated closed-form curves with region tags and CSV export."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..model import SystemParams
from .harvested import cdf_harvested, pdf_harvested, region_of
from .orderstats import pdf_z1, pdf_zm
from .pmf import pmf_active_beams
from .series import SeriesWorkspace

__all__ = [
    "AnalyticCurve",
    "CURVE_KINDS",
    "energy_pdf_curve",
    "energy_cdf_curve",
    "top_sum_pdf_curve",
    "pmf_curve",
    "write_curve_csv",
    "read_curve_csv",
]

CURVE_KINDS = ("pdf_EH", "cdf_EH", "pdf_z1", "pdf_zm", "joint_pdf", "pmf_Ma")


@dataclass
class AnalyticCurve:
    grid: np.ndarray            # ascending abscissae (J for energy kinds)
    values: np.ndarray
    kind: str                   # one of CURVE_KINDS
    region_tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ValueError("grid and values must be 1-D and equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly ascending")
        if not self.region_tags:
            self.region_tags = [""] * len(self.grid)
        if len(self.region_tags) != len(self.grid):
            raise ValueError("region_tags length mismatch")
        if self.kind == "cdf_EH":
            if np.any(self.values < -1e-12) or np.any(self.values > 1 + 1e-12):
                raise ValueError("CDF values must lie in [0, 1]")
            if np.any(np.diff(self.values) < -1e-12):
                raise ValueError("CDF values must be non-decreasing")
        elif self.kind == "pmf_Ma":
            if np.any(self.values < 0):
                raise ValueError("PMF values must be >= 0")
            if abs(self.values.sum() - 1.0) > 1e-6:
                raise ValueError("PMF must sum to 1 within 1e-6")
        else:
            floor = -1e-9 * max(np.max(np.abs(self.values)), 1e-300)
            if np.any(self.values < floor):
                raise ValueError("density values must be >= 0 up to rounding")


def energy_pdf_curve(params: SystemParams, grid,
                     ws: SeriesWorkspace | None = None) -> AnalyticCurve:
    grid = np.asarray(grid, dtype=float)
    vals = np.array([pdf_harvested(params, float(x), ws) for x in grid])
    tags = [region_of(params, float(x)) for x in grid]
    return AnalyticCurve(grid=grid, values=vals, kind="pdf_EH", region_tags=tags)


def energy_cdf_curve(params: SystemParams, grid,
                     ws: SeriesWorkspace | None = None) -> AnalyticCurve:
    grid = np.asarray(grid, dtype=float)
    vals = np.array([cdf_harvested(params, float(x), ws) for x in grid])
    tags = [region_of(params, float(x)) for x in grid]
    return AnalyticCurve(grid=grid, values=vals, kind="cdf_EH", region_tags=tags)


def top_sum_pdf_curve(total: int, m: int, grid,
                      ws: SeriesWorkspace | None = None) -> AnalyticCurve:
    """Density curve of the top-m partial sum (kind pdf_z1 when m == 1)."""
    grid = np.asarray(grid, dtype=float)
    if m == 1:
        vals = np.array([pdf_z1(total, float(x), ws) for x in grid])
        kind = "pdf_z1"
    else:
        vals = np.array([pdf_zm(total, m, float(x), ws) for x in grid])
        kind = "pdf_zm"
    return AnalyticCurve(grid=grid, values=vals, kind=kind)


def pmf_curve(params: SystemParams,
              ws: SeriesWorkspace | None = None) -> AnalyticCurve:
    vals = pmf_active_beams(params, ws)
    grid = np.arange(1, params.antennas + 1, dtype=float)
    return AnalyticCurve(grid=grid, values=vals, kind="pmf_Ma")


def write_curve_csv(curve: AnalyticCurve, path_or_file,
                    extra_columns: dict | None = None,
                    footer: list[tuple] | None = None) -> None:
    """CSV with header x,value,region (17 significant digits).

    extra_columns maps name -> array for overlay data; footer rows are
    emitted verbatim after the data (first cell non-numeric by convention).
    """
    extras = extra_columns or {}

    def emit(fh):
        cols = ["x", "value", "region", *extras]
        fh.write(",".join(cols) + "\n")
        for i in range(len(curve.grid)):
            row = [f"{curve.grid[i]:.17g}", f"{curve.values[i]:.17g}",
                   curve.region_tags[i]]
            row += [f"{np.asarray(v)[i]:.17g}" for v in extras.values()]
            fh.write(",".join(row) + "\n")
        for item in footer or []:
            cells = [x if isinstance(x, str) else f"{x:.17g}" for x in item]
            cells += [""] * (len(cols) - len(cells))
            fh.write(",".join(cells) + "\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_file)


def read_curve_csv(path_or_file, kind: str) -> AnalyticCurve:
    """Parse a curve CSV written by write_curve_csv; footer rows are skipped."""
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file) as fh:
            lines = fh.read().splitlines()
    else:
        lines = path_or_file.read().splitlines()
    header = lines[0].split(",")
    if header[:3] != ["x", "value", "region"]:
        raise ValueError(f"unexpected curve header {lines[0]!r}")
    xs, vals, tags = [], [], []
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split(",")
        try:
            x = float(cells[0])
        except ValueError:
            continue  # footer row
        xs.append(x)
        vals.append(float(cells[1]))
        tags.append(cells[2])
    return AnalyticCurve(grid=np.array(xs), values=np.array(vals),
                         kind=kind, region_tags=tags)
