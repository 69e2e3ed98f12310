"""Grid, fluid state, Riemann-invariant coordinates, derived observables.

The state of the one-dimensional system is the pair u = (sigma, beta) of
cell-centred point values on a uniform grid.  The linear change of
variables w1 = sigma + beta, w2 = sigma - beta diagonalises the transport
structure; a state is admissible at level c0 > 0 when both invariants stay
at or above c0, i.e. ess inf (sigma - |beta|) >= c0.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

CSV_HEADER = ["x", "sigma", "beta"]


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid; states live at the n_cells cell centres."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ParameterError(f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.n_cells < 4:
            raise ParameterError(f"grid needs n_cells >= 4, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


def _as_field(grid: Grid1D, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (grid.n_cells,):
        raise ParameterError(f"field shape {arr.shape} does not match grid with {grid.n_cells} cells")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("field contains non-finite entries")
    return arr


@dataclass
class FluidState:
    """Conservative variables (sigma, beta) at time t."""

    grid: Grid1D
    t: float
    sigma: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        self.sigma = _as_field(self.grid, self.sigma)
        self.beta = _as_field(self.grid, self.beta)

    def copy(self) -> "FluidState":
        return FluidState(self.grid, self.t, self.sigma.copy(), self.beta.copy())


@dataclass
class RiemannState:
    """Riemann-invariant variables (w1, w2) = (sigma + beta, sigma - beta) at time t."""

    grid: Grid1D
    t: float
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        self.w1 = _as_field(self.grid, self.w1)
        self.w2 = _as_field(self.grid, self.w2)

    def copy(self) -> "RiemannState":
        return RiemannState(self.grid, self.t, self.w1.copy(), self.w2.copy())


@dataclass(frozen=True)
class AdmissibilityReport:
    c0: float
    min_w1: float
    min_w2: float
    admissible: bool


def to_riemann(state: FluidState) -> RiemannState:
    """Map (sigma, beta) -> (w1, w2); a linear bijection of the state space."""
    return RiemannState(state.grid, state.t, state.sigma + state.beta, state.sigma - state.beta)


def from_riemann(rs: RiemannState) -> FluidState:
    """Inverse map (w1, w2) -> (sigma, beta) = ((w1+w2)/2, (w1-w2)/2)."""
    return FluidState(rs.grid, rs.t, 0.5 * (rs.w1 + rs.w2), 0.5 * (rs.w1 - rs.w2))


def check_admissible(state: FluidState, c0: float) -> AdmissibilityReport:
    """Report whether both Riemann invariants stay at or above c0 > 0."""
    if not c0 > 0.0:
        raise ParameterError(f"admissibility level c0 must be positive, got {c0}")
    min_w1 = float(np.min(state.sigma + state.beta))
    min_w2 = float(np.min(state.sigma - state.beta))
    return AdmissibilityReport(c0, min_w1, min_w2, min_w1 >= c0 and min_w2 >= c0)


def generalized_pressure(state: FluidState) -> np.ndarray:
    """Generalized pressure observable (1/2) sigma beta^2 + sigma^3 / 6, per cell."""
    return 0.5 * state.sigma * state.beta**2 + state.sigma**3 / 6.0


def l2_energy(sigma: np.ndarray, beta: np.ndarray, dx: float) -> float:
    """Quadratic energy (1/2) integral of (sigma^2 + beta^2) dx."""
    return 0.5 * float(np.sum(sigma * sigma + beta * beta)) * dx


# ---------------------------------------------------------------------------
# serialization: CSV (one row per cell, 17 significant digits) and JSON


def write_text_atomic(path: str, text: str) -> None:
    """Write via a sibling temp file + rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def state_to_csv(state: FluidState, path: str) -> None:
    x = state.grid.cell_centers()
    lines = [",".join(CSV_HEADER)]
    for xi, si, bi in zip(x, state.sigma, state.beta):
        lines.append(f"{xi:.17g},{si:.17g},{bi:.17g}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def state_from_csv(path: str, t: float = 0.0) -> FluidState:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParameterError(f"state CSV must start with header {','.join(CSV_HEADER)}, got {header}")
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    if len(rows) < 4:
        raise ParameterError(f"state CSV holds {len(rows)} cells, need at least 4")
    x = np.array([r[0] for r in rows])
    dx = x[1] - x[0]
    if dx <= 0 or not np.allclose(np.diff(x), dx, rtol=1e-9, atol=1e-12):
        raise ParameterError("state CSV x column is not a uniform increasing grid")
    grid = Grid1D(float(x[0] - dx / 2), float(x[-1] + dx / 2), len(rows))
    return FluidState(grid, t, [r[1] for r in rows], [r[2] for r in rows])


def state_to_json(state: FluidState) -> dict:
    return {
        "grid": {"x_min": state.grid.x_min, "x_max": state.grid.x_max, "n_cells": state.grid.n_cells},
        "t": state.t,
        "sigma": state.sigma.tolist(),
        "beta": state.beta.tolist(),
    }


def state_from_json(record: dict) -> FluidState:
    grid = Grid1D(record["grid"]["x_min"], record["grid"]["x_max"], record["grid"]["n_cells"])
    return FluidState(grid, record["t"], record["sigma"], record["beta"])


def save_state_json(state: FluidState, path: str) -> None:
    write_text_atomic(path, json.dumps(state_to_json(state)) + "\n")


def load_state_json(path: str) -> FluidState:
    with open(path) as handle:
        return state_from_json(json.load(handle))
