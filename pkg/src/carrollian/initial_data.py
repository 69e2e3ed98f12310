"""Initial-state constructors for the canonical experiments."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .phase import FluidState, Grid1D, state_from_csv


def demo_sine(
    grid: Grid1D,
    sigma_base: float = 2.0,
    sigma_amp: float = 0.5,
    beta_amp: float = 0.5,
) -> FluidState:
    """The repository-wide demo datum sigma = 2 + 0.5 sin(2 pi x),
    beta = 0.5 cos(2 pi x); admissible at level 1 with margin 2 - sqrt(1/2)."""
    x = grid.cell_centers()
    span = grid.x_max - grid.x_min
    theta = 2.0 * np.pi * (x - grid.x_min) / span
    return FluidState(grid, 0.0, sigma_base + sigma_amp * np.sin(theta), beta_amp * np.cos(theta))


def constant_state(grid: Grid1D, sigma: float = 2.0, beta: float = 1.0) -> FluidState:
    return FluidState(grid, 0.0, np.full(grid.n_cells, float(sigma)), np.full(grid.n_cells, float(beta)))


def riemann_jump(
    grid: Grid1D,
    left: tuple,
    right: tuple,
    x_jump: float = None,
    width_cells: float = 3.0,
) -> FluidState:
    """Two constant states joined by a smooth transition of width ~3 dx.

    The explicit central scheme needs continuous data at fixed viscosity,
    so the jump is mollified with a tanh profile before use; sharp L-infinity
    data remains out of scope for the time stepper.
    """
    if x_jump is None:
        x_jump = 0.5 * (grid.x_min + grid.x_max)
    if not grid.x_min < x_jump < grid.x_max:
        raise ConfigError(f"jump position {x_jump} outside the domain ({grid.x_min}, {grid.x_max})")
    sl, bl = left
    sr, br = right
    x = grid.cell_centers()
    ramp = 0.5 * (1.0 + np.tanh((x - x_jump) / (width_cells * grid.dx)))
    return FluidState(grid, 0.0, sl + (sr - sl) * ramp, bl + (br - bl) * ramp)


def _jump_side(value, name: str) -> tuple:
    """Accept a [sigma, beta] pair or a {"sigma": .., "beta": ..} mapping."""
    if isinstance(value, dict):
        try:
            return float(value["sigma"]), float(value["beta"])
        except KeyError as exc:
            raise ConfigError(f"riemann_jump {name} side needs 'sigma' and 'beta', got {sorted(value)}") from exc
    pair = tuple(float(v) for v in value)
    if len(pair) != 2:
        raise ConfigError(f"riemann_jump {name} side needs exactly (sigma, beta), got {value!r}")
    return pair


def build_initial_state(spec: dict, grid: Grid1D) -> FluidState:
    """Construct initial data from a config mapping {"kind": ..., params}."""
    kind = spec.get("kind")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "demo_sine":
        return demo_sine(grid, **params)
    if kind == "constant":
        return constant_state(grid, **params)
    if kind == "riemann_jump":
        left = _jump_side(params.pop("left"), "left")
        right = _jump_side(params.pop("right"), "right")
        return riemann_jump(grid, left, right, **params)
    if kind == "custom_csv":
        path = params.get("path")
        if not path:
            raise ConfigError("custom_csv initial data needs a 'path'")
        state = state_from_csv(path)
        if state.grid.n_cells != grid.n_cells or abs(state.grid.dx - grid.dx) > 1e-12 * grid.dx:
            raise ConfigError(
                f"CSV grid ({state.grid.n_cells} cells) does not match the configured grid ({grid.n_cells} cells)"
            )
        return state
    raise ConfigError(f"unknown initial data kind {kind!r}")
