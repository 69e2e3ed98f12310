"""Exact flux, Jacobian, eigenstructure, cutoff profile, modified flux matrix.

The conservative flux of the system (adiabatic exponent 3) is

    F(sigma, beta) = ( artanh(beta / sigma),  (1/2) ln(sigma^2 - beta^2) ),

defined on the admissible region sigma > |beta| and singular on the
degenerate lines beta = +/- sigma.  Its Jacobian is symmetric with real
eigenvalues 1/(beta - sigma) < 0 < 1/(beta + sigma), so the system is
strictly hyperbolic and genuinely nonlinear there.  The modified flux
matrix replaces the eigenvalues by globally bounded cutoff speeds and
coincides with the Jacobian wherever both invariants stay above the
cutoff level c0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

SQRT2 = float(np.sqrt(2.0))


def _require_admissible(sigma, beta) -> None:
    s = np.asarray(sigma, dtype=float)
    b = np.asarray(beta, dtype=float)
    bad = s <= np.abs(b)
    if np.any(bad):
        if s.ndim == 0:
            where = f"(sigma, beta) = ({float(s)}, {float(b)})"
        else:
            i = int(np.argmax(bad))
            where = f"cell {i}: (sigma, beta) = ({s.flat[i]}, {b.flat[i]})"
        raise DomainError(
            f"flux undefined at {where}: state lies on or beyond the degenerate lines beta = +/-sigma"
        )


def flux(sigma, beta):
    """Flux vector (F1, F2) = (artanh(beta/sigma), (1/2) ln(sigma^2 - beta^2)).

    Accepts scalars or arrays; raises DomainError off the admissible region.
    """
    _require_admissible(sigma, beta)
    s = np.asarray(sigma, dtype=float)
    b = np.asarray(beta, dtype=float)
    f1 = np.arctanh(b / s)
    f2 = 0.5 * np.log(s * s - b * b)
    if np.ndim(sigma) == 0 and np.ndim(beta) == 0:
        return float(f1), float(f2)
    return f1, f2


def flux_jacobian(sigma: float, beta: float) -> np.ndarray:
    """Jacobian of the flux: (1/(beta^2 - sigma^2)) [[beta, -sigma], [-sigma, beta]]."""
    _require_admissible(sigma, beta)
    pref = 1.0 / (beta * beta - sigma * sigma)
    return pref * np.array([[beta, -sigma], [-sigma, beta]])


@dataclass(frozen=True)
class EigenData:
    """Wave speeds, unit right eigenvectors, and genuine-nonlinearity indicators."""

    lambda1: float
    lambda2: float
    r1: np.ndarray
    r2: np.ndarray
    gnl1: float
    gnl2: float


def eigen_structure(sigma: float, beta: float) -> EigenData:
    """Eigen decomposition of the flux Jacobian at an admissible point.

    lambda1 = 1/(beta - sigma) < 0 < lambda2 = 1/(beta + sigma), with fixed
    eigenvectors r1 = (1, -1)/sqrt(2), r2 = (1, 1)/sqrt(2).  The directional
    derivatives grad(lambda_i) . r_i never vanish (genuine nonlinearity):
    gnl1 = sqrt(2)/(beta - sigma)^2, gnl2 = -sqrt(2)/(beta + sigma)^2.
    """
    _require_admissible(sigma, beta)
    lam1 = 1.0 / (beta - sigma)
    lam2 = 1.0 / (beta + sigma)
    r1 = np.array([1.0, -1.0]) / SQRT2
    r2 = np.array([1.0, 1.0]) / SQRT2
    gnl1 = SQRT2 / (beta - sigma) ** 2
    gnl2 = -SQRT2 / (beta + sigma) ** 2
    return EigenData(lam1, lam2, r1, r2, gnl1, gnl2)


# ---------------------------------------------------------------------------
# cutoff profile and its primitive


def psi_cutoff(s, delta):
    """C^1 cutoff: delta/2 for s <= 0, (s^2 + delta^2)/(2 delta) on (0, delta], s beyond.

    Bounded below by delta/2, equal to s for s >= delta, monotone non-decreasing.
    """
    if not delta > 0.0:
        raise ParameterError(f"cutoff level delta must be positive, got {delta}")
    arr = np.asarray(s, dtype=float)
    out = np.where(arr <= 0.0, delta / 2.0, np.where(arr <= delta, (arr * arr + delta * delta) / (2.0 * delta), arr))
    return float(out) if np.ndim(s) == 0 else out


def psi_cutoff_prime(s, delta):
    """Derivative of the cutoff: 0 for s <= 0, s/delta on (0, delta], 1 beyond."""
    if not delta > 0.0:
        raise ParameterError(f"cutoff level delta must be positive, got {delta}")
    arr = np.asarray(s, dtype=float)
    out = np.where(arr <= 0.0, 0.0, np.where(arr <= delta, arr / delta, 1.0))
    return float(out) if np.ndim(s) == 0 else out


def cutoff_primitive(s, c0):
    """Primitive h(s) = integral_0^s dt / psi_c0(t), in closed form.

    Piecewise: 2 s / c0 for s <= 0, 2 arctan(s / c0) on (0, c0],
    pi/2 + ln(s / c0) beyond.  C^2, strictly increasing, h(0) = 0.
    """
    if not c0 > 0.0:
        raise ParameterError(f"cutoff level c0 must be positive, got {c0}")
    arr = np.asarray(s, dtype=float)
    out = np.piecewise(
        arr,
        [arr <= 0.0, (arr > 0.0) & (arr <= c0)],
        [lambda v: 2.0 * v / c0, lambda v: 2.0 * np.arctan(v / c0), lambda v: 0.5 * np.pi + np.log(v / c0)],
    )
    return float(out) if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class CutoffProfile:
    """Cutoff level bundled with its evaluators."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ParameterError(f"cutoff level delta must be positive, got {self.delta}")

    def psi(self, s):
        return psi_cutoff(s, self.delta)

    def psi_prime(self, s):
        return psi_cutoff_prime(s, self.delta)

    def h(self, s):
        return cutoff_primitive(s, self.delta)


# ---------------------------------------------------------------------------
# modified (globally bounded) flux matrix


def modified_speeds(sigma, beta, c0):
    """Cutoff wave speeds (phi1, phi2) = (-1/psi_c0(sigma - beta), 1/psi_c0(sigma + beta)).

    Defined for every state, bounded by 2/c0 in magnitude, and equal to the
    exact eigenvalues whenever both invariants are >= c0.  Vectorized.
    """
    s = np.asarray(sigma, dtype=float)
    b = np.asarray(beta, dtype=float)
    phi1 = -1.0 / psi_cutoff(s - b, c0)
    phi2 = 1.0 / psi_cutoff(s + b, c0)
    if np.ndim(sigma) == 0 and np.ndim(beta) == 0:
        return float(phi1), float(phi2)
    return phi1, phi2


_LEFT = np.array([[-1.0, 1.0], [1.0, 1.0]])
_RIGHT = np.array([[1.0, -1.0], [-1.0, -1.0]])


def modified_flux_matrix(sigma: float, beta: float, c0: float) -> np.ndarray:
    """Modified flux matrix M(u) = -1/2 [[-1,1],[1,1]] diag(phi1, phi2) [[1,-1],[-1,-1]].

    Symmetric, eigenpairs (phi1, r1) and (phi2, r2), operator norm at most
    2/c0; coincides with the flux Jacobian on the invariant region.
    """
    phi1, phi2 = modified_speeds(sigma, beta, c0)
    return -0.5 * _LEFT @ np.diag([phi1, phi2]) @ _RIGHT
