"""Entropy pairs generated from scalar test functions, plus residual checks.

Every smooth entropy of the system solves the wave equation
eta_sigma_sigma = eta_beta_beta in the state plane, so entropies are
parametrised by two scalar profiles evaluated on the characteristic
arguments p = beta - sigma and r = beta + sigma:

  family 1 (even part):  eta = f(p) + f(r),
      q = int_p^r sgn(s - beta) f'(s)/s ds + 2 int_0^beta f'(s)/s ds,
      with f in C^2 and f'(0) = 0 so that f'(s)/s extends continuously
      by f''(0) across s = 0;

  family 2 (odd part):   eta = int_p^r g(s) ds,
      q = int_p^r g(s)/s ds,
      with g in C^1 and g(0) = 0 so that g(s)/s extends by g'(0).

The quadratic profile f(s) = s^2/4 generates the special pair
(eta*, q*) = ((sigma^2 + beta^2)/2, beta) whose Hessian is the identity.

Closed forms for the gradients and Hessians of generated pairs:

  grad eta_1 = f'(p) (-1, 1)^T + f'(r) (1, 1)^T
  grad q_1   = (f'(p)/p) (-1, 1)^T + (f'(r)/r) (1, 1)^T
  hess eta_1 = f''(p) [[1,-1],[-1,1]] + f''(r) [[1,1],[1,1]]
  grad eta_2 = g(p) (1, -1)^T + g(r) (1, 1)^T
  grad q_2   = (g(p)/p) (1, -1)^T + (g(r)/r) (1, 1)^T
  hess eta_2 = g'(p) [[-1,1],[1,-1]] + g'(r) [[1,1],[1,1]]
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import AdmissibilityError, ParameterError
from .flux import flux_jacobian
from .quadrature import adaptive_simpson

QUAD_TOL = 1e-10
PAIR_CONDITION_TOL = 1e-12

# FD steps are dyadic so that perturbed state-plane arguments stay exact in
# binary arithmetic; the wave-equation stencil then cancels truncation at
# every order for generated pairs and keeps rounding noise far below the
# sigma (beta^2 - sigma^2)^2 amplification factor.
EQUATION_RESIDUAL_STEP = 2.0**-7
COMPATIBILITY_RESIDUAL_STEP = 2.0**-13


@dataclass(frozen=True)
class TestFunctionPair:
    """Scalar generator profiles; either part (or both) may be present.

    The f part requires f' and f'' with f'(0) = 0; the g part requires g'
    with g(0) = 0.  All callables should accept floats.
    """

    f: Optional[Callable] = None
    f_prime: Optional[Callable] = None
    f_pp: Optional[Callable] = None
    g: Optional[Callable] = None
    g_prime: Optional[Callable] = None
    label: str = ""


@dataclass(frozen=True)
class ValidationReport:
    label: str
    has_f: bool
    has_g: bool
    f_prime_at_zero: float
    g_at_zero: float
    f_pp_bound: float
    g_prime_bound: float


def validate_test_pair(pair: TestFunctionPair, scan_radius: float = 8.0, n_scan: int = 801) -> ValidationReport:
    """Check the admissibility conditions of a generator pair.

    Raises AdmissibilityError naming the failed condition; returns a report
    with the quantities checked otherwise.
    """
    has_f = pair.f is not None
    has_g = pair.g is not None
    if not has_f and not has_g:
        raise AdmissibilityError(f"test pair {pair.label!r}: neither an f part nor a g part is present")
    fp0 = 0.0
    g0 = 0.0
    fpp_bound = 0.0
    gp_bound = 0.0
    grid = np.linspace(-scan_radius, scan_radius, n_scan)
    if has_f:
        if pair.f_prime is None or pair.f_pp is None:
            raise AdmissibilityError(f"test pair {pair.label!r}: f part needs f' and f''")
        fp0 = float(pair.f_prime(0.0))
        if abs(fp0) > PAIR_CONDITION_TOL:
            raise AdmissibilityError(
                f"test pair {pair.label!r}: f'(0) = {fp0!r} must vanish (|f'(0)| <= {PAIR_CONDITION_TOL})"
            )
        vals = np.array([pair.f_pp(s) for s in grid], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise AdmissibilityError(f"test pair {pair.label!r}: f'' is not finite on [-{scan_radius}, {scan_radius}]")
        fpp_bound = float(np.max(np.abs(vals)))
    if has_g:
        if pair.g_prime is None:
            raise AdmissibilityError(f"test pair {pair.label!r}: g part needs g'")
        g0 = float(pair.g(0.0))
        if abs(g0) > PAIR_CONDITION_TOL:
            raise AdmissibilityError(
                f"test pair {pair.label!r}: g(0) = {g0!r} must vanish (|g(0)| <= {PAIR_CONDITION_TOL})"
            )
        vals = np.array([pair.g_prime(s) for s in grid], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise AdmissibilityError(f"test pair {pair.label!r}: g' is not finite on [-{scan_radius}, {scan_radius}]")
        gp_bound = float(np.max(np.abs(vals)))
    return ValidationReport(pair.label, has_f, has_g, fp0, g0, fpp_bound, gp_bound)


def _vectorize2(fn: Callable[[float, float], float]) -> Callable:
    """Lift a scalar (sigma, beta) -> value function to numpy broadcasting."""

    def wrapped(sigma, beta):
        if np.ndim(sigma) == 0 and np.ndim(beta) == 0:
            return fn(float(sigma), float(beta))
        s, b = np.broadcast_arrays(np.asarray(sigma, float), np.asarray(beta, float))
        out = np.empty(s.shape)
        for idx in np.ndindex(*s.shape):
            out[idx] = fn(float(s[idx]), float(b[idx]))
        return out

    return wrapped


@dataclass(frozen=True)
class EntropyPair:
    """Entropy/flux evaluators with optional closed-form derivatives.

    eta and q broadcast over arrays; grad_eta maps a point to a 2-vector
    (d/dsigma, d/dbeta) and hess_eta to the symmetric 2x2 Hessian.
    """

    eta: Callable
    q: Callable
    provenance: str
    grad_eta: Optional[Callable] = None
    grad_q: Optional[Callable] = None
    hess_eta: Optional[Callable] = None

    def scaled(self, c: float) -> "EntropyPair":
        """Scalar multiple (c*eta, c*q); c < 0 flips convexity."""
        grad_eta = None if self.grad_eta is None else (lambda s, b: c * self.grad_eta(s, b))
        grad_q = None if self.grad_q is None else (lambda s, b: c * self.grad_q(s, b))
        hess_eta = None if self.hess_eta is None else (lambda s, b: c * self.hess_eta(s, b))
        return EntropyPair(
            eta=lambda s, b: c * self.eta(s, b),
            q=lambda s, b: c * self.q(s, b),
            provenance=f"{c:g} * ({self.provenance})",
            grad_eta=grad_eta,
            grad_q=grad_q,
            hess_eta=hess_eta,
        )


def _split_at_zero(a: float, b: float) -> list[tuple[float, float]]:
    """Split [a, b] at 0 when 0 lies strictly inside (keeps integrands smooth)."""
    if (a < 0.0 < b) or (b < 0.0 < a):
        return [(a, 0.0), (0.0, b)]
    return [(a, b)]


def pair_from_f(pair: TestFunctionPair, quad_tol: float = QUAD_TOL) -> EntropyPair:
    """Entropy pair of the first family from an f profile (f'(0) = 0)."""
    report = validate_test_pair(pair)
    if not report.has_f:
        raise AdmissibilityError(f"test pair {pair.label!r} has no f part")
    f, fp, fpp = pair.f, pair.f_prime, pair.f_pp
    fpp0 = float(fpp(0.0))

    def ratio(s: float) -> float:
        # f'(s)/s extends continuously across s = 0 because f'(0) = 0.
        return fpp0 if s == 0.0 else fp(s) / s

    def eta_point(sigma: float, beta: float) -> float:
        return f(beta - sigma) + f(beta + sigma)

    def q_point(sigma: float, beta: float) -> float:
        p, r = beta - sigma, beta + sigma
        total = 0.0
        for a, b in _split_at_zero(p, beta):
            total -= adaptive_simpson(ratio, a, b, quad_tol / 6.0)
        for a, b in _split_at_zero(beta, r):
            total += adaptive_simpson(ratio, a, b, quad_tol / 6.0)
        for a, b in _split_at_zero(0.0, beta):
            total += 2.0 * adaptive_simpson(ratio, a, b, quad_tol / 6.0)
        return total

    def grad_eta(sigma: float, beta: float) -> np.ndarray:
        dp, dr = fp(beta - sigma), fp(beta + sigma)
        return np.array([dr - dp, dp + dr])

    def grad_q(sigma: float, beta: float) -> np.ndarray:
        rp, rr = ratio(beta - sigma), ratio(beta + sigma)
        return np.array([rr - rp, rp + rr])

    def hess_eta(sigma: float, beta: float) -> np.ndarray:
        cp, cr = fpp(beta - sigma), fpp(beta + sigma)
        return np.array([[cp + cr, cr - cp], [cr - cp, cp + cr]])

    return EntropyPair(
        eta=eta_point if _is_vectorized(f) else _vectorize2(eta_point),
        q=_vectorize2(q_point),
        provenance=f"family-1({pair.label or 'f'})",
        grad_eta=grad_eta,
        grad_q=grad_q,
        hess_eta=hess_eta,
    )


def pair_from_g(pair: TestFunctionPair, quad_tol: float = QUAD_TOL) -> EntropyPair:
    """Entropy pair of the second family from a g profile (g(0) = 0)."""
    report = validate_test_pair(pair)
    if not report.has_g:
        raise AdmissibilityError(f"test pair {pair.label!r} has no g part")
    g, gp = pair.g, pair.g_prime
    gp0 = float(gp(0.0))

    def ratio(s: float) -> float:
        return gp0 if s == 0.0 else g(s) / s

    def eta_point(sigma: float, beta: float) -> float:
        p, r = beta - sigma, beta + sigma
        return sum(adaptive_simpson(g, a, b, quad_tol / 2.0) for a, b in _split_at_zero(p, r))

    def q_point(sigma: float, beta: float) -> float:
        p, r = beta - sigma, beta + sigma
        return sum(adaptive_simpson(ratio, a, b, quad_tol / 2.0) for a, b in _split_at_zero(p, r))

    def grad_eta(sigma: float, beta: float) -> np.ndarray:
        vp, vr = g(beta - sigma), g(beta + sigma)
        return np.array([vp + vr, vr - vp])

    def grad_q(sigma: float, beta: float) -> np.ndarray:
        rp, rr = ratio(beta - sigma), ratio(beta + sigma)
        return np.array([rp + rr, rr - rp])

    def hess_eta(sigma: float, beta: float) -> np.ndarray:
        cp, cr = gp(beta - sigma), gp(beta + sigma)
        return np.array([[cr - cp, cp + cr], [cp + cr, cr - cp]])

    return EntropyPair(
        eta=_vectorize2(eta_point),
        q=_vectorize2(q_point),
        provenance=f"family-2({pair.label or 'g'})",
        grad_eta=grad_eta,
        grad_q=grad_q,
        hess_eta=hess_eta,
    )


def _is_vectorized(fn: Callable) -> bool:
    try:
        out = fn(np.array([0.0, 1.0]))
    except Exception:
        return False
    return isinstance(out, np.ndarray) and out.shape == (2,)


def special_pair() -> EntropyPair:
    """The quadratic pair (eta*, q*) = ((sigma^2 + beta^2)/2, beta), Hessian = Id.

    Closed-form evaluators; the generator route with f(s) = s^2/4 reproduces
    them to quadrature tolerance (exercised by the test suite).
    """
    return EntropyPair(
        eta=lambda s, b: 0.5 * (np.asarray(s, float) ** 2 + np.asarray(b, float) ** 2),
        q=lambda s, b: np.asarray(b, float) + 0.0 * np.asarray(s, float),
        provenance="special(f=s^2/4)",
        grad_eta=lambda s, b: np.array([float(s), float(b)]),
        grad_q=lambda s, b: np.array([0.0, 1.0]),
        hess_eta=lambda s, b: np.eye(2),
    )


def quartic_generator() -> TestFunctionPair:
    return TestFunctionPair(
        f=lambda s: np.asarray(s, float) ** 4,
        f_prime=lambda s: 4.0 * s**3,
        f_pp=lambda s: 12.0 * s**2,
        label="quartic",
    )


def _monomial_g(power: int, label: str) -> TestFunctionPair:
    return TestFunctionPair(
        g=lambda s: float(s) ** power,
        g_prime=lambda s: power * float(s) ** (power - 1),
        label=label,
    )


CATALOG_NAMES = ("special", "quartic", "linear-g", "quadratic-g", "cubic-g")


def catalog_pair(name: str, quad_tol: float = QUAD_TOL) -> EntropyPair:
    """Named entropy pairs used by the audits and the command line."""
    if name == "special":
        return special_pair()
    if name == "quartic":
        return pair_from_f(quartic_generator(), quad_tol)
    if name == "linear-g":
        return pair_from_g(_monomial_g(1, "linear-g"), quad_tol)
    if name == "quadratic-g":
        return pair_from_g(_monomial_g(2, "quadratic-g"), quad_tol)
    if name == "cubic-g":
        return pair_from_g(_monomial_g(3, "cubic-g"), quad_tol)
    raise ParameterError(f"unknown entropy pair {name!r}; known: {', '.join(CATALOG_NAMES)}")


# ---------------------------------------------------------------------------
# residual checks


def entropy_equation_residual(pair: EntropyPair, sigma: float, beta: float, step: float = EQUATION_RESIDUAL_STEP) -> float:
    """Wave-equation residual sigma (beta^2 - sigma^2)^2 (eta_ss - eta_bb), by central differences.

    The -2 eta(sigma, beta) terms of the two second differences cancel, so a
    single four-point stencil is used.  For any entropy of the generated
    families the truncation cancels identically and only rounding remains.

    The step is snapped to the nearest power of two: the probe points then
    stay exactly representable, and the stencil's pairwise cancellation in
    the characteristic arguments beta -+ sigma survives in floating point
    instead of leaving an |f'| ulp / h^2 rounding floor.
    """
    h = 2.0 ** round(np.log2(abs(step)))
    stencil = (
        float(pair.eta(sigma + h, beta))
        + float(pair.eta(sigma - h, beta))
        - float(pair.eta(sigma, beta + h))
        - float(pair.eta(sigma, beta - h))
    ) / (h * h)
    return sigma * (beta * beta - sigma * sigma) ** 2 * stencil


def entropy_compatibility_residual(
    pair: EntropyPair, sigma: float, beta: float, step: float = COMPATIBILITY_RESIDUAL_STEP
) -> np.ndarray:
    """Compatibility residual grad q - grad eta . jacobian, via finite differences.

    Central first differences of both evaluators keep the check independent
    of the closed-form derivative routes.
    """
    h = step
    grad_eta = np.array(
        [
            (float(pair.eta(sigma + h, beta)) - float(pair.eta(sigma - h, beta))) / (2 * h),
            (float(pair.eta(sigma, beta + h)) - float(pair.eta(sigma, beta - h))) / (2 * h),
        ]
    )
    grad_q = np.array(
        [
            (float(pair.q(sigma + h, beta)) - float(pair.q(sigma - h, beta))) / (2 * h),
            (float(pair.q(sigma, beta + h)) - float(pair.q(sigma, beta - h))) / (2 * h),
        ]
    )
    return grad_q - grad_eta @ flux_jacobian(sigma, beta)


def hessian_fd(pair: EntropyPair, sigma: float, beta: float, step: float = EQUATION_RESIDUAL_STEP) -> np.ndarray:
    """Finite-difference Hessian of eta (fallback when no closed form is attached)."""
    h = step
    e = lambda s, b: float(pair.eta(s, b))
    e0 = e(sigma, beta)
    dss = (e(sigma + h, beta) - 2 * e0 + e(sigma - h, beta)) / (h * h)
    dbb = (e(sigma, beta + h) - 2 * e0 + e(sigma, beta - h)) / (h * h)
    dsb = (e(sigma + h, beta + h) - e(sigma + h, beta - h) - e(sigma - h, beta + h) + e(sigma - h, beta - h)) / (
        4 * h * h
    )
    return np.array([[dss, dsb], [dsb, dbb]])


def certify_convexity(
    pair: EntropyPair,
    sigma_range: tuple[float, float],
    beta_range: tuple[float, float],
    n: int = 25,
    tol: float = 1e-9,
) -> bool:
    """Scan the Hessian over a state box; True when its smallest eigenvalue
    stays above -tol * (1 + |H|) everywhere on the lattice."""
    sig = np.linspace(sigma_range[0], sigma_range[1], n)
    bet = np.linspace(beta_range[0], beta_range[1], n)
    hess = pair.hess_eta if pair.hess_eta is not None else (lambda s, b: hessian_fd(pair, s, b))
    for s in sig:
        for b in bet:
            H = np.asarray(hess(float(s), float(b)), dtype=float)
            scale = 1.0 + float(np.max(np.abs(H)))
            tr, det_off = H[0, 0] + H[1, 1], H[0, 1]
            disc = np.sqrt((H[0, 0] - H[1, 1]) ** 2 + 4.0 * det_off * det_off)
            if 0.5 * (tr - disc) < -tol * scale:
                return False
    return True
