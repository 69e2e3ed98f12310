"""Adaptive Simpson quadrature for the entropy-flux integrands.

Self-contained replacement for a general-purpose integrator: the integrands
here are smooth on each subinterval handed to it (kinks and the removable
s = 0 point are split or patched by the caller), so classic recursive
Simpson with Richardson extrapolation converges quickly and gives a
reliable absolute-error estimate.
"""

from __future__ import annotations

from typing import Callable

from .errors import QuadratureError


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Args:
        f: Integrand. Must be finite on [a, b]; smoothness determines speed.
        a: Lower limit. May exceed ``b``; the usual sign convention applies.
        b: Upper limit.
        tol: Absolute error target for the whole interval.
        max_depth: Recursion limit before giving up.

    Returns:
        The integral value, with the (15x extrapolated) error estimate
        driven below ``tol``.

    Raises:
        QuadratureError: If an interval still fails its tolerance share at
            ``max_depth`` subdivisions; the failing interval is reported.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return sign * _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        # Richardson: the refined estimate plus the leading error term.
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a!r}, {b!r}] "
            f"(residual {abs(delta) / 15.0:.3e} > tol {tol:.3e})"
        )
    return _simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )
