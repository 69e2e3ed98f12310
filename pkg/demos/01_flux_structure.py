"""Tour of the flux map and its structure on the admissible region.

The conservative system evolves u = (sigma, beta) with flux
F = (artanh(beta/sigma), ln(sigma^2 - beta^2)/2), defined for sigma > |beta|.
This script prints the canonical values at (sigma, beta) = (2, 1), checks the
algebraic identities satisfied by the Jacobian, walks the eigen structure,
and shows how the cutoff-modified flux matrix extends the Jacobian past the
admissibility boundary.

Run:  python3 demos/01_flux_structure.py [--c0 1.0] [--samples 200]
"""

import argparse

import numpy as np

from carrollian import (
    CutoffProfile,
    DomainError,
    eigen_structure,
    flux,
    flux_jacobian,
    modified_flux_matrix,
    modified_speeds,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c0", type=float, default=1.0, help="admissibility level for the cutoff")
    ap.add_argument("--samples", type=int, default=200, help="random points for the identity scan")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    s, b = 2.0, 1.0
    f1, f2 = flux(s, b)
    print(f"flux at (sigma, beta) = ({s:g}, {b:g})")
    print(f"  F1 = artanh(beta/sigma)        = {f1:.12f}")
    print(f"  F2 = ln(sigma^2 - beta^2)/2    = {f2:.12f}")
    print(f"  both equal ln(3)/2             = {0.5 * np.log(3.0):.12f}")
    print()

    jac = flux_jacobian(s, b)
    partner = np.array([[b, s], [s, b]])
    print("jacobian at (2, 1):")
    print(np.array2string(jac, precision=12))
    print("product with the partner matrix [[beta, sigma], [sigma, beta]]:")
    print(np.array2string(jac @ partner, precision=12, suppress_small=True))
    print()

    ed = eigen_structure(s, b)
    print("eigen structure at (2, 1):")
    print(f"  lambda1 = 1/(beta - sigma) = {ed.lambda1:+.6f}   r1 = {ed.r1}")
    print(f"  lambda2 = 1/(beta + sigma) = {ed.lambda2:+.6f}   r2 = {ed.r2}")
    print(f"  grad(lambda) . r (genuine nonlinearity): {ed.gnl1:+.6f}, {ed.gnl2:+.6f}")
    print()

    # the flux map refuses the boundary and beyond
    for bad in ((1.0, 1.0), (1.0, 1.5)):
        try:
            flux(*bad)
        except DomainError as exc:
            print(f"flux{bad} -> DomainError: {exc}")
    print()

    rng = np.random.default_rng(args.seed)
    w1 = args.c0 + rng.uniform(0.01, 4.0, args.samples)
    w2 = args.c0 + rng.uniform(0.01, 4.0, args.samples)
    sig, bet = 0.5 * (w1 + w2), 0.5 * (w1 - w2)
    worst_inv = worst_eig = worst_ext = 0.0
    for si, bi in zip(sig, bet):
        j = flux_jacobian(si, bi)
        worst_inv = max(worst_inv, np.max(np.abs(j @ np.array([[bi, si], [si, bi]]) - np.eye(2))))
        e = eigen_structure(si, bi)
        worst_eig = max(worst_eig, np.max(np.abs(j @ e.r1 - e.lambda1 * e.r1)),
                        np.max(np.abs(j @ e.r2 - e.lambda2 * e.r2)))
        worst_ext = max(worst_ext, np.max(np.abs(modified_flux_matrix(si, bi, args.c0) - j)))
    print(f"identity scan over {args.samples} admissible points (c0 = {args.c0:g}):")
    print(f"  max |J . partner - Id|            = {worst_inv:.2e}")
    print(f"  max eigen residual |J r - lam r|  = {worst_eig:.2e}")
    print(f"  max |modified matrix - J|         = {worst_ext:.2e}  (they coincide on the region)")
    print()

    prof = CutoffProfile(args.c0)
    print(f"cutoff profile psi at level c0 = {args.c0:g} and its primitive h:")
    for u in (-1.0, 0.0, 0.5 * args.c0, args.c0, 2.0 * args.c0):
        print(f"  s = {u:+.3f}: psi = {prof.psi(u):.6f}  h = {prof.h(u):+.6f}")
    print(f"  h({args.c0:g}) = pi/2 exactly: {prof.h(args.c0):.12f} vs {np.pi / 2:.12f}")
    print()

    # off the region the modified matrix stays finite and symmetric
    m0 = modified_flux_matrix(0.0, 0.0, args.c0)
    phi1, phi2 = modified_speeds(0.0, 0.0, args.c0)
    print("modified flux matrix at the (inadmissible) origin:")
    print(np.array2string(m0, precision=6))
    print(f"its eigenvalues are the clipped speeds phi1 = {phi1:+.4f}, phi2 = {phi2:+.4f}")


if __name__ == "__main__":
    main()
