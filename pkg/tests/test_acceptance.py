"""End-to-end acceptance battery.

Every test prints one line

    ACCEPTANCE <nn> <name>: PASS|FAIL (<measured detail>)

before asserting, so `pytest tests/test_acceptance.py -v -s` doubles as the
acceptance report.  Budgeted tests time themselves and fail on overrun.
"""

import time

import numpy as np
import pytest

from carrollian import (
    CATALOG_NAMES,
    CutoffProfile,
    FluidState,
    Grid1D,
    SolverConfig,
    TestFunctionPair,
    adaptive_simpson,
    bump_battery,
    bump_test_function,
    catalog_pair,
    demo_sine,
    eigen_structure,
    entropy_compatibility_residual,
    entropy_equation_residual,
    entropy_inequality_check,
    entropy_weak_functional,
    flux_jacobian,
    kinetic_measures,
    l2_energy,
    modified_flux_matrix,
    pair_from_f,
    psi_cutoff,
    psi_cutoff_prime,
    run,
    weak_residual,
)
from carrollian.entropy import quartic_generator

from mms_utils import mms_beta, mms_sigma, mms_source


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def random_admissible(rng, n, c0=1.0, span=5.0):
    w1 = c0 + rng.uniform(0.05, span, n)
    w2 = c0 + rng.uniform(0.05, span, n)
    return 0.5 * (w1 + w2), 0.5 * (w1 - w2)


@pytest.fixture(scope="module")
def demo512():
    grid = Grid1D(0.0, 1.0, 512)
    cfg = SolverConfig(epsilon=0.01, c0=1.0, t_end=1.0, output_every=13)
    t0 = time.perf_counter()
    traj = run(demo_sine(grid), cfg)
    return traj, time.perf_counter() - t0


@pytest.fixture(scope="module")
def kinetic512():
    grid = Grid1D(0.0, 1.0, 512)
    cfg = SolverConfig(epsilon=0.01, c0=1.0, t_end=0.25, output_every=1)
    return run(demo_sine(grid), cfg)


def test_acceptance_01_invariant_region(demo512):
    traj, elapsed = demo512
    min_w = min(traj.min_w1_overall, traj.min_w2_overall)
    ok = min_w >= 1.0 - 1e-6 and elapsed <= 30.0
    report(1, "invariant-region-demo", ok, f"min invariant {min_w:.6f} >= 1-1e-6, {elapsed:.1f}s <= 30s")


def test_acceptance_02_scalar_oracle_gap():
    t0 = time.perf_counter()
    gaps = []
    for n in (256, 512):
        grid = Grid1D(0.0, 1.0, n)
        state0 = demo_sine(grid)
        base = dict(epsilon=0.01, c0=1.0, t_end=0.5, output_every=10**9)
        coupled = run(state0.copy(), SolverConfig(scheme="coupled_conservative", **base))
        scalar = run(state0.copy(), SolverConfig(scheme="scalar_ri", **base))
        ds = coupled.sigmas[-1] - scalar.sigmas[-1]
        db = coupled.betas[-1] - scalar.betas[-1]
        gaps.append(max(float(np.max(np.abs(ds))), float(np.max(np.abs(db)))))
    elapsed = time.perf_counter() - t0
    ratio = gaps[0] / gaps[1]
    ok = 3.0 <= ratio <= 5.0 and elapsed <= 60.0
    report(2, "scalar-oracle-gap", ok,
           f"L-inf gaps {gaps[0]:.3e} -> {gaps[1]:.3e}, ratio {ratio:.3f} in [3, 5], {elapsed:.1f}s <= 60s")


def test_acceptance_03_manufactured_solution_order():
    eps = 0.01

    def error_at(scheme, n):
        grid = Grid1D(0.0, 1.0, n)
        x = grid.cell_centers()
        state0 = FluidState(grid, 0.0, mms_sigma(0.0, x), mms_beta(0.0, x))
        cfg = SolverConfig(epsilon=eps, c0=1.0, t_end=0.25, output_every=10**9,
                           scheme=scheme, source=mms_source(eps))
        traj = run(state0, cfg)
        t = float(traj.times[-1])
        return max(float(np.max(np.abs(traj.sigmas[-1] - mms_sigma(t, x)))),
                   float(np.max(np.abs(traj.betas[-1] - mms_beta(t, x)))))

    details = []
    worst = np.inf
    for scheme in ("coupled_conservative", "coupled_modified"):
        errs = [error_at(scheme, n) for n in (128, 256, 512)]
        orders = [float(np.log2(a / b)) for a, b in zip(errs, errs[1:])]
        worst = min(worst, min(orders))
        details.append(f"{scheme} orders {orders[0]:.3f}, {orders[1]:.3f}")
    ok = worst >= 1.9
    report(3, "manufactured-solution-order", ok, "; ".join(details) + " (all >= 1.9)")


def test_acceptance_04_generators_vs_closed_forms():
    gen = pair_from_f(TestFunctionPair(
        f=lambda s: 0.25 * s * s, f_prime=lambda s: 0.5 * s, f_pp=lambda s: 0.5, label="s^2/4"))
    special = catalog_pair("special")
    sig = np.linspace(1.2, 3.0, 50)
    bet = np.linspace(-0.9, 0.9, 50)
    S, B = np.meshgrid(sig, bet)
    lattice_gap = max(float(np.max(np.abs(gen.eta(S, B) - special.eta(S, B)))),
                      float(np.max(np.abs(gen.q(S, B) - special.q(S, B)))))

    quartic = pair_from_f(quartic_generator())
    quartic_gap = abs(quartic.q(2.0, 1.0) - 104.0 / 3.0)
    linear = catalog_pair("linear-g")
    linear_gap = max(abs(linear.eta(2.0, 1.0) - 4.0), abs(linear.q(2.0, 1.0) - 4.0))

    ok = lattice_gap <= 1e-10 and quartic_gap <= 1e-9 and linear_gap <= 1e-9
    report(4, "generators-vs-closed-forms", ok,
           f"50x50 lattice gap {lattice_gap:.2e} <= 1e-10, quartic q gap {quartic_gap:.2e} <= 1e-9, "
           f"linear-g gap {linear_gap:.2e} <= 1e-9")


def test_acceptance_05_catalog_residuals():
    # window covers every state reached by the dynamical tests; the stencil's
    # rounding floor grows like sigma (sigma^2 - beta^2)^2 |eta|, so a wider
    # box needs a larger step, not a looser tolerance
    rng = np.random.default_rng(20260819)
    sigma, beta = random_admissible(rng, 100, span=3.0)
    worst_eq, worst_comp = 0.0, 0.0
    for name in CATALOG_NAMES:
        pair = catalog_pair(name)
        for s, b in zip(sigma, beta):
            worst_eq = max(worst_eq, abs(entropy_equation_residual(pair, s, b)))
            worst_comp = max(worst_comp, float(np.max(np.abs(
                entropy_compatibility_residual(pair, s, b)))))
    ok = worst_eq <= 1e-5 and worst_comp <= 1e-5
    report(5, "catalog-residuals", ok,
           f"equation {worst_eq:.2e}, compatibility {worst_comp:.2e}, both <= 1e-5 "
           f"at 100 points x {len(CATALOG_NAMES)} pairs")


def test_acceptance_06_energy_budget(demo512):
    traj, _ = demo512
    dx = traj.grid.dx
    ts = [0.0] + [r.t for r in traj.reports]
    budget = [l2_energy(traj.sigmas[0], traj.betas[0], dx)]
    budget += [r.l2_energy + r.visc_dissipation_cum for r in traj.reports]
    rates = np.diff(budget) / np.diff(ts)
    max_rate = float(np.max(rates))
    ok = max_rate <= 1e-3
    report(6, "energy-budget-monotone", ok,
           f"max growth rate {max_rate:+.2e} <= 1e-3 per unit time over {len(rates)} steps")


def test_acceptance_07_kinetic_measures(kinetic512):
    traj = kinetic512
    hist = kinetic_measures(traj, bins=64)
    min_bin = float(np.min(hist.mu1_mass))
    rel = abs(hist.total_mu1 - 2.0 * traj.cum_dissipation) / max(hist.total_mu1, 1e-300)
    slow = traj.betas - traj.sigmas
    fast = traj.betas + traj.sigmas
    lo = float(min(slow.min(), fast.min())) - traj.grid.dx
    hi = float(max(slow.max(), fast.max())) + traj.grid.dx
    inside = hist.s_edges[0] >= lo and hist.s_edges[-1] <= hi
    ok = min_bin >= 0.0 and rel <= 1e-12 and inside
    report(7, "kinetic-measures", ok,
           f"min mu1 bin {min_bin:+.1e} >= 0, mass identity rel err {rel:.2e} <= 1e-12, "
           f"support within velocity range +- dx: {inside}")


def test_acceptance_08_entropy_inequality_battery(demo512):
    traj, _ = demo512
    special = catalog_pair("special")
    concave = special.scaled(-1.0)
    battery = bump_battery(float(traj.times[-1]))
    values, flipped = [], []
    for phi in battery:
        result = entropy_inequality_check(traj, special, phi)
        values.append(result.value)
        flipped.append(entropy_weak_functional(traj, concave, phi))
    min_value = min(values)
    max_flipped = max(flipped)
    ok = min_value >= -1e-3 and max_flipped <= 1e-3
    report(8, "entropy-inequality-battery", ok,
           f"9-bump min value {min_value:+.3e} >= -1e-3, concave control max {max_flipped:+.3e} <= 1e-3")


def test_acceptance_09_weak_residual_sweep():
    eps_list = (0.04, 0.02, 0.01, 0.005)
    grid = Grid1D(0.0, 1.0, 1024)
    state0 = demo_sine(grid)
    t_end = 0.5
    phi = bump_test_function(0.05 * t_end, 0.95 * t_end, 0.15, 0.65, label="sweep-bump")
    norms = []
    for eps in eps_list:
        dt_est = 0.4 * grid.dx * grid.dx / (2.0 * eps)
        every = max(1, int(np.ceil(t_end / dt_est)) // 1000)
        cfg = SolverConfig(epsilon=eps, c0=1.0, t_end=t_end, output_every=every)
        traj = run(state0.copy(), cfg)
        norms.append(float(np.linalg.norm(weak_residual(traj, phi))))
    decreasing = all(b < a for a, b in zip(norms, norms[1:]))
    slope = float(np.polyfit(np.log(eps_list), np.log(norms), 1)[0])
    ok = decreasing and 0.4 <= slope <= 1.1
    report(9, "weak-residual-sweep", ok,
           f"norms {', '.join(f'{v:.3e}' for v in norms)} strictly decreasing: {decreasing}, "
           f"exponent {slope:.3f} in [0.4, 1.1]")


def test_acceptance_10_flux_structure_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(97)
    sigma, beta = random_admissible(rng, 1000, span=6.0)

    worst_partner, worst_eigen, worst_coincide = 0.0, 0.0, 0.0
    eye = np.eye(2)
    for s, b in zip(sigma, beta):
        jac = flux_jacobian(s, b)
        partner = np.array([[b, s], [s, b]])
        worst_partner = max(worst_partner, float(np.max(np.abs(jac @ partner - eye))))
        ed = eigen_structure(s, b)
        for lam, vec in ((ed.lambda1, ed.r1), (ed.lambda2, ed.r2)):
            worst_eigen = max(worst_eigen, float(np.max(np.abs(jac @ vec - lam * vec))))
        worst_coincide = max(worst_coincide, float(np.max(np.abs(
            modified_flux_matrix(s, b, 1.0) - jac))))

    # C1 matching across the two cutoff knots, probed one tiny step apart
    worst_knot = 0.0
    for d in rng.uniform(0.1, 4.0, 1000):
        h = 1e-12 * max(1.0, d)
        for knot in (0.0, d):
            worst_knot = max(
                worst_knot,
                abs(psi_cutoff(knot + h, d) - psi_cutoff(knot - h, d)),
                abs(psi_cutoff_prime(knot + h, d) - psi_cutoff_prime(knot - h, d)),
            )

    # closed-form primitive vs adaptive quadrature of 1/psi, split at the
    # branch knots so each segment is smooth and the recursion stays shallow
    c0s = rng.uniform(0.3, 3.0, 1000)
    ss = c0s * rng.uniform(-2.0, 6.0, 1000)
    worst_h = 0.0
    for c0, s in zip(c0s, ss):
        prof = CutoffProfile(c0)
        lo, hi = (s, 0.0) if s < 0.0 else (0.0, s)
        cuts = [lo] + [k for k in (0.0, c0) if lo < k < hi] + [hi]
        quad = sum(adaptive_simpson(lambda u: 1.0 / prof.psi(u), a, b, tol=3e-11)
                   for a, b in zip(cuts, cuts[1:]))
        if s < 0.0:
            quad = -quad
        worst_h = max(worst_h, abs(prof.h(s) - quad))
    elapsed = time.perf_counter() - t0

    ok = (worst_partner <= 1e-13 and worst_eigen <= 1e-13 and worst_coincide <= 1e-13
          and worst_knot <= 1e-10 and worst_h <= 1e-10 and elapsed <= 5.0)
    report(10, "flux-structure-identities", ok,
           f"jacobian-partner {worst_partner:.1e}, eigen {worst_eigen:.1e}, "
           f"modified-matrix coincidence {worst_coincide:.1e} (all <= 1e-13); "
           f"cutoff knots {worst_knot:.1e}, primitive vs quadrature {worst_h:.1e} "
           f"(both <= 1e-10); {elapsed:.1f}s <= 5s")
