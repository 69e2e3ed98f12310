import numpy as np
import pytest

from carrollian import (
    Grid1D,
    InputError,
    SolverConfig,
    SpaceTimeTestFunction,
    Trajectory,
    bump_battery,
    bump_test_function,
    catalog_pair,
    central_gradient,
    constant_state,
    convergence_metrics,
    demo_sine,
    entropy_dissipation_field,
    entropy_inequality_check,
    entropy_weak_functional,
    kinetic_measures,
    run,
    weak_residual,
)

EPS = 0.01


def short_run(n=128, t_end=0.05, state=None, **over):
    g = Grid1D(0.0, 1.0, n)
    cfg = SolverConfig(epsilon=EPS, c0=1.0, t_end=t_end, output_every=1, **over)
    return run(demo_sine(g) if state is None else state(g), cfg)


@pytest.fixture(scope="module")
def demo_traj():
    return short_run()


@pytest.fixture(scope="module")
def const_traj():
    return short_run(state=lambda g: constant_state(g, 2.0, 1.0))


def test_bump_support_is_exactly_compact():
    phi = bump_test_function(0.1, 0.9, 0.2, 0.8, label="b")
    assert phi.phi(0.1, 0.2) == 0.0
    assert phi.phi(0.9, 0.8) == 0.0
    assert phi.phi(0.05, 0.5) == 0.0
    assert phi.phi(0.5, 0.5) > 0.0
    assert phi.nonnegative


def test_bump_derivatives_match_finite_differences():
    phi = bump_test_function(0.0, 1.0, 0.0, 1.0, label="b")
    h = 1e-6
    for t, x in ((0.3, 0.4), (0.55, 0.72), (0.81, 0.33)):
        fd_t = (phi.phi(t + h, x) - phi.phi(t - h, x)) / (2 * h)
        fd_x = (phi.phi(t, x + h) - phi.phi(t, x - h)) / (2 * h)
        fd_xx = (phi.phi(t, x + h) - 2 * phi.phi(t, x) + phi.phi(t, x - h)) / h**2
        assert phi.phi_t(t, x) == pytest.approx(fd_t, rel=1e-5, abs=1e-8)
        assert phi.phi_x(t, x) == pytest.approx(fd_x, rel=1e-5, abs=1e-8)
        assert phi.phi_xx(t, x) == pytest.approx(fd_xx, rel=1e-3, abs=1e-4)


def test_battery_has_nine_members_inside_the_window():
    battery = bump_battery(1.0)
    assert len(battery) == 9
    assert len({phi.label for phi in battery}) == 9
    for phi in battery:
        (t_lo, t_hi), (x_lo, x_hi) = phi.support
        assert 0.0 < t_lo < t_hi < 1.0
        assert 0.0 <= x_lo < x_hi <= 1.0


def test_battery_rejects_degenerate_windows():
    with pytest.raises(InputError):
        bump_battery(1.0, x_min=0.6, x_max=0.2)


def test_weak_residual_zero_test_function(const_traj):
    zero = SpaceTimeTestFunction(
        phi=lambda t, x: np.zeros_like(np.asarray(x, float)),
        phi_t=lambda t, x: np.zeros_like(np.asarray(x, float)),
        phi_x=lambda t, x: np.zeros_like(np.asarray(x, float)),
        phi_xx=lambda t, x: np.zeros_like(np.asarray(x, float)),
        support=None,
        nonnegative=True,
        label="zero",
    )
    np.testing.assert_array_equal(weak_residual(const_traj, zero), [0.0, 0.0])


def test_weak_residual_constant_state(const_traj):
    t_end = float(const_traj.times[-1])
    phi = bump_test_function(0.1 * t_end, 0.9 * t_end, 0.1, 0.9, label="b")
    assert np.max(np.abs(weak_residual(const_traj, phi))) <= 1e-12


def test_weak_residual_rejects_support_violations(demo_traj):
    t_end = float(demo_traj.times[-1])
    with pytest.raises(InputError):
        weak_residual(demo_traj, bump_test_function(0.1 * t_end, 1.5 * t_end, 0.1, 0.9, label="t-late"))
    with pytest.raises(InputError):
        weak_residual(demo_traj, bump_test_function(0.1 * t_end, 0.9 * t_end, -0.5, 0.5, label="x-low"))


def test_kinetic_measures_constant_state(const_traj):
    hist = kinetic_measures(const_traj, bins=16)
    assert hist.total_mu1 == 0.0
    assert hist.total_mu2 == 0.0
    np.testing.assert_array_equal(hist.mu1_mass, np.zeros(16))


def test_kinetic_measures_sign_mass_and_support(demo_traj):
    hist = kinetic_measures(demo_traj, bins=64)
    assert np.all(hist.mu1_mass >= 0.0)
    # the dominance |mu2| <= mu1 is exact up to summation rounding
    assert np.all(np.abs(hist.mu2_mass) <= hist.mu1_mass * (1.0 + 1e-12) + 1e-300)

    rel = abs(hist.total_mu1 - 2.0 * demo_traj.cum_dissipation) / hist.total_mu1
    assert rel <= 1e-12

    s_slow = demo_traj.betas - demo_traj.sigmas
    s_fast = demo_traj.betas + demo_traj.sigmas
    lo = min(s_slow.min(), s_fast.min()) - demo_traj.grid.dx
    hi = max(s_slow.max(), s_fast.max()) + demo_traj.grid.dx
    assert hist.s_edges[0] >= lo and hist.s_edges[-1] <= hi


def test_kinetic_mu2_matches_cross_term_integral(demo_traj):
    hist = kinetic_measures(demo_traj, bins=64)
    dx = demo_traj.grid.dx
    total = 0.0
    for k in range(demo_traj.n_snapshots - 1):
        dt = demo_traj.reports[k].dt
        gs = central_gradient(demo_traj.sigmas[k], dx, "periodic")
        gb = central_gradient(demo_traj.betas[k], dx, "periodic")
        total += -4.0 * EPS * float(np.sum(gs * gb)) * dx * dt
    assert hist.total_mu2 == pytest.approx(total, rel=1e-12, abs=1e-15 * hist.total_mu1)


def test_kinetic_measures_input_errors(demo_traj):
    with pytest.raises(InputError):
        kinetic_measures(demo_traj, bins=0)
    g = demo_traj.grid
    single = Trajectory(
        grid=g,
        config=demo_traj.config,
        times=[0.0],
        sigmas=demo_traj.sigmas[:1],
        betas=demo_traj.betas[:1],
        reports=[],
    )
    with pytest.raises(InputError):
        kinetic_measures(single, bins=8)


def test_dissipation_field_constant_state(const_traj):
    fld = entropy_dissipation_field(const_traj, catalog_pair("special"))
    np.testing.assert_array_equal(fld.lhs, np.zeros_like(fld.lhs))
    np.testing.assert_array_equal(fld.rhs, np.zeros_like(fld.rhs))
    assert fld.l1_defect() == 0.0


def test_dissipation_field_special_pair_reduces_to_velocity_gradient(demo_traj):
    # Hessian of the special entropy is the identity, so summing the right
    # side over a period leaves exactly -eps |u_x|^2 (the laplacian term
    # telescopes); this pins the quadratic dissipation term bitwise-tight.
    fld = entropy_dissipation_field(demo_traj, catalog_pair("special"))
    dx = demo_traj.grid.dx
    for i, k in enumerate(range(1, demo_traj.n_snapshots - 1)):
        gs = central_gradient(demo_traj.sigmas[k], dx, "periodic")
        gb = central_gradient(demo_traj.betas[k], dx, "periodic")
        ref = -EPS * float(np.sum(gs * gs + gb * gb)) * dx
        assert float(np.sum(fld.rhs[i])) * dx == pytest.approx(ref, abs=1e-14)


def test_dissipation_field_defect_shrinks_at_scheme_order():
    defects = []
    for n in (128, 256):
        traj = short_run(n=n, t_end=0.25)
        defects.append(entropy_dissipation_field(traj, catalog_pair("special")).l1_defect())
    assert 3.0 <= defects[0] / defects[1] <= 5.0


def test_entropy_check_constant_state(const_traj):
    t_end = float(const_traj.times[-1])
    phi = bump_test_function(0.1 * t_end, 0.9 * t_end, 0.1, 0.9, label="b")
    result = entropy_inequality_check(const_traj, catalog_pair("special"), phi)
    assert abs(result.value) <= 1e-12
    assert result.passed
    dx = const_traj.grid.dx
    assert result.threshold == pytest.approx(0.01 * (np.sqrt(EPS) + dx * dx))


def test_entropy_check_gates(demo_traj):
    t_end = float(demo_traj.times[-1])
    phi = bump_test_function(0.1 * t_end, 0.9 * t_end, 0.1, 0.9, label="b")
    pair = catalog_pair("special")
    with pytest.raises(InputError):
        entropy_inequality_check(demo_traj, pair.scaled(-1.0), phi)
    flagged = SpaceTimeTestFunction(
        phi=phi.phi, phi_t=phi.phi_t, phi_x=phi.phi_x, phi_xx=phi.phi_xx,
        support=phi.support, nonnegative=False, label="signed",
    )
    with pytest.raises(InputError):
        entropy_inequality_check(demo_traj, pair, flagged)
    # the raw functional has no gates: the concave value is minus the convex one
    v = entropy_weak_functional(demo_traj, pair, phi)
    v_neg = entropy_weak_functional(demo_traj, pair.scaled(-1.0), phi)
    assert v_neg == pytest.approx(-v, rel=1e-12, abs=1e-15)


def test_convergence_metrics_identical_runs_are_zero():
    a = short_run(n=64)
    b = short_run(n=64)
    rep = convergence_metrics([a, b], kind="epsilon")
    assert rep.l1_diffs == [0.0]


def test_convergence_metrics_epsilon_sweep_is_monotone():
    g = Grid1D(0.0, 1.0, 64)
    trajs = [
        run(demo_sine(g), SolverConfig(epsilon=e, c0=1.0, t_end=0.1, output_every=10**9))
        for e in (0.04, 0.02, 0.01)
    ]
    rep = convergence_metrics(trajs, kind="epsilon")
    assert rep.monotone
    assert rep.l1_diffs[0] > rep.l1_diffs[1] > 0.0


def test_convergence_metrics_dx_refinement_order():
    trajs = [
        run(demo_sine(Grid1D(0.0, 1.0, n)), SolverConfig(epsilon=0.05, c0=1.0, t_end=0.1, output_every=10**9))
        for n in (64, 128, 256)
    ]
    rep = convergence_metrics(trajs, kind="dx")
    assert rep.observed_order >= 1.9


def test_convergence_metrics_rejects_mismatched_windows():
    a = short_run(n=64, t_end=0.05)
    b = short_run(n=64, t_end=0.1)
    with pytest.raises(InputError):
        convergence_metrics([a, b], kind="epsilon")
