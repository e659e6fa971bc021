import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from aniso.grid import Grid2D, PhaseField2D
from aniso.kinetic import (PHI0, SIN2, AngularGrid, KineticWeight,
                           ThetaEvaluator, WindowIntegrator,
                           coercivity_scan, coercivity_scan_brute,
                           compensation_residual, delta_gap, delta_quantity,
                           entropy_phi_g, entropy_production_residual,
                           phi0_modes, polynomial_bump, validate_weight)

ANG = AngularGrid(256)


def test_angular_grid_guards():
    with pytest.raises(ValueError):
        AngularGrid(60)
    with pytest.raises(ValueError):
        AngularGrid(130)  # not divisible by 4
    assert AngularGrid(64).h == pytest.approx(2 * math.pi / 64)


def test_builtin_weights_are_odd_and_periodic():
    validate_weight(PHI0, ANG)
    validate_weight(SIN2, ANG)
    bad = KineticWeight("even", np.cos)
    with pytest.raises(ValueError, match="oddness"):
        validate_weight(bad, ANG)


@pytest.mark.parametrize("m", [1, 3, 5, 7, 9])
def test_phi0_kernel_coefficients_against_quadrature(m):
    # K = phi0(s) sin s with phi0 = sign(sin 2s); oracle: direct Fourier
    # integrals with breakpoints at the sign flips
    def kernel(s):
        return np.sign(np.sin(2 * s)) * np.sin(s)

    re, _ = quad(lambda s: kernel(s) * math.cos(m * s), 0, 2 * math.pi,
                 points=[0, math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi],
                 limit=200)
    ms, khat = PHI0.khat(m + 1)
    got = khat[list(ms).index(m)]
    assert np.real(got) == pytest.approx(re / (2 * math.pi), abs=1e-12)


def test_phi0_modes_match_quadrature():
    modes = phi0_modes(20)
    for m, c in modes.items():
        if abs(m) > 10:
            continue
        re, _ = quad(lambda s: np.sign(np.sin(2 * s)) * math.cos(m * s),
                     0, 2 * math.pi,
                     points=[0, math.pi / 2, math.pi, 3 * math.pi / 2,
                             2 * math.pi], limit=200)
        im, _ = quad(lambda s: -np.sign(np.sin(2 * s)) * math.sin(m * s),
                     0, 2 * math.pi,
                     points=[0, math.pi / 2, math.pi, 3 * math.pi / 2,
                             2 * math.pi], limit=200)
        assert c == pytest.approx((re + 1j * im) / (2 * math.pi), abs=1e-12)


def test_delta_closed_forms_phi0():
    # antipodal pair: 4 pi - 8; quarter turn: 2 pi - 4
    assert delta_gap(np.pi, PHI0) == pytest.approx(4 * math.pi - 8, rel=1e-12)
    assert delta_gap(np.pi / 2, PHI0) == pytest.approx(2 * math.pi - 4,
                                                       rel=1e-12)
    assert delta_gap(0.0, PHI0) == pytest.approx(0.0, abs=1e-15)


def test_delta_closed_form_sin2():
    g = np.linspace(0.0, 2 * np.pi, 17)
    want = 2.0 * (1 - np.cos(g)) - (2.0 / 9.0) * (1 - np.cos(3 * g))
    np.testing.assert_allclose(delta_gap(g, SIN2), want, atol=1e-13)


def test_delta_gap_fft_fallback_matches_exact_table():
    plain = KineticWeight("sin2-raw", lambda s: np.sin(2 * s))
    g = np.linspace(0.1, 2 * np.pi - 0.1, 9)
    np.testing.assert_allclose(delta_gap(g, plain, angular=AngularGrid(1024)),
                               delta_gap(g, SIN2), atol=1e-9)


def test_brute_quadrature_converges_to_gap_form():
    want = 4 * math.pi - 8
    errs = []
    for n_s in (128, 256, 512):
        got = delta_quantity(0.3, 0.3 + math.pi, PHI0, AngularGrid(n_s))
        errs.append(abs(got - want))
    assert errs[2] < errs[0] / 2.5  # first-order in the angular spacing


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
       st.integers(-128, 128))
@settings(max_examples=40, deadline=None)
def test_delta_quantity_symmetry_and_shift(t1, t2, k):
    # rotation invariance is exact for shifts on the quadrature lattice;
    # off-lattice shifts move indicator edges across quadrature nodes
    a = delta_quantity(t1, t2, SIN2)
    assert a == pytest.approx(delta_quantity(t2, t1, SIN2), abs=1e-10)
    c = k * AngularGrid().h
    assert a == pytest.approx(delta_quantity(t1 + c, t2 + c, SIN2), abs=1e-10)


def test_coercivity_scan_phi0():
    scan = coercivity_scan(PHI0, 360)
    assert np.all(scan.delta > 0) and np.all(scan.ratio > 0)
    # minimal ratio sits at the antipodal gap: (4 pi - 8) / 8 = pi/2 - 1
    assert scan.c_min == pytest.approx(math.pi / 2 - 1, rel=1e-12)
    assert scan.gap_argmin == pytest.approx(math.pi, rel=1e-12)
    # small-gap limit of the ratio is 2/3
    assert scan.ratio[0] == pytest.approx(2.0 / 3.0, rel=1e-3)


def test_coercivity_scan_stable_in_reported_digits():
    a = coercivity_scan(PHI0, 360, m_max=20001).c_min
    b = coercivity_scan(PHI0, 360, m_max=80001).c_min
    assert round(a, 3) == round(b, 3)
    assert a == pytest.approx(b, rel=1e-6)


def test_coercivity_brute_positive_and_convergent():
    exact = coercivity_scan(PHI0, 360)
    errs = []
    for n_s in (256, 512):
        brute = coercivity_scan_brute(PHI0, 360, AngularGrid(n_s))
        assert brute.c_min > 0
        j = np.argmin(np.abs(brute.gaps - math.pi))
        errs.append(abs(brute.ratio[j] - exact.ratio[j]))
    assert errs[1] < 0.7 * errs[0]


def test_window_integrator_against_dense_quadrature():
    # oracle: dense trapezoid of the same periodic linear interpolant
    ang = AngularGrid(64)
    rng = np.random.default_rng(11)
    samples = rng.standard_normal(ang.n_s)
    win = WindowIntegrator(samples, ang)
    nodes = np.concatenate([ang.nodes, [2 * np.pi]])
    vals = np.concatenate([samples, [samples[0]]])

    def lg(t):
        return np.interp(np.mod(t, 2 * np.pi), nodes, vals)

    for theta in (0.3, 2.0, 4.9):
        t = np.linspace(theta - np.pi / 2, theta + np.pi / 2, 400_001)
        want = np.trapezoid(lg(t) * np.exp(1j * t), t)
        got = win.window(np.array(theta))
        assert abs(got - want) < 1e-9


def test_window_integrator_periodicity():
    ang = AngularGrid(64)
    rng = np.random.default_rng(3)
    win = WindowIntegrator(rng.standard_normal(ang.n_s), ang)
    th = np.array([0.0, 1.1, 5.0])
    np.testing.assert_allclose(win.window(th + 2 * np.pi), win.window(th),
                               atol=1e-12)


def test_entropy_unit_weight_reproduces_field():
    # g = 1: window integral is 2 e^{i theta}, chain factor 2
    ang = AngularGrid(128)
    phi, lam = entropy_phi_g(np.ones(ang.n_s), 0.7, ang)
    assert phi[0] == pytest.approx(2 * math.cos(0.7), abs=1e-12)
    assert phi[1] == pytest.approx(2 * math.sin(0.7), abs=1e-12)
    assert lam == pytest.approx(2.0, abs=1e-12)


def test_entropy_residual_unit_weight_is_spatial_zero():
    ang = AngularGrid(128)
    g = Grid2D(48, 48)
    xx, yy = g.meshgrid()
    phase = PhaseField2D(g, np.sin(np.pi * xx) * np.cos(np.pi * yy))
    res = entropy_production_residual(phase, np.ones(ang.n_s), ang)
    assert res < 1e-12


def test_entropy_residual_second_order_in_space():
    ang = AngularGrid(256)
    gs = np.cos(2 * ang.nodes)
    res = []
    for n in (64, 128):
        g = Grid2D(n, n)
        xx, yy = g.meshgrid()
        phase = PhaseField2D(g, np.sin(xx) * np.cos(yy))
        res.append(entropy_production_residual(phase, gs, ang))
    assert 3.0 < res[0] / res[1] < 5.0


def test_polynomial_bump_support_and_gradient():
    zeta = polynomial_bump(0.5, 0.8)
    x = np.array([-0.6, -0.5, 0.0, 0.49, 0.5, 0.7])
    y = np.zeros_like(x)
    v = zeta.value(x, y)
    assert v[0] == 0.0 and v[1] == 0.0 and v[4] == 0.0 and v[5] == 0.0
    assert v[2] == 1.0
    g1, _ = zeta.grad(np.array([0.2]), np.array([0.0]))
    step = 1e-6
    fd = (zeta.value(np.array([0.2 + step]), y[:1])
          - zeta.value(np.array([0.2 - step]), y[:1])) / (2 * step)
    assert g1[0] == pytest.approx(fd[0], rel=1e-6)


def test_compensation_residual_constant_is_exact():
    g = Grid2D(40, 40)
    phase = PhaseField2D(g, np.full(g.shape, 0.7))
    assert compensation_residual(phase, PHI0, tau_nodes=2) < 1e-12


def test_compensation_residual_refines_monotonically():
    vals = []
    for n in (32, 48):
        g = Grid2D(n, n)
        xx, yy = g.meshgrid()
        phase = PhaseField2D(g, 0.8 * np.sin(np.pi * xx) * np.sin(np.pi * yy))
        vals.append(compensation_residual(phase, SIN2, tau_nodes=2,
                                          m_max=64))
    assert vals[1] < vals[0]


def test_compensation_rejects_support_touching_boundary():
    g = Grid2D(32, 32)
    xx, yy = g.meshgrid()
    phase = PhaseField2D(g, 0.1 * xx * yy)
    wide = polynomial_bump(1.0, 0.5)  # reaches the x1 boundary
    with pytest.raises(ValueError, match="support"):
        compensation_residual(phase, SIN2, tau_nodes=2, zeta=wide, m_max=64)


def test_theta_evaluator_matches_direct_sum():
    g = Grid2D(24, 24)
    xx, yy = g.meshgrid()
    phase = PhaseField2D(g, 0.4 * xx + 0.9 * yy)
    ev = ThetaEvaluator.from_phase(phase)
    fn = lambda s: np.sin(3 * s)
    got = ev.integrate(fn)
    from aniso.operators import divergence
    from aniso.grid import phase_to_vector
    divu = divergence(phase_to_vector(phase)).values
    th = phase.phi
    want = float(np.sum((fn(th + np.pi / 2) + fn(th - np.pi / 2)) * divu)
                 * g.hx * g.hy)
    assert got == pytest.approx(want, rel=1e-12)
