"""Acceptance gate: one test per contracted criterion.

Each test computes the criterion quantity at its stated tolerance and
reports a single ``criterion NN: PASS/FAIL`` line through the
``criterion_record`` fixture (printed in the terminal summary).
"""

import math
import time

import numpy as np

from aniso.besov import (besov_scan, default_margin, dyadic_offsets,
                         regularity_ratio, scaling_exponent)
from aniso.exact1d import minimal_energy_1d, minimizer_profile_1d
from aniso.grid import Grid2D, PhaseField2D, VectorField2D, phase_to_vector
from aniso.kinetic import (SIN2, AngularGrid, KineticWeight, PHI0,
                           compensation_residual, coercivity_scan,
                           coercivity_scan_brute, entropy_production_residual)
from aniso.minimize import OptimizerConfig, minimize_energy_1d
from aniso.recovery import commutator_check, recovery_energy_curve
from aniso.singular import (circle_loop, jacobian_total, make_jump,
                            make_vortex, winding_number)
from aniso.thinfilm import (ThinFilmParams, defect_form, minimize_thinfilm,
                            seeded_start, symmetry_defect_bound, thinfilm_grid)

PHI_PM = (0.0, math.pi / 2)


def _seeded_unit(grid: Grid2D, seed: int, scale: float = 0.4) -> VectorField2D:
    rng = np.random.default_rng(seed)
    xx, yy = grid.meshgrid()
    phi = sum(rng.normal(0.0, scale) * np.sin((k + 1) * np.pi * xx)
              * np.cos((k + 1) * np.pi * yy) for k in range(3))
    return phase_to_vector(PhaseField2D(grid, phi))


def test_criterion_01_exact_1d_closed_form(criterion_record):
    t0 = time.time()
    cfg = OptimizerConfig(max_iters=30000, grad_tol=1e-7)
    x = np.linspace(-1.0, 1.0, 512)
    rels = {}
    for eps in (1.0, 0.1, 0.01):
        _, rep = minimize_energy_1d(math.pi / 4 * (x + 1.0), eps, cfg=cfg)
        target = minimal_energy_1d(eps, *PHI_PM).e_min
        if eps == 1.0:
            # isotropic target is pi^2/8 in closed form
            assert abs(target - math.pi ** 2 / 8) < 1e-14
            target = math.pi ** 2 / 8
        rels[eps] = abs(rep.breakdown.total - target) / target
    elapsed = time.time() - t0
    ok = all(r < 1e-3 for r in rels.values()) and elapsed < 5.0
    criterion_record(1, ok,
                     "1D minimization vs closed form, rel err "
                     + ", ".join(f"eps={e}: {r:.1e}" for e, r in rels.items())
                     + f" (tol 1e-3), {elapsed:.1f}s < 5s")


def test_criterion_02_thinfilm_symmetry(criterion_record):
    t0 = time.time()
    res = minimize_thinfilm(ThinFilmParams(0.1, 0.1), thinfilm_grid(64),
                            OptimizerConfig(max_iters=40000, grad_tol=1e-7),
                            seed=0)
    elapsed = time.time() - t0
    ok = res.rel_err < 0.01 and res.x2_var < 1e-8 and elapsed < 30.0
    criterion_record(2, ok,
                     f"64x64 at (eps, aspect)=(0.1, 0.1): energy rel err "
                     f"{res.rel_err:.1e} < 1e-2, x2 variation "
                     f"{res.x2_var:.1e} < 1e-8, {elapsed:.1f}s < 30s")


def test_criterion_03_defect_bound_ensemble(criterion_record):
    params = ThinFilmParams(0.25, 1.0)
    g = thinfilm_grid(192)
    worst = math.inf
    for seed in range(50):
        db = symmetry_defect_bound(
            seeded_start(g, params, seed, amplitude=0.2), params)
        worst = min(worst, db.margin + 1e-4 * (1.0 + abs(db.lhs)))
    cert = 0.0
    for eps in (0.1, 0.25, 0.8):
        q = defect_form(eps, np.linspace(0.0, 2.0 * math.pi, 360))
        cert = max(cert,
                   float(np.max(np.abs(np.linalg.det(q) - 4.0 * eps))),
                   float(np.max(np.abs(np.trace(q, axis1=-2, axis2=-1)
                                       - 2.0 * (1.0 + eps)))))
    ok = worst >= 0.0 and cert <= 1e-12
    criterion_record(3, ok,
                     f"50 seeded fields: min margin slack {worst:.2e} >= 0; "
                     f"form certificate max dev {cert:.1e} <= 1e-12")


def test_criterion_04_singular_scaling_exponents(criterion_record):
    g = Grid2D.off_origin(1024, 1024)
    offs = dyadic_offsets(g, (1, 0), range(2, 7))
    t0 = time.time()
    fit_j = scaling_exponent(make_jump(g, 0.0), 3.0, offs)
    t_jump = time.time() - t0
    t0 = time.time()
    fit_v = scaling_exponent(make_vortex(g), 3.0, offs)
    t_vortex = time.time() - t0
    ok = (fit_j.n_scales >= 5 and fit_v.n_scales >= 5
          and abs(fit_j.alpha - 1.0 / 3.0) <= 0.03
          and abs(fit_v.alpha - 2.0 / 3.0) <= 0.04
          and t_jump < 120.0 and t_vortex < 120.0)
    criterion_record(4, ok,
                     f"1024^2, {fit_j.n_scales} dyadic scales: jump alpha "
                     f"{fit_j.alpha:.4f} (1/3 +- 0.03), vortex alpha "
                     f"{fit_v.alpha:.4f} (2/3 +- 0.04); "
                     f"{t_jump:.0f}s/{t_vortex:.0f}s < 120s each")


def test_criterion_05_jacobian_winding(criterion_record):
    g = Grid2D.off_origin(256, 256)
    loop = circle_loop(g, 0.5, 256)
    v = make_vortex(g)
    wind = winding_number(v, loop)
    mass = jacobian_total(v, loop)
    xx, yy = g.meshgrid()
    smooth = phase_to_vector(PhaseField2D(g, 0.5 * np.sin(xx) * np.cos(yy)))
    smooth_mass = abs(jacobian_total(smooth, loop))
    ok = (wind == 1 and abs(mass - math.pi) / math.pi <= 0.02
          and smooth_mass < 1e-3)
    criterion_record(5, ok,
                     f"vortex winding {wind} == 1, mass {mass:.5f} vs pi "
                     f"(rel {abs(mass - math.pi) / math.pi:.1e} <= 2e-2); "
                     f"smooth mass {smooth_mass:.1e} < 1e-3")


def test_criterion_06_commutator_identity(criterion_record):
    g = Grid2D.off_origin(128, 128)
    c = VectorField2D(g, np.full(g.shape, 1.0), np.zeros(g.shape),
                      unit_flag=True)
    worst = commutator_check(c, 0.1)
    worst = max(worst, commutator_check(make_vortex(g), 0.09))
    for seed in range(20):
        worst = max(worst, commutator_check(_seeded_unit(g, seed), 0.09))
    ok = worst <= 1e-12
    criterion_record(6, ok,
                     f"constant + vortex + 20 seeded unit fields: max "
                     f"residual {worst:.1e} <= 1e-12")


def test_criterion_07_entropy_chain_rule(criterion_record):
    ang = AngularGrid(256)
    g_samples = np.cos(2.0 * ang.nodes)
    residuals = []
    for n in (32, 64, 128, 256):
        grid = Grid2D.off_origin(n, n)
        xx, yy = grid.meshgrid()
        phase = PhaseField2D(grid, np.sin(xx) * np.cos(yy))
        residuals.append(entropy_production_residual(phase, g_samples, ang))
    factors = [a / b for a, b in zip(residuals, residuals[1:])]
    ok = all(3.0 <= f <= 5.0 for f in factors)
    criterion_record(7, ok,
                     "chain-rule residual refinement factors "
                     + ", ".join(f"{f:.2f}" for f in factors)
                     + " all in [3, 5] over three 2x refinements")


def test_criterion_08_compensation_identity(criterion_record):
    levels = ((24, 2), (36, 3), (54, 4), (81, 6))
    vals = []
    for n, tau in levels:
        grid = Grid2D.off_origin(n, n)
        xx, yy = grid.meshgrid()
        phase = PhaseField2D(grid, np.sin(xx) * np.cos(yy))
        vals.append(compensation_residual(phase, SIN2, tau_nodes=tau,
                                          m_max=201))
    gc = Grid2D.off_origin(32, 32)
    const_res = compensation_residual(PhaseField2D(gc, np.full(gc.shape, 0.7)),
                                      SIN2, tau_nodes=3, m_max=201)
    monotone = all(a > b for a, b in zip(vals, vals[1:]))
    ok = monotone and const_res <= 1e-12
    criterion_record(8, ok,
                     "weak residual "
                     + " > ".join(f"{v:.2e}" for v in vals)
                     + f" over three simultaneous refinements; constant "
                     f"field {const_res:.1e} <= 1e-12")


def test_criterion_09_coercivity_scan(criterion_record):
    scan = coercivity_scan(n_angles=360)
    positive = bool(np.all(scan.ratio > 0.0)) and scan.c_min > 0.0
    fft_weight = KineticWeight("phi0_fft", PHI0.fn, None, None)
    stable = {}
    for n_s in (256, 512):
        stable[n_s] = coercivity_scan(weight=fft_weight, n_angles=360,
                                      angular=AngularGrid(n_s)).c_min
    digits_match = f"{stable[256]:.3g}" == f"{stable[512]:.3g}"
    # the tensor-quadrature route converges to the same constant
    brute_err = [abs(coercivity_scan_brute(
        n_angles=360, angular=AngularGrid(n_s)).ratio[179] - scan.c_min)
        for n_s in (256, 512)]
    ok = positive and digits_match and brute_err[0] > brute_err[1]
    criterion_record(9, ok,
                     f"360-angle scan min {scan.c_min:.6f} > 0 at gap "
                     f"{scan.gap_argmin:.4f}; spectral constant "
                     f"{stable[256]:.6f} vs {stable[512]:.6f} "
                     f"(3 digits: {f'{stable[512]:.3g}'}) across "
                     f"n_s in {{256, 512}}")


def test_criterion_10_recovery_energy(criterion_record):
    t0 = time.time()
    g = Grid2D.off_origin(1024, 1024)
    prof = minimal_energy_1d(0.25, *PHI_PM)
    column = minimizer_profile_1d(prof, g.x)
    u = phase_to_vector(
        PhaseField2D(g, np.repeat(column[:, None], g.ny, axis=1)))
    curve = recovery_energy_curve(u, [0.1, 0.01, 0.001])
    elapsed = time.time() - t0
    last = curve[-1]
    rel = abs(last.total - last.target) / last.target
    curl_terms = [pt.eps * pt.curl_part for pt in curve]
    diags = [pt.dirichlet_diag for pt in curve]
    ok = (rel <= 0.05
          and all(a > b for a, b in zip(curl_terms, curl_terms[1:]))
          and all(a > b for a, b in zip(diags, diags[1:]))
          and elapsed < 600.0)
    criterion_record(10, ok,
                     f"1024^2 profile field: E(v) vs div target rel "
                     f"{rel:.1e} <= 5e-2 at eps=1e-3; eps*curl "
                     f"{curl_terms[0]:.2e}->{curl_terms[-1]:.2e} and "
                     f"delta*Dirichlet {diags[0]:.2e}->{diags[-1]:.2e} "
                     f"both decreasing; {elapsed:.0f}s < 600s")


def test_criterion_11_regularity_uniformity(criterion_record):
    g = thinfilm_grid(64)
    cfg = OptimizerConfig(max_iters=40000, grad_tol=1e-6)
    offs = dyadic_offsets(g, (1, 0), range(2, 6))
    margin = default_margin(g, offs)
    ratios = []
    for eps in (1.0, 0.1, 0.01, 1e-3):
        params = ThinFilmParams(eps, 1.0)
        res = minimize_thinfilm(params, g, cfg,
                                start=seeded_start(g, params, 0, amplitude=0.3))
        ratios.append(regularity_ratio(phase_to_vector(res.field), eps,
                                       margin, offs))
    band = max(ratios) / min(ratios)

    gj = Grid2D.off_origin(1024, 1024)
    rows = besov_scan(make_jump(gj, 0.0), 0.5, 3.0,
                      dyadic_offsets(gj, (1, 0), range(2, 10)))
    q = [row[5] for row in rows]
    windows = [q[i + 4] / q[i] for i in range(len(q) - 4)]
    ok = band < 3.0 and len(windows) == 4 and all(w >= 1.5 for w in windows)
    criterion_record(11, ok,
                     f"minimizer ratio band {band:.3f} < 3 over eps in "
                     f"{{1, 0.1, 0.01, 1e-3}}; jump quotient growth "
                     + ", ".join(f"{w:.3f}" for w in windows)
                     + " >= 1.5 across each of four dyadic windows")
