"""Mollification, unit-sphere projection, and the recovery energy curve."""

import logging
import math

import numpy as np
import pytest

from aniso.grid import Grid2D, PhaseField2D, VectorField2D, phase_to_vector
from aniso.operators import divergence
from aniso.recovery import (Mollifier, commutator_check, div_projection,
                            dirichlet_diagnostic, mollify, project,
                            recovery_energy_curve, vmo_modulus)
from aniso.singular import make_jump, make_vortex


def _grid(n: int = 128) -> Grid2D:
    return Grid2D.off_origin(n, n)


def _smooth_unit(grid: Grid2D, seed: int = 0, scale: float = 0.4):
    rng = np.random.default_rng(seed)
    xx, yy = grid.meshgrid()
    phi = sum(rng.normal(0.0, scale) * np.sin((k + 1) * np.pi * xx)
              * np.cos((k + 1) * np.pi * yy) for k in range(3))
    return phase_to_vector(PhaseField2D(grid, phi))


def _single_mode(grid: Grid2D):
    xx, yy = grid.meshgrid()
    return phase_to_vector(
        PhaseField2D(grid, 0.4 * np.sin(np.pi * xx) * np.cos(np.pi * yy)))


def _l2(grid: Grid2D, f1, f2, mask) -> float:
    return math.sqrt(grid.hx * grid.hy * float(np.sum((f1 ** 2 + f2 ** 2)[mask])))


# ---------------------------------------------------------------- kernel

def test_mollifier_weights_normalized_and_supported():
    g = _grid()
    mol = Mollifier.build(0.1, g)
    assert math.fsum(mol.weights) == 1.0
    assert all(w >= 0.0 for w in mol.weights)
    for (a, b) in mol.offsets:
        assert (a * g.hx) ** 2 + (b * g.hy) ** 2 < 0.1 ** 2


def test_mollify_rejects_subgrid_delta_unless_relaxed():
    g = _grid()
    u = _smooth_unit(g)
    with pytest.raises(ValueError, match="two grid spacings"):
        mollify(u, 0.5 * g.hx)
    tiny = mollify(u, 0.5 * g.hx, relax=True)
    # a kernel narrower than one spacing collapses to the identity
    assert np.array_equal(tiny.u1, u.u1)
    assert np.array_equal(tiny.u2, u.u2)


def test_mollify_delta_too_large_raises():
    g = _grid(32)
    u = _smooth_unit(g)
    with pytest.raises(ValueError, match="no node keeps a full stencil"):
        mollify(u, 5.0)


def test_mollify_preserves_constants_on_mask():
    g = _grid()
    c = VectorField2D(g, np.full(g.shape, 0.6), np.full(g.shape, 0.8))
    md = mollify(c, 0.15)
    assert md.mask.any()
    assert np.max(np.abs(md.u1[md.mask] - 0.6)) <= 1e-14
    assert np.max(np.abs(md.u2[md.mask] - 0.8)) <= 1e-14


def test_mollify_second_order_for_smooth_fields():
    g = _grid()
    xx, yy = g.meshgrid()
    u1 = np.sin(np.pi * xx) * np.cos(np.pi * yy)
    u2 = np.cos(np.pi * xx) * np.sin(np.pi * yy)
    u = VectorField2D(g, u1, u2, unit_flag=False)
    errs = []
    for d in (0.2, 0.1, 0.05):
        md = mollify(u, d)
        errs.append(np.max(np.hypot(md.u1 - u1, md.u2 - u2)[md.mask]))
    for big, small in zip(errs, errs[1:]):
        assert 3.2 < big / small < 4.8  # quadratic in the kernel width


def test_mollify_commutes_with_divergence():
    g = _grid(96)
    u = _smooth_unit(g, seed=3)
    delta = 0.12
    both = divergence(mollify(u, delta))
    dv = divergence(u)
    swapped = mollify(VectorField2D(g, dv.values, np.zeros(g.shape),
                                    mask=dv.mask), delta)
    ex, ey = Mollifier.build(delta, g).extent
    inner = np.zeros(g.shape, bool)
    inner[ex + 1:-(ex + 1), ey + 1:-(ey + 1)] = True
    sel = inner & both.mask & swapped.mask
    assert sel.any()
    # same linear map either way; only summation order differs
    assert np.max(np.abs(both.values[sel] - swapped.u1[sel])) <= 1e-12


# ---------------------------------------------------------------- identity

def test_commutator_identity_constant_and_vortex():
    g = _grid()
    c = VectorField2D(g, np.full(g.shape, 1.0), np.zeros(g.shape),
                      unit_flag=True)
    assert commutator_check(c, 0.1) <= 1e-14
    assert commutator_check(make_vortex(g), 0.09) <= 1e-12


def test_commutator_identity_seeded_fields():
    g = _grid()
    worst = max(commutator_check(_smooth_unit(g, seed=s), 0.09)
                for s in range(5))
    assert worst <= 1e-12


def test_commutator_requires_unit_field():
    g = _grid(32)
    u = VectorField2D(g, np.full(g.shape, 2.0), np.zeros(g.shape),
                      unit_flag=False)
    with pytest.raises(ValueError, match="unit field"):
        commutator_check(u, 0.3)


# ---------------------------------------------------------------- projection

def test_projection_returns_unit_field():
    g = _grid()
    md = mollify(_smooth_unit(g, seed=1), 0.12)
    v = project(md)
    assert v.unit_flag
    assert np.array_equal(v.mask, md.mask)
    assert np.max(np.abs(np.hypot(v.u1, v.u2)[v.mask] - 1.0)) <= 1e-14


def test_projection_refusal_names_the_node():
    g = _grid()
    jd = mollify(make_jump(g, 0.0), 0.2)
    with pytest.raises(ValueError, match=r"projection refused.*at node"):
        project(jd)


def test_projection_is_lipschitz_from_the_sphere():
    # normalization at most doubles the distance to the original unit field
    g = _grid()
    for s in range(6):
        u = _smooth_unit(g, seed=s)
        md = mollify(u, 0.12)
        v = project(md)
        m = v.mask
        near = _l2(g, md.u1 - u.u1, md.u2 - u.u2, m)
        far = _l2(g, v.u1 - u.u1, v.u2 - u.u2, m)
        assert far <= 2.0 * near


# ---------------------------------------------------------------- chain rule

def test_div_projection_matches_direct_divergence():
    g = _grid()
    u = _single_mode(g)
    for d in (0.2, 0.1):
        md = mollify(u, d)
        chain = div_projection(md)
        direct = divergence(project(md))
        m = chain.mask & direct.mask
        assert np.max(np.abs(chain.values[m] - direct.values[m])) <= 1e-4


def test_div_projection_threshold_guard():
    g = _grid()
    jd = mollify(make_jump(g, 0.0), 0.2)
    with pytest.raises(ValueError, match="1/2 on the mask"):
        div_projection(jd)


def test_projected_divergence_converges_quadratically():
    g = _grid()
    u = _single_mode(g)
    du = divergence(u)
    errs = []
    for d in (0.2, 0.1, 0.05):
        direct = divergence(project(mollify(u, d)))
        m = direct.mask & du.mask
        errs.append(math.sqrt(g.hx * g.hy * float(
            np.sum((direct.values[m] - du.values[m]) ** 2))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-3
    for big, small in zip(errs, errs[1:]):
        assert big / small > 3.0


# ---------------------------------------------------------------- vmo

def test_vmo_modulus_decays_for_lipschitz_fields():
    g = _grid()
    u = _smooth_unit(g, seed=0)
    ladder = [vmo_modulus(u, d) for d in (0.2, 0.1, 0.05)]
    assert ladder[0] > ladder[1] > ladder[2]
    with pytest.raises(ValueError, match="two grid spacings"):
        vmo_modulus(u, 0.5 * g.hx)


def test_vmo_modulus_does_not_decay_across_a_jump():
    g = _grid()
    j = make_jump(g, 0.0)
    assert vmo_modulus(j, 0.1) > vmo_modulus(j, 0.2)


def test_vmo_modulus_bounded_band_for_vortex():
    g = _grid(256)
    v = make_vortex(g)
    band = [vmo_modulus(v, d) for d in (0.2, 0.1)]
    assert max(band) / min(band) < 2.0


# ---------------------------------------------------------------- curve

def test_recovery_curve_constant_field_is_flat_zero():
    g = _grid()
    c = VectorField2D(g, np.full(g.shape, 1.0), np.zeros(g.shape),
                      unit_flag=True)
    for pt in recovery_energy_curve(c, [0.04, 0.02, 0.01]):
        assert pt.total == 0.0
        assert pt.target == 0.0
        assert pt.dirichlet_diag == 0.0


def test_recovery_curve_smooth_field_diagnostics():
    g = _grid()
    u = _single_mode(g)
    curve = recovery_energy_curve(u, [0.1, 0.05, 0.025])
    assert [pt.delta for pt in curve] == [0.1, 0.05, 0.025]
    target = curve[0].target
    assert target > 0.0
    diags = [pt.dirichlet_diag for pt in curve]
    assert diags[0] > diags[1] > diags[2]
    for pt in curve:
        assert abs(pt.total - pt.target) <= 0.1 * pt.target


def test_recovery_curve_jump_warns_then_refuses(caplog):
    g = _grid()
    j = make_jump(g, 0.0)
    with caplog.at_level(logging.WARNING, logger="aniso"):
        with pytest.raises(ValueError, match="projection refused"):
            recovery_energy_curve(j, [0.2])
    assert any("vmo modulus not decaying" in rec.getMessage()
               for rec in caplog.records)


def test_dirichlet_diagnostic_scales_linearly_in_delta():
    g = _grid(64)
    u = _smooth_unit(g, seed=4)
    a = dirichlet_diagnostic(u, 0.2)
    b = dirichlet_diagnostic(u, 0.1)
    assert a == pytest.approx(2.0 * b, rel=1e-12)
