"""Mollify-then-project recovery pipeline.

Smoothing with a compactly supported C^2 kernel, projection back to the
circle behind a |u_delta| >= 1/2 safeguard, the exact averaging identity
that ties the modulus loss to local oscillation, a VMO-type modulus, and
the energy curve of the projected fields along a delta = eps ladder.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .besov import lp_difference_norm
from .energy import energy
from .grid import Grid2D, ScalarField2D, VectorField2D
from .operators import _diagnostic_mask, divergence, gradient_scalar

log = logging.getLogger("aniso")


@dataclass(frozen=True)
class Mollifier:
    """Discrete weights of the radial bump ``c (1 - |x|^2)^3`` at scale delta.

    ``offsets`` holds integer node offsets (a, b), ``weights`` the matching
    nonnegative weights, renormalized so their sum is 1.0 bit-exactly
    (the center weight absorbs the final rounding).
    """

    delta: float
    offsets: tuple[tuple[int, int], ...]
    weights: np.ndarray

    @classmethod
    def build(cls, delta: float, grid: Grid2D, relax: bool = False) -> "Mollifier":
        if delta <= 0:
            raise ValueError("delta must be positive")
        if not relax and delta < 2.0 * max(grid.hx, grid.hy):
            raise ValueError("delta must be at least two grid spacings "
                             "(pass relax=True to let the kernel degenerate)")
        ra = int(math.floor(delta / grid.hx))
        rb = int(math.floor(delta / grid.hy))
        offs: list[tuple[int, int]] = []
        vals: list[float] = []
        for a in range(-ra, ra + 1):
            for b in range(-rb, rb + 1):
                r2 = (a * grid.hx) ** 2 + (b * grid.hy) ** 2
                t = r2 / (delta * delta)
                if t < 1.0:
                    offs.append((a, b))
                    vals.append((1.0 - t) ** 3)
        w = np.asarray(vals)
        w = w / math.fsum(vals)
        center = offs.index((0, 0))
        rest = math.fsum(np.delete(w, center).tolist())
        w[center] = 1.0 - rest
        return cls(delta, tuple(offs), w)

    @property
    def extent(self) -> tuple[int, int]:
        a = max(abs(o[0]) for o in self.offsets)
        b = max(abs(o[1]) for o in self.offsets)
        return a, b


def _roll2(a: np.ndarray, off: tuple[int, int]) -> np.ndarray:
    return np.roll(a, off, axis=(0, 1))


def _convolve(fields: list[np.ndarray], mask: np.ndarray, grid: Grid2D,
              mol: Mollifier) -> tuple[list[np.ndarray], np.ndarray]:
    """Weighted sum of rolled copies; valid where every contributing
    source node exists.  Wrapped garbage on non-periodic axes lands only
    inside the eroded border, which the mask removes."""
    outs = [np.zeros_like(f) for f in fields]
    for off, w in zip(mol.offsets, mol.weights):
        for f, o in zip(fields, outs):
            o += w * _roll2(f, off)
    ea, eb = mol.extent
    if mask.all():
        valid = np.ones_like(mask)
        if not grid.periodic_x1 and ea:
            valid[:ea, :] = False
            valid[-ea:, :] = False
        if not grid.periodic_x2 and eb:
            valid[:, :eb] = False
            valid[:, -eb:] = False
    else:
        valid = np.ones_like(mask)
        for off in mol.offsets:
            src = _roll2(mask, off)
            if not grid.periodic_x1 and off[0]:
                edge = slice(0, off[0]) if off[0] > 0 else slice(off[0], None)
                src[edge, :] = False
            if not grid.periodic_x2 and off[1]:
                edge = slice(0, off[1]) if off[1] > 0 else slice(off[1], None)
                src[:, edge] = False
            valid &= src
    if not valid.any():
        raise ValueError("delta too large: no node keeps a full stencil")
    for o in outs:
        o[~valid] = 0.0
    return outs, valid


def mollify(u: VectorField2D, delta: float, relax: bool = False) -> VectorField2D:
    """Convolve with the scale-delta kernel; the mask shrinks by delta."""
    mol = Mollifier.build(delta, u.grid, relax=relax)
    (m1, m2), valid = _convolve([u.u1, u.u2], u.mask, u.grid, mol)
    return VectorField2D(u.grid, m1, m2, unit_flag=False, mask=valid)


def project(u_delta: VectorField2D) -> VectorField2D:
    """Pointwise normalization; refused below the 1/2 threshold."""
    g = u_delta.grid
    mag = np.hypot(u_delta.u1, u_delta.u2)
    bad = (mag < 0.5) & u_delta.mask
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"projection refused: |u_delta| = {mag[i, j]:.6f} < 1/2 at node "
            f"({i}, {j}), x = ({g.x[i]:.6f}, {g.y[j]:.6f})")
    safe = np.where(u_delta.mask, mag, 1.0)
    return VectorField2D(g, np.where(u_delta.mask, u_delta.u1 / safe, 0.0),
                         np.where(u_delta.mask, u_delta.u2 / safe, 0.0),
                         unit_flag=True, mask=u_delta.mask)


def commutator_check(u: VectorField2D, delta: float) -> float:
    """Max residual of the exact averaging identity

        1 - |u_delta(x)|^2 = sum_y w_y |u(x - y) - u_delta(x)|^2

    with both sides sharing one weight set.  For unit fields the identity
    is algebraic, so the residual is pure rounding."""
    if not u.unit_flag:
        raise ValueError("commutator check requires a unit field")
    mol = Mollifier.build(delta, u.grid)
    (m1, m2), valid = _convolve([u.u1, u.u2], u.mask, u.grid, mol)
    lhs = 1.0 - (m1 ** 2 + m2 ** 2)
    rhs = np.zeros_like(lhs)
    for off, w in zip(mol.offsets, mol.weights):
        s1 = _roll2(u.u1, off)
        s2 = _roll2(u.u2, off)
        rhs += w * ((s1 - m1) ** 2 + (s2 - m2) ** 2)
    return float(np.max(np.abs(lhs[valid] - rhs[valid]), initial=0.0))


def div_projection(u_delta: VectorField2D) -> ScalarField2D:
    """Chain-rule divergence of the projected field,

        div v = (div u_delta)/|u_delta|
                - <u_delta, grad |u_delta|^2> / (2 |u_delta|^3).
    """
    mag = np.hypot(u_delta.u1, u_delta.u2)
    if float(np.min(np.where(u_delta.mask, mag, 1.0))) < 0.5:
        raise ValueError("chain rule needs |u_delta| >= 1/2 on the mask")
    g = u_delta.grid
    dv = divergence(u_delta)
    g1, g2 = gradient_scalar(mag ** 2, g)
    safe = np.where(u_delta.mask, mag, 1.0)
    inner = u_delta.u1 * g1 + u_delta.u2 * g2
    vals = dv.values / safe - inner / (2.0 * safe ** 3)
    return ScalarField2D(g, np.where(dv.mask, vals, 0.0), mask=dv.mask)


def vmo_modulus(u: VectorField2D, delta: float) -> float:
    """Average over grid-snapped offsets h in the delta ball of
    ``||D^h u||_{L^4}^4 / delta^2``; decay along a delta ladder is the
    usability condition for the recovery construction."""
    g = u.grid
    if delta < 2.0 * max(g.hx, g.hy):
        raise ValueError("delta must be at least two grid spacings")
    ra = int(math.floor(delta / g.hx))
    rb = int(math.floor(delta / g.hy))
    total = 0.0
    count = 0
    for a in range(-ra, ra + 1):
        for b in range(-rb, rb + 1):
            if (a * g.hx) ** 2 + (b * g.hy) ** 2 >= delta * delta:
                continue
            count += 1
            if a == 0 and b == 0:
                continue
            total += lp_difference_norm(u, (a, b), 4.0) ** 4
    return total / (count * delta * delta)


@dataclass(frozen=True)
class RecoveryPoint:
    eps: float
    delta: float
    div_part: float
    curl_part: float
    total: float
    target: float
    dirichlet_diag: float


def dirichlet_diagnostic(v: VectorField2D, delta: float) -> float:
    """``delta * int |grad v|^2`` with centered gradients."""
    g = v.grid
    g11, g12 = gradient_scalar(v.u1, g)
    g21, g22 = gradient_scalar(v.u2, g)
    m = _diagnostic_mask(v)
    w = g.hx * g.hy
    tot = np.sum((g11 ** 2 + g12 ** 2 + g21 ** 2 + g22 ** 2)[m])
    return float(delta * w * tot)


def recovery_energy_curve(u: VectorField2D, eps_ladder,
                          check_vmo: bool = True) -> list[RecoveryPoint]:
    """Energies of the projected mollifications v_{delta = eps}.

    Deltas below two grid spacings are allowed here: the kernel then
    degenerates toward the identity, which only tightens the comparison
    against the target divergence integral."""
    g = u.grid
    if check_vmo:
        d1 = 4.0 * max(g.hx, g.hy)
        m1, m2 = vmo_modulus(u, 2.0 * d1), vmo_modulus(u, d1)
        if m2 > m1:
            log.warning("vmo modulus not decaying (%.3e -> %.3e); "
                        "recovery may fail", m1, m2)
    dv = divergence(u)
    w = g.hx * g.hy
    target = float(w * np.sum(dv.values[dv.mask] ** 2))
    out = []
    for eps in eps_ladder:
        delta = float(eps)
        v = project(mollify(u, delta, relax=True))
        bd = energy(v, eps)
        out.append(RecoveryPoint(float(eps), delta, bd.div_part, bd.curl_part,
                                 bd.total, target, dirichlet_diagnostic(v, delta)))
    return out
