"""Closed-form one-dimensional theory.

Everything here revolves around the strictly increasing function

    F_eps(t) = integral_0^t sqrt(sin^2 s + eps cos^2 s) ds,

whose inverse transports a constant-slope profile into the exact 1D
minimizer, and whose endpoint gap squares to the minimal energy
``(F_eps(phi+) - F_eps(phi-))^2 / (b - a)``.  F is evaluated through
incomplete Legendre integrals (parameter ``m = 1 - eps``, valid for
eps > 1 as well); eps = 0 uses elementary closed forms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ellipe, ellipeinc


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if eps < 0 or not np.isfinite(eps):
        raise ValueError("eps must be a finite nonnegative real")
    return eps


def F_eps(t, eps: float):
    """Antiderivative of ``sqrt(sin^2 + eps cos^2)`` vanishing at 0 (odd in t)."""
    eps = _check_eps(eps)
    t = np.asarray(t, dtype=float)
    sign = np.sign(t)
    ta = np.abs(t)
    ell = np.floor(ta / np.pi)
    r = ta - ell * np.pi
    if eps == 0.0:
        out = 2.0 * ell + (1.0 - np.cos(r))
    else:
        m = 1.0 - eps
        em = ellipe(m)
        # int_0^r sqrt(1 - m cos^2) = E(m) - E(pi/2 - r | m)
        out = 2.0 * ell * em + em - ellipeinc(np.pi / 2.0 - r, m)
    out = sign * out
    return float(out) if out.ndim == 0 else out


def F_eps_period(eps: float) -> float:
    """F_eps(pi), the per-period increment."""
    eps = _check_eps(eps)
    return 2.0 if eps == 0.0 else 2.0 * float(ellipe(1.0 - eps))


def _inv_scalar(y: float, eps: float, f_pi: float) -> float:
    sign = 1.0
    if y < 0:
        sign, y = -1.0, -y
    ell = math.floor(y / f_pi)
    r = y - ell * f_pi
    if r >= f_pi:  # floating floor edge
        ell += 1
        r -= f_pi
    if eps == 0.0:
        base = math.acos(min(1.0, max(-1.0, 1.0 - r)))
    elif r == 0.0:
        base = 0.0
    else:
        base = brentq(lambda tt: F_eps(tt, eps) - r, 0.0, np.pi, xtol=1e-14)
    return sign * (ell * np.pi + base)


def F_eps_inverse(y, eps: float):
    """Inverse of F_eps; exact branch formula at eps = 0, bracketed root otherwise.

    The period identity F(t + pi) = F(t) + F(pi) reduces the root-find
    to [0, pi], where F is a monotone bijection onto [0, F(pi)].
    """
    eps = _check_eps(eps)
    f_pi = F_eps_period(eps)
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        return _inv_scalar(float(y), eps, f_pi)
    out = np.array([_inv_scalar(v, eps, f_pi) for v in y.ravel()])
    return out.reshape(y.shape)


@dataclass(frozen=True)
class Profile1D:
    """Exact minimizer description for boundary phases on an interval."""

    eps: float
    phi_minus: float
    phi_plus: float
    tau: int
    e_min: float
    interval: tuple[float, float] = (-1.0, 1.0)


def minimal_energy_1d(eps: float, phi_minus: float, phi_plus: float,
                      interval: tuple[float, float] = (-1.0, 1.0)) -> Profile1D:
    """Minimal 1D energy ``(F(phi+) - F(phi-))^2 / (b - a)``."""
    eps = _check_eps(eps)
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must satisfy b > a")
    df = F_eps(phi_plus, eps) - F_eps(phi_minus, eps)
    e_min = df * df / (b - a)
    tau = int(np.sign(phi_plus - phi_minus))
    return Profile1D(eps, float(phi_minus), float(phi_plus), tau, float(e_min), (a, b))


def minimizer_profile_1d(profile: Profile1D, x: np.ndarray) -> np.ndarray:
    """Sample the exact minimizer: F(phi) interpolates linearly between F(phi+-)."""
    a, b = profile.interval
    eps = profile.eps
    if eps == 0.0:
        lo, hi = sorted((profile.phi_minus, profile.phi_plus))
        cell = math.floor(lo / np.pi)
        if not (hi <= (cell + 1) * np.pi):
            raise ValueError("eps = 0 profiles need phases within one monotonicity cell of F_0")
    x = np.asarray(x, dtype=float)
    fm = F_eps(profile.phi_minus, eps)
    fp = F_eps(profile.phi_plus, eps)
    s = fm + (x - a) / (b - a) * (fp - fm)
    phi = np.asarray(F_eps_inverse(s, eps), dtype=float)
    phi[x == a] = profile.phi_minus
    phi[x == b] = profile.phi_plus
    return phi


def energy_1d(phi: np.ndarray, eps: float,
              interval: tuple[float, float] = (-1.0, 1.0)) -> float:
    """Trapezoid-coefficient quadrature of ``(sin^2 phi + eps cos^2 phi)(phi')^2``."""
    eps = _check_eps(eps)
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or phi.size < 2:
        raise ValueError("need at least two uniformly spaced samples")
    a, b = float(interval[0]), float(interval[1])
    h = (b - a) / (phi.size - 1)
    g = np.sin(phi) ** 2 + eps * np.cos(phi) ** 2
    coef = (g[:-1] + g[1:]) / 2.0
    dphi = np.diff(phi) / h
    return float(h * np.sum(coef * dphi * dphi))


# ---------------------------------------------------------------------------
# elliptic / nonelliptic interval decomposition

@dataclass(frozen=True)
class IntervalDecomposition:
    lam: float
    delta: float
    elliptic: list[tuple[float, float]] = field(default_factory=list)
    nonelliptic: list[tuple[float, float]] = field(default_factory=list)

    def all_intervals(self) -> list[tuple[float, float, str]]:
        tagged = ([(a, b, "e") for a, b in self.elliptic]
                  + [(a, b, "ne") for a, b in self.nonelliptic])
        return sorted(tagged)


def _separation_check(phi: np.ndarray, x: np.ndarray, lam: float, delta: float,
                      h: float) -> None:
    """Oscillation guard: |sin phi| may cross a lam gap only over >= 16 delta."""
    f = np.sin(phi)
    w = int(math.ceil(16.0 * delta / h))
    for k in range(1, min(w, phi.size)):
        if k * h >= 16.0 * delta:
            break
        gap = np.abs(f[k:] - f[:-k])
        j = int(np.argmax(gap))
        if gap[j] >= lam:
            raise ValueError(
                "scale separation fails: |sin phi| moves by "
                f"{gap[j]:.3g} >= lambda over |x - y| = {k * h:.3g} < 16*delta "
                f"(offending pair x = {x[j]:.6g}, y = {x[j + k]:.6g})")


def _run_end(ok: np.ndarray, i0: int) -> int:
    """Last index j >= i0 with ok true on all of [i0, j] (requires ok[i0])."""
    bad = np.flatnonzero(~ok[i0:])
    return ok.size - 1 if bad.size == 0 else i0 + int(bad[0]) - 1


def interval_decomposition(phi: np.ndarray, lam: float, delta: float,
                           interval: tuple[float, float] = (-1.0, 1.0)
                           ) -> IntervalDecomposition:
    """Split the interval into elliptic (|sin phi| >= lam) and nonelliptic
    (|sin phi| <= 2 lam) pieces, each of length >= 8 delta.

    Implements the monotone sweep: from each boundary point, extend as
    far as either predicate survives and cut at the larger supremum; a
    terminal piece shorter than 8 delta is replaced by the final
    8-delta window, shrinking its predecessor.
    """
    phi = np.asarray(phi, dtype=float)
    a, b = float(interval[0]), float(interval[1])
    if not (lam > 0 and delta > 0):
        raise ValueError("lambda and delta must be positive")
    n = phi.size
    h = (b - a) / (n - 1)
    x = a + h * np.arange(n)
    if b - a < 8.0 * delta:
        raise ValueError("interval shorter than 8*delta")
    if h > 2.0 * delta:
        raise ValueError("samples too coarse to resolve the 8*delta scale")
    _separation_check(phi, x, lam, delta, h)

    f = np.abs(np.sin(phi))
    ok_ne = f <= 2.0 * lam
    ok_e = f >= lam
    cuts = [0]
    kinds: list[str] = []
    i0 = 0
    while True:
        ne_end = _run_end(ok_ne, i0) if ok_ne[i0] else -1
        e_end = _run_end(ok_e, i0) if ok_e[i0] else -1
        nxt = max(ne_end, e_end)
        if nxt <= i0:
            raise ValueError(f"decomposition stalls at x = {x[i0]:.6g}")
        kinds.append("e" if e_end >= ne_end else "ne")
        cuts.append(nxt)
        if nxt == n - 1:
            break
        i0 = nxt

    # terminal fixup: a short last piece becomes the final 8*delta window
    if len(kinds) >= 2 and x[cuts[-1]] - x[cuts[-2]] < 8.0 * delta:
        j8 = int(math.floor((b - 8.0 * delta - a) / h))
        seg = slice(j8 + 1, n)
        if np.all(ok_e[seg]):
            kinds[-1] = "e"
        elif np.all(ok_ne[seg]):
            kinds[-1] = "ne"
        else:
            raise ValueError("terminal window is neither elliptic nor nonelliptic")
        cuts[-2] = j8

    elliptic, nonelliptic = [], []
    for (i_lo, i_hi), kind in zip(zip(cuts[:-1], cuts[1:]), kinds):
        lo, hi = x[i_lo], x[i_hi]
        if hi - lo < 8.0 * delta - 1e-12:
            raise ValueError(f"produced interval ({lo:.6g}, {hi:.6g}) shorter than 8*delta")
        seg = slice(i_lo, i_hi + 1) if i_lo == 0 else slice(i_lo + 1, i_hi + 1)
        if kind == "e":
            if not np.all(ok_e[seg]):
                raise ValueError("elliptic predicate fails inside a produced interval")
            elliptic.append((float(lo), float(hi)))
        else:
            if not np.all(ok_ne[seg]):
                raise ValueError("nonelliptic predicate fails inside a produced interval")
            nonelliptic.append((float(lo), float(hi)))
    return IntervalDecomposition(float(lam), float(delta), elliptic, nonelliptic)


# ---------------------------------------------------------------------------
# one-dimensional recovery sequence

def mollifier_weights_1d(delta: float, h: float) -> np.ndarray:
    """Discrete weights of ``(1 - t^2)^3`` scaled to radius delta, summing to 1."""
    r = int(math.ceil(delta / h)) - 1
    r = max(r, 0)
    t = np.arange(-r, r + 1) * (h / delta)
    w = np.maximum(1.0 - t * t, 0.0) ** 3
    w /= math.fsum(w)
    w[r] += 1.0 - math.fsum(w)
    return w


@dataclass(frozen=True)
class Recovery1D:
    eps: float
    delta: float
    phi_delta: np.ndarray
    div_part: float
    curl_part: float
    total: float
    sup_gap: float


def recovery_1d(phi: np.ndarray, eps: float,
                interval: tuple[float, float] = (-1.0, 1.0)) -> Recovery1D:
    """Mollify at scale ``delta = sqrt(eps)`` (constant extension outside I)
    and report the 1D energy split of the smoothed field."""
    eps = _check_eps(eps)
    if eps == 0.0:
        raise ValueError("recovery scale sqrt(eps) needs eps > 0")
    phi = np.asarray(phi, dtype=float)
    a, b = float(interval[0]), float(interval[1])
    h = (b - a) / (phi.size - 1)
    delta = math.sqrt(eps)
    if delta > (b - a) / 4.0:
        raise ValueError("delta = sqrt(eps) exceeds a quarter of the interval")
    w = mollifier_weights_1d(delta, h)
    r = (w.size - 1) // 2
    padded = np.pad(phi, r, mode="edge") if r else phi
    phi_d = np.convolve(padded, w, mode="valid")
    div_part = energy_1d(phi_d, 0.0, interval)
    curl_part = energy_1d(phi_d, 1.0, interval) - div_part
    return Recovery1D(eps, delta, phi_d, div_part, curl_part,
                      div_part + eps * curl_part,
                      float(np.max(np.abs(phi_d - phi))))
