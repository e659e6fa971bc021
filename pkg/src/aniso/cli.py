"""Config-driven experiment runner.

Every operation is exposed as ``aniso <subcommand> --config file.json
--out dir``.  Configs are strict JSON: unknown keys are rejected by
name, numeric fields are validated, and the raw config text is echoed
byte-for-byte into the output directory next to the CSV artifacts and
the hash manifest.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import besov, kinetic, recovery, singular
from .exact1d import energy_1d, minimal_energy_1d, minimizer_profile_1d
from .grid import (BCMode, BoundaryCondition, Grid2D, PhaseField2D,
                   phase_to_vector)
from .minimize import OptimizerConfig, gradient_check, minimize_energy
from .output import setup_logging, write_csv, write_manifest
from .thinfilm import (ThinFilmParams, minimize_thinfilm, seeded_start,
                       symmetry_defect_bound, thinfilm_grid)

log = logging.getLogger("aniso")


class ConfigError(Exception):
    pass


class Schema:
    """Declarative key table: name -> (converter, default).  A default of
    ``...`` marks the key required."""

    def __init__(self, **keys):
        self.keys = keys

    def apply(self, raw: dict) -> dict:
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        for key in raw:
            if key not in self.keys:
                raise ConfigError(f"unknown config key: {key!r}")
        out = {}
        for key, (conv, default) in self.keys.items():
            if key in raw:
                try:
                    out[key] = conv(raw[key])
                except ConfigError:
                    raise
                except Exception as exc:
                    raise ConfigError(f"invalid value for key {key!r}: {exc}") from exc
            elif default is ...:
                raise ConfigError(f"missing required config key: {key!r}")
            else:
                out[key] = default
        return out


def _finite(x) -> float:
    v = float(x)
    if not np.isfinite(v):
        raise ValueError("must be finite")
    return v


def _positive(x) -> float:
    v = _finite(x)
    if v <= 0:
        raise ValueError("must be positive")
    return v


def _nonneg(x) -> float:
    v = _finite(x)
    if v < 0:
        raise ValueError("must be nonnegative")
    return v


def _pos_int(x) -> int:
    v = int(x)
    if v != x or v <= 0:
        raise ValueError("must be a positive integer")
    return v


def _nonneg_int(x) -> int:
    v = int(x)
    if v != x or v < 0:
        raise ValueError("must be a nonnegative integer")
    return v


def _choice(*options):
    def conv(x):
        if x not in options:
            raise ValueError(f"must be one of {options}")
        return x
    return conv


def _float_list(x) -> list[float]:
    vals = [_positive(v) for v in x]
    if not vals:
        raise ValueError("must be a nonempty list")
    return vals


def _pair(x) -> tuple[float, float]:
    a, b = (_finite(v) for v in x)
    if not b > a:
        raise ValueError("must be an increasing pair")
    return a, b


def _optimizer(cfg: dict) -> OptimizerConfig:
    return OptimizerConfig(max_iters=cfg["max_iters"], grad_tol=cfg["grad_tol"])


_OPT_KEYS = {
    "max_iters": (_pos_int, 2000),
    "grad_tol": (lambda x: None if x is None else _positive(x), None),
}


# ---------------------------------------------------------------------------
# subcommand implementations (config schema + runner)

def run_exact1d(cfg: dict, out: Path) -> None:
    prof = minimal_energy_1d(cfg["eps"], cfg["phi_minus"], cfg["phi_plus"],
                             cfg["interval"])
    a, b = prof.interval
    x = np.linspace(a, b, cfg["n_samples"])
    phi = minimizer_profile_1d(prof, x)
    quad = energy_1d(phi, cfg["eps"], prof.interval)
    write_csv(out / "profile.csv", ["x", "phi"], zip(x.tolist(), phi.tolist()))
    write_csv(out / "summary.csv",
              ["eps", "phi_minus", "phi_plus", "a", "b", "e_min", "quadrature"],
              [(cfg["eps"], cfg["phi_minus"], cfg["phi_plus"], a, b,
                prof.e_min, quad)])


EXACT1D = Schema(
    eps=(_nonneg, ...),
    phi_minus=(_finite, 0.0),
    phi_plus=(_finite, float(np.pi / 2)),
    interval=(_pair, (-1.0, 1.0)),
    n_samples=(_pos_int, 512),
)


def _square_phase(cfg: dict) -> PhaseField2D:
    grid = thinfilm_grid(cfg["grid_n"])
    params = ThinFilmParams(cfg["eps"], cfg.get("aspect", 1.0),
                            cfg["phi_minus"], cfg["phi_plus"])
    return seeded_start(grid, params, cfg["seed"],
                        amplitude=cfg["amplitude"], modes=cfg["modes"])


_SQUARE_KEYS = {
    "grid_n": (_pos_int, 64),
    "eps": (_positive, ...),
    "phi_minus": (_finite, 0.0),
    "phi_plus": (_finite, float(np.pi / 2)),
    "seed": (_nonneg_int, 0),
    "amplitude": (_nonneg, 0.5),
    "modes": (_pos_int, 2),
}


def run_minimize(cfg: dict, out: Path) -> None:
    start = _square_phase(cfg)
    field, report = minimize_energy(start, cfg["eps"], _optimizer(cfg))
    write_csv(out / "trace.csv", report.trace_header.split(","), report.trace)
    bd = report.breakdown
    write_csv(out / "summary.csv",
              ["eps", "energy", "div_part", "curl_part", "iterations",
               "grad_norm", "converged"],
              [(cfg["eps"], bd.total, bd.div_part, bd.curl_part,
                report.iterations, report.grad_norm, report.converged)])


MINIMIZE = Schema(**_SQUARE_KEYS, **_OPT_KEYS)


def run_thinfilm(cfg: dict, out: Path) -> None:
    grid = thinfilm_grid(cfg["grid_n"])
    params = ThinFilmParams(cfg["eps"], cfg["aspect"],
                            cfg["phi_minus"], cfg["phi_plus"])
    res = minimize_thinfilm(params, grid, _optimizer(cfg), seed=cfg["seed"])
    bound = symmetry_defect_bound(res.field, params)
    write_csv(out / "trace.csv", res.report.trace_header.split(","),
              res.report.trace)
    write_csv(out / "summary.csv",
              ["eps", "aspect", "energy", "e_min", "rel_err", "x2_variation",
               "margin"],
              [(params.eps, params.aspect, res.report.breakdown.total,
                res.e_min, res.rel_err, res.x2_var, bound.margin)])


THINFILM = Schema(aspect=(_positive, ...), **_SQUARE_KEYS, **_OPT_KEYS)


def _build_field(cfg: dict):
    grid = Grid2D.off_origin(cfg["grid_n"], cfg["grid_n"])
    kind = cfg["field"]
    if kind == "jump":
        return singular.make_jump(grid, cfg["jump_n"])
    if kind == "vortex":
        return singular.make_vortex(grid)
    xx, yy = grid.meshgrid()
    phi = 0.3 * np.sin(np.pi * xx) * np.sin(np.pi * yy)
    bc = BoundaryCondition(BCMode.FREE)
    return phase_to_vector(PhaseField2D(grid, phi, bc))


def run_besov(cfg: dict, out: Path) -> None:
    u = _build_field(cfg)
    k_lo, k_hi = cfg["k_range"]
    offsets = []
    for d in cfg["directions"]:
        for off in besov.dyadic_offsets(u.grid, tuple(d), range(k_lo, k_hi + 1)):
            if off not in offsets:
                offsets.append(off)
    margin = cfg["margin"]
    if margin is None:
        margin = besov.default_margin(u.grid, offsets)
    rows = besov.besov_scan(u, cfg["s"], cfg["p"], offsets, margin)
    write_csv(out / "scan.csv", ["p", "s", "h1", "h2", "norm", "quotient"], rows)
    fit = besov.scaling_exponent(u, cfg["p"], offsets, margin)
    write_csv(out / "fit.csv", ["p", "alpha", "r2", "n_scales"],
              [(cfg["p"], fit.alpha if fit.defined else float("nan"),
                fit.r2 if fit.defined else float("nan"), fit.n_scales)])


BESOV = Schema(
    grid_n=(_pos_int, 256),
    field=(_choice("jump", "vortex", "smooth"), ...),
    jump_n=(_finite, 0.0),
    p=(_positive, 3.0),
    s=(_positive, 0.5),
    directions=(lambda x: [(int(d[0]), int(d[1])) for d in x],
                [[1, 0], [0, 1], [1, 1]]),
    k_range=(lambda x: (int(x[0]), int(x[1])), (2, 8)),
    margin=(lambda x: None if x is None else _nonneg(x), None),
)


def run_kinetic(cfg: dict, out: Path) -> None:
    weight = kinetic.PHI0 if cfg["weight"] == "phi0" else kinetic.SIN2
    angular = kinetic.AngularGrid(cfg["n_s"])
    kinetic.validate_weight(weight, angular)
    scan = kinetic.coercivity_scan(weight, cfg["n_angles"], cfg["m_max"])
    brute = kinetic.coercivity_scan_brute(weight, cfg["n_angles"], angular)
    write_csv(out / "gap_scan.csv", ["gap", "delta", "ratio", "delta_quad", "ratio_quad"],
              zip(scan.gaps.tolist(), scan.delta.tolist(), scan.ratio.tolist(),
                  brute.delta.tolist(), brute.ratio.tolist()))
    thetas = 2.0 * np.pi * np.arange(cfg["n_angles"]) / cfg["n_angles"]
    pair_rows = []
    pd = brute.pair_delta
    for i in range(cfg["n_angles"]):
        for j in range(cfg["n_angles"]):
            if i == j:
                continue
            gap = thetas[j] - thetas[i]
            du = abs(2.0 * np.sin(gap / 2.0))
            pair_rows.append((thetas[i], thetas[j], pd[i, j], pd[i, j] / du ** 3))
    write_csv(out / "pair_scan.csv",
              ["theta1", "theta2", "delta", "coercivity_ratio"], pair_rows)
    write_csv(out / "summary.csv",
              ["weight", "n_angles", "n_s", "c_min", "gap_argmin",
               "c_min_quad", "gap_argmin_quad"],
              [(weight.name, cfg["n_angles"], cfg["n_s"], scan.c_min,
                scan.gap_argmin, brute.c_min, brute.gap_argmin)])


KINETIC = Schema(
    weight=(_choice("phi0", "sin_2s"), "phi0"),
    n_s=(_pos_int, 256),
    n_angles=(_pos_int, 360),
    m_max=(_pos_int, 20001),
)


def run_recover(cfg: dict, out: Path) -> None:
    n = cfg["grid_n"]
    grid = Grid2D(n, n, periodic_x1=False, periodic_x2=True,
                  stagger_x1=0.0, stagger_x2=0.5)
    prof = minimal_energy_1d(cfg["profile_eps"], cfg["phi_minus"], cfg["phi_plus"])
    column = minimizer_profile_1d(prof, grid.x)
    phi = np.repeat(column[:, None], n, axis=1)
    bc = BoundaryCondition(BCMode.DIRICHLET_X1_PERIODIC_X2,
                           cfg["phi_minus"], cfg["phi_plus"])
    u = phase_to_vector(PhaseField2D(grid, phi, bc))
    curve = recovery.recovery_energy_curve(u, cfg["eps_ladder"],
                                           check_vmo=cfg["check_vmo"])
    write_csv(out / "curve.csv",
              ["eps", "delta", "div_part", "curl_part", "total", "target",
               "dirichlet_diag"],
              [(p.eps, p.delta, p.div_part, p.curl_part, p.total, p.target,
                p.dirichlet_diag) for p in curve])


RECOVER = Schema(
    grid_n=(_pos_int, 256),
    profile_eps=(_positive, 0.01),
    phi_minus=(_finite, 0.0),
    phi_plus=(_finite, float(np.pi / 2)),
    eps_ladder=(_float_list, [0.1, 0.01, 0.001]),
    check_vmo=(bool, True),
)


def run_singular(cfg: dict, out: Path) -> None:
    u = _build_field(cfg)
    if cfg["loop"] == "rectangle":
        loop = singular.rectangle_loop(u.grid, cfg["loop_inset"])
    else:
        loop = singular.circle_loop(u.grid, cfg["loop_radius"], cfg["loop_nodes"])
    wind = singular.winding_number(u, loop)
    mass = singular.jacobian_total(u, loop)
    write_csv(out / "summary.csv",
              ["field", "winding", "jacobian_mass"],
              [(cfg["field"], wind, mass)])


SINGULAR = Schema(
    grid_n=(_pos_int, 256),
    field=(_choice("jump", "vortex", "smooth"), ...),
    jump_n=(_finite, 0.0),
    loop=(_choice("rectangle", "circle"), "circle"),
    loop_inset=(_pos_int, 4),
    loop_radius=(_positive, 0.5),
    loop_nodes=(_pos_int, 256),
)


def run_gradcheck(cfg: dict, out: Path) -> None:
    phase = _square_phase(cfg)
    worst = gradient_check(phase, cfg["eps"], n_nodes=cfg["n_nodes"],
                           seed=cfg["seed"], fd_step=cfg["fd_step"])
    write_csv(out / "summary.csv",
              ["eps", "grid_n", "n_nodes", "fd_step", "max_rel_err"],
              [(cfg["eps"], cfg["grid_n"], cfg["n_nodes"], cfg["fd_step"], worst)])


GRADCHECK = Schema(
    n_nodes=(_pos_int, 100),
    fd_step=(_positive, 1e-6),
    **_SQUARE_KEYS,
)


COMMANDS = {
    "minimize": (MINIMIZE, run_minimize),
    "thinfilm": (THINFILM, run_thinfilm),
    "exact1d": (EXACT1D, run_exact1d),
    "besov": (BESOV, run_besov),
    "kinetic": (KINETIC, run_kinetic),
    "recover": (RECOVER, run_recover),
    "singular": (SINGULAR, run_singular),
    "gradcheck": (GRADCHECK, run_gradcheck),
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="aniso",
        description="Reproducible experiments for the anisotropic energy lab.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        setup_logging()
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    schema, runner = COMMANDS[args.command]
    config_path = Path(args.config)
    try:
        raw_text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: cannot read {config_path}: {exc}", file=sys.stderr)
        return 2
    try:
        raw = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON in {config_path}: {exc}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("config error: invalid value for key '--threads': must be >= 1",
              file=sys.stderr)
        return 2
    try:
        cfg = schema.apply(raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    # echo the config byte-for-byte next to the artifacts
    (out / "config.json").write_text(raw_text, encoding="utf-8")
    log.info("running %s (threads=%d) -> %s", args.command, args.threads, out)
    try:
        runner(cfg, out)
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    write_manifest(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
