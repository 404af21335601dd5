"""Command-line entry point.

Every command writes a ``key value`` report (to ``--report`` when given,
always echoed to stdout) and exits with status 0 when all checks pass, 1
when a check fails and 2 on an error.  Errors print one line
``error:<category>:<slug> <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .anisotropy import (
    NormSpec,
    eval_polar,
    parse_norm,
    polar_by_sampling,
    verify_duality_identities,
    wulff_boundary,
    wulff_constant,
    wulff_perimeter,
    wulff_radius,
)
from .errors import ConfigError, WulffError
from .fields import (
    BVComposite,
    JumpSet,
    decreasing_rearrangement,
    increasing_rearrangement,
    load_field,
    load_jumps,
    save_field,
    save_jumps,
)
from .fixtures import FIXTURE_NAMES, build_fixture
from .report import Report
from .rearrange import SymmetrizedFunction, symmetrize_bv, write_profile
from .torsion import (
    polygon_domain,
    radial_torsion_minimizer,
    saint_venant_compare,
    square_domain,
    wulff_domain,
)
from .variation import Tolerances, check_eq, check_le, verify_main_theorem

__all__ = ["RunConfig", "run", "main", "COMMANDS"]

COMMANDS = ("norm-check", "wulff", "rearrange", "symmetrize", "verify", "torsion", "insulation", "fixtures")


@dataclass
class RunConfig:
    """Validated settings for one command."""

    command: str
    norm: str | None = None
    dimension: int = 2
    field: str | None = None
    jumps: str | None = None
    report: str | None = None
    out_profile: str | None = None
    out_dir: str | None = None
    figure: str | None = None
    shape: str | None = None
    direction: str = "decreasing"
    resolution: int | None = None
    levels: int = 128
    lambda_: float = 0.0
    m: float = 1.0
    radius: float = 1.0
    singular_mass: float = 0.0
    samples: int = 10**6
    cells: int = 48
    trials: int = 2
    seed: int = 0
    tol_scale: float = 1.0

    def __post_init__(self) -> None:
        self.validate()

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        """Build from a plain mapping; ``lambda`` and dashed keys are accepted."""
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            name = key.replace("-", "_")
            if name == "lambda":
                name = "lambda_"
            if name not in names:
                raise ConfigError(f"unknown configuration key {key!r}", "unknown-key")
            kwargs[name] = value
        if "command" not in kwargs:
            raise ConfigError("missing 'command'", "missing-command")
        return cls(**kwargs)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}", "unknown-command")
        checks = [
            (self.dimension in (2, 3), "dimension", "dimension must be 2 or 3"),
            (self.resolution is None or self.resolution >= 32, "resolution", "resolution must be >= 32"),
            (self.levels >= 4, "levels", "levels must be >= 4"),
            (self.lambda_ >= 0 and math.isfinite(self.lambda_), "lambda", "lambda must be >= 0"),
            (self.m > 0 and math.isfinite(self.m), "m-out-of-range", "m must be > 0"),
            (self.radius > 0, "radius", "radius must be > 0"),
            (self.singular_mass >= 0, "singular-mass", "singular mass must be >= 0"),
            (self.samples >= 16, "samples", "samples must be >= 16"),
            (self.cells >= 8, "cells", "cells must be >= 8"),
            (self.trials >= 1, "trials", "trials must be >= 1"),
            (self.tol_scale > 0 and math.isfinite(self.tol_scale), "tol-scale", "tol-scale must be > 0"),
            (self.direction in ("decreasing", "increasing"), "direction", "direction must be decreasing|increasing"),
        ]
        for ok, slug, msg in checks:
            if not ok:
                raise ConfigError(msg, slug)

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_scale)

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"--{name.replace('_', '-')} is required for {self.command}", "missing-" + name)


# ---------------------------------------------------------------------------
# helpers


def _norm(cfg: RunConfig) -> NormSpec:
    cfg.require("norm")
    return parse_norm(cfg.norm, cfg.dimension, base_dir=Path.cwd())


def _geometry(cfg: RunConfig, norm: NormSpec):
    return wulff_constant(norm, cfg.resolution)


def _composite(cfg: RunConfig) -> BVComposite:
    cfg.require("field")
    f = load_field(cfg.field)
    jumps = load_jumps(cfg.jumps) if cfg.jumps else JumpSet()
    return BVComposite(f, jumps, cfg.singular_mass)


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


def _shape(cfg: RunConfig, norm: NormSpec):
    cfg.require("shape")
    kind, _, arg = cfg.shape.partition(":")
    try:
        if kind == "wulff":
            return wulff_domain(norm, float(arg), cfg.cells)
        if kind == "square":
            return square_domain(float(arg), cfg.cells)
    except ValueError:
        raise ConfigError(f"bad shape argument {arg!r}", "shape") from None
    if kind == "polygon":
        path = Path(arg)
        if not path.exists():
            raise FileNotFoundError(str(path))
        try:
            verts = np.loadtxt(path, ndmin=2)
        except ValueError:
            raise ConfigError(f"polygon file {arg!r} must hold 'x y' rows", "shape") from None
        return polygon_domain(verts, cfg.cells)
    raise ConfigError(f"unknown shape {cfg.shape!r} (wulff:R, square:a, polygon:path)", "shape")


# ---------------------------------------------------------------------------
# commands


def _cmd_norm_check(cfg: RunConfig, rep: Report) -> None:
    norm = _norm(cfg)
    tol = cfg.tolerances
    rep.add("norm", norm.label())
    rep.add("smooth", norm.is_smooth)
    if norm.is_smooth:
        dr = verify_duality_identities(norm, 1000, 1e-6 * tol.scale, cfg.seed)
        for name, dev in dr.deviations.items():
            rep.check(check_le("duality_" + _slug(name), dev, 0.0, dr.tol))
    if norm.dimension == 2:
        rng = np.random.default_rng(cfg.seed)
        pts = rng.standard_normal((16, 2))
        exact = np.asarray(eval_polar(norm, pts))
        brute = polar_by_sampling(norm, pts, cfg.samples)
        rel = float(np.max(np.abs(brute - exact) / exact))
        rep.add("polar_samples", cfg.samples)
        rep.check(check_le("polar_sampling", rel, 0.0, 1e-3 * tol.scale))
    geom = _geometry(cfg, norm)
    rep.add("kappa", geom.kappa)
    rep.add("kappa_error", geom.kappa_error)
    rep.add("resolution", geom.resolution)


def _cmd_wulff(cfg: RunConfig, rep: Report) -> None:
    norm = _norm(cfg)
    geom = _geometry(cfg, norm)
    n, R = geom.dimension, cfg.radius
    per = wulff_perimeter(geom, R)
    rep.add("norm", norm.label())
    rep.add("dimension", n)
    rep.add("kappa", geom.kappa)
    rep.add("kappa_error", geom.kappa_error)
    rep.add("resolution", geom.resolution)
    rep.add("radius", R)
    rep.add("volume", geom.kappa * R**n)
    rep.add("perimeter", per)
    rep.check(check_le("kappa_error_estimate", geom.kappa_error, 0.0, 1e-3 * cfg.tol_scale))
    if n == 2 and cfg.figure:
        from .plotting import plot_wulff_shape

        plot_wulff_shape(norm, cfg.figure, R)
        rep.add("figure", cfg.figure)


def _cmd_rearrange(cfg: RunConfig, rep: Report) -> None:
    cfg.require("field", "out_profile")
    f = load_field(cfg.field)
    prof = decreasing_rearrangement(f)
    if cfg.direction == "increasing":
        prof = increasing_rearrangement(prof)
    rep.add("direction", cfg.direction)
    rep.add("omega", f.measure)
    rep.add("pieces", len(prof))
    rep.add("l1_field", f.integral())
    rep.add("l1_profile", prof.integral())
    exact = 1e-12 * max(1.0, f.integral())
    rep.check(check_eq("l1_preserved", prof.integral(), f.integral(), exact))
    c0 = 0.0
    if cfg.norm:
        norm = _norm(cfg)
        geom = _geometry(cfg, norm)
        R = wulff_radius(geom, f.measure)
        rep.add("wulff_radius", R)
        sym = SymmetrizedFunction(geom, norm, R, prof, c0)
        write_profile(sym, cfg.out_profile)
    else:
        _write_staircase(prof, cfg.out_profile)
    rep.add("profile", cfg.out_profile)
    if cfg.figure:
        from .plotting import plot_profile

        plot_profile(prof, cfg.figure, f"{cfg.direction} rearrangement")
        rep.add("figure", cfg.figure)


def _write_staircase(prof, path: str) -> None:
    from .fields import atomic_write_text

    lines = [f"{s:.17g} {v:.17g}" for s, v in zip(prof.breakpoints[:-1], prof.values)]
    lines.append("c0 0")
    lines.append(f"omega {prof.measure:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _cmd_symmetrize(cfg: RunConfig, rep: Report) -> None:
    cfg.require("out_profile")
    norm = _norm(cfg)
    geom = _geometry(cfg, norm)
    u = _composite(cfg)
    sym = symmetrize_bv(u, norm, geom)
    prof = sym.profile
    P = wulff_perimeter(geom, sym.R)
    rep.add("norm", norm.label())
    rep.add("omega", sym.omega_measure)
    rep.add("wulff_radius", sym.R)
    rep.add("kappa", geom.kappa)
    rep.add("singular_mass", prof.M)
    rep.add("c0", prof.c0)
    rep.add("l1_u", u.field.integral())
    rep.add("l1_ustar", sym.l1_norm())
    tv_in = prof.gstar.integral() + prof.M
    tv_out = prof.ac_variation() + prof.c0 * P
    exact = 1e-9 * max(1.0, tv_in)
    rep.check(check_eq("boundary_constant", prof.c0 * P, prof.M, exact))
    rep.check(check_eq("tv_preservation", tv_out, tv_in, exact))
    rep.check(check_le("profile_nonincreasing", float(np.max(np.diff(prof.knot_values), initial=0.0)), 0.0, 0.0))
    write_profile(sym, cfg.out_profile)
    rep.add("profile", cfg.out_profile)
    if cfg.figure:
        from .plotting import plot_profile

        plot_profile(prof, cfg.figure, "gradient rearrangement")
        rep.add("figure", cfg.figure)


def _cmd_verify(cfg: RunConfig, rep: Report) -> None:
    norm = _norm(cfg)
    geom = _geometry(cfg, norm)
    u = _composite(cfg)
    vr = verify_main_theorem(u, norm, geom, cfg.levels, cfg.tolerances)
    rep.add("norm", norm.label())
    rep.add("spacing", vr.spacing)
    rep.add("omega", vr.omega_measure)
    rep.add("levels", cfg.levels)
    for key in ("ac_tv", "singular_tv", "total_tv", "coarea_tv", "l1_u", "l1_ustar", "tv_ustar", "c0"):
        rep.add(key, float(getattr(vr, key)))
    rep.add("gap", vr.l1_ustar - vr.l1_u)
    rep.extend(vr.checks)
    if cfg.figure:
        from .plotting import plot_level_sets

        top = float(u.field.values.max())
        plot_level_sets(u.field, [top * (k + 0.5) / 5 for k in range(5)], cfg.figure)
        rep.add("figure", cfg.figure)


def _cmd_torsion_like(cfg: RunConfig, rep: Report, mode: str) -> None:
    norm = _norm(cfg)
    if norm.dimension != 2:
        raise ConfigError("torsion commands are planar", "dimension")
    geom = _geometry(cfg, norm)
    dom = _shape(cfg, norm)
    param = cfg.lambda_ if mode == "penalized" else cfg.m
    tr = saint_venant_compare(dom, norm, geom, mode, param, cfg.trials, cfg.seed, cfg.tolerances)
    rep.add("norm", norm.label())
    rep.add("shape", cfg.shape)
    rep.add("cells", cfg.cells)
    rep.add("lambda" if mode == "penalized" else "m", float(param))
    rep.add("omega", tr.omega_measure)
    rep.add("wulff_radius", tr.R_star)
    rep.add("T_omega", tr.T_omega)
    rep.add("T_star", tr.T_star)
    if mode == "penalized":
        rep.add("dead_core_radius", tr.dead_core_radius)
        rep.add("fallback_scan", tr.fallback_used)
    rep.add("trials", tr.trials_run)
    rep.add("trials_discarded", tr.trials_discarded)
    rep.extend(tr.checks)
    if cfg.figure:
        from .plotting import plot_radial_insulation, plot_radial_torsion

        if mode == "penalized":
            plot_radial_torsion(radial_torsion_minimizer(geom, tr.R_star, param), cfg.figure)
        else:
            plot_radial_insulation(geom, tr.R_star, param, cfg.figure)
        rep.add("figure", cfg.figure)


def _cmd_fixtures(cfg: RunConfig, rep: Report) -> None:
    cfg.require("out_dir")
    out = Path(cfg.out_dir)
    if not out.is_dir():
        raise FileNotFoundError(str(out))
    norm = parse_norm(cfg.norm or "p:2")
    rep.add("norm", norm.label())
    rep.add("cells", cfg.cells)
    for name in FIXTURE_NAMES:
        u = build_fixture(name, norm, cfg.cells)
        fpath = out / f"{name}.fld"
        save_field(u.field, fpath)
        rep.add(f"field_{_slug(name)}", str(fpath))
        if len(u.jumps):
            jpath = out / f"{name}.jumps"
            save_jumps(u.jumps, jpath)
            rep.add(f"jumps_{_slug(name)}", str(jpath))


_HANDLERS = {
    "norm-check": _cmd_norm_check,
    "wulff": _cmd_wulff,
    "rearrange": _cmd_rearrange,
    "symmetrize": _cmd_symmetrize,
    "verify": _cmd_verify,
    "torsion": lambda c, r: _cmd_torsion_like(c, r, "penalized"),
    "insulation": lambda c, r: _cmd_torsion_like(c, r, "insulation"),
    "fixtures": _cmd_fixtures,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns ``(exit_status, report_text)``.

    Raises library errors unchanged; :func:`main` maps them to exit 2.
    """
    rep = Report(cfg.command)
    _HANDLERS[cfg.command](cfg, rep)
    text = rep.write(cfg.report)
    return (0 if rep.passed else 1), text


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(message, "usage")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--resolution", type=int, default=d, help="Wulff-ball quadrature resolution")
    p.add_argument("--seed", type=int, default=d if suppress else 0, help="seed for random trials")
    p.add_argument("--tol-scale", type=float, default=d if suppress else 1.0, help="multiplies all tolerances")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wulffsym", description="Anisotropic symmetrization toolkit")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.add_argument("--report", help="report path (also printed to stdout)")
        return p

    p = add("norm-check", "duality identities, polar sampling check and kappa")
    p.add_argument("--norm", required=True)
    p.add_argument("--dimension", type=int, default=2)
    p.add_argument("--samples", type=int, default=10**6)

    p = add("wulff", "kappa_n and the perimeter of W_R")
    p.add_argument("--norm", required=True)
    p.add_argument("--dimension", type=int, default=2)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--figure")

    p = add("rearrange", "decreasing or increasing rearrangement of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--out-profile", required=True)
    p.add_argument("--direction", default="decreasing")
    p.add_argument("--norm")
    p.add_argument("--figure")

    p = add("symmetrize", "gradient rearrangement of a BV composite")
    p.add_argument("--field", required=True)
    p.add_argument("--jumps")
    p.add_argument("--norm", required=True)
    p.add_argument("--singular-mass", type=float, default=0.0)
    p.add_argument("--out-profile", required=True)
    p.add_argument("--figure")

    p = add("verify", "L1 inequality, TV preservation and coarea checks")
    p.add_argument("--field", required=True)
    p.add_argument("--jumps")
    p.add_argument("--norm", required=True)
    p.add_argument("--singular-mass", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=128)
    p.add_argument("--figure")

    for name, key in (("torsion", "--lambda"), ("insulation", "--m")):
        p = add(name, f"Saint-Venant comparison ({'penalized torsion' if key == '--lambda' else 'insulation'})")
        p.add_argument("--shape", required=True, help="wulff:R | square:a | polygon:path")
        p.add_argument("--norm", required=True)
        if key == "--lambda":
            p.add_argument("--lambda", dest="lambda_", type=float, default=0.0)
        else:
            p.add_argument("--m", type=float, default=1.0)
        p.add_argument("--cells", type=int, default=48)
        p.add_argument("--trials", type=int, default=2)
        p.add_argument("--figure")

    p = add("fixtures", "write the canonical fixture fields")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--norm")
    p.add_argument("--cells", type=int, default=128)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_mapping({k: v for k, v in vars(ns).items() if v is not None})
        status, text = run(cfg)
    except WulffError as exc:
        print(f"error:{exc.code} {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error:io:file-not-found {exc.filename or exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error:io:os-error {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
