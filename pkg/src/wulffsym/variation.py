"""Anisotropic perimeters, total variation and the truncation function ``G``.

Perimeters of superlevel sets are measured in one of two ways:

``contour``
    Marching squares on the cell-centred samples (zero-padded, so the
    zero extension outside the grid is seen), saddles resolved by the cell
    average.  Each segment contributes ``length * H(nu)``.
``pixel``
    Exact for unions of cells: each cell edge separating inside from
    outside contributes ``h * H(e_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import NormSpec, WulffGeometry, eval_norm, norm_bounds, wulff_perimeter
from .errors import DomainError
from .fields import (
    BVComposite,
    GridField,
    StaircaseProfile,
    ac_gradient,
    decreasing_rearrangement,
    jump_trace_samples,
)
from .rearrange import GradientProfile, anisotropic_symmetrization, gradient_density, singular_mass, symmetrize_bv

__all__ = [
    "Check",
    "LevelSetGeometry",
    "VariationReport",
    "Tolerances",
    "contour_segments",
    "segment_perimeter",
    "enclosed_area",
    "pixel_perimeter",
    "anisotropic_perimeter_mask",
    "level_set",
    "anisotropic_tv",
    "coarea_tv",
    "LevelTable",
    "truncation_variation",
    "compute_GH1",
    "compute_GH2",
    "iso_profile_integral",
    "isoperimetric_deficit",
    "polya_szego_sides",
    "verify_main_theorem",
]


@dataclass(frozen=True)
class Tolerances:
    """Default slack rules; every rule is multiplied by ``scale``."""

    scale: float = 1.0

    def disc(self, h: float, tv: float) -> float:
        """``10 h TV(u)``: first-order discretisation slack."""
        return self.scale * 10.0 * h * tv

    def G(self, value: float, h: float, tv: float) -> float:
        return self.scale * (0.05 * abs(value) + 10.0 * h * tv)

    coarea = G

    def iso(self, perimeter: float) -> float:
        return self.scale * 0.03 * perimeter

    def ps(self, lhs: float) -> float:
        return self.scale * 0.02 * abs(lhs)


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    tol: float
    passed: bool

    def line(self) -> str:
        return f"check {self.name} {self.lhs:.17g} {self.rhs:.17g} {self.tol:.17g} {'pass' if self.passed else 'fail'}"


def check_le(name: str, lhs: float, rhs: float, tol: float) -> Check:
    return Check(name, float(lhs), float(rhs), float(tol), bool(lhs <= rhs + tol))


def check_eq(name: str, lhs: float, rhs: float, tol: float) -> Check:
    return Check(name, float(lhs), float(rhs), float(tol), bool(abs(lhs - rhs) <= tol))


# ---------------------------------------------------------------------------
# marching squares

# Edge k of a cell joins corner k to corner k+1; corners are ordered
# (i, j), (i+1, j), (i+1, j+1), (i, j+1).  Each case lists the edge pairs
# joined by a segment.  Saddle cases 5 and 10 have two variants, chosen by
# whether the cell average lies above the level.
_CASES: dict[int, list[tuple[int, int]]] = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(1, 3)], 4: [(1, 2)], 6: [(0, 2)], 7: [(2, 3)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(3, 0)],
}
_SADDLE = {
    (5, True): [(0, 1), (2, 3)], (5, False): [(3, 0), (1, 2)],
    (10, True): [(3, 0), (1, 2)], (10, False): [(0, 1), (2, 3)],
}


def contour_segments(values: np.ndarray, level: float, origin, spacing: float) -> np.ndarray:
    """Segments of ``∂{u > level}`` for cell-centred 2-D samples, shape ``(k, 2, 2)``.

    Each segment is oriented with ``{u > level}`` on its left.

    The samples are padded with one ring of zeros, so for ``level >= 0`` the
    set is treated as vanishing outside the grid.
    """
    v = np.pad(np.asarray(values, dtype=float), 1)
    ox = origin[0] - spacing
    oy = origin[1] - spacing
    c = [v[:-1, :-1], v[1:, :-1], v[1:, 1:], v[:-1, 1:]]
    inside = [ci > level for ci in c]
    case = inside[0] * 1 + inside[1] * 2 + inside[2] * 4 + inside[3] * 8
    active = (case != 0) & (case != 15)
    ii, jj = np.nonzero(active)
    if len(ii) == 0:
        return np.zeros((0, 2, 2))
    cv = np.stack([ci[ii, jj] for ci in c], axis=1)
    cs = case[ii, jj]
    # corner coordinates (cell-centre positions of the padded grid)
    x0 = ox + (ii + 0.5) * spacing
    y0 = oy + (jj + 0.5) * spacing
    cx = np.stack([x0, x0 + spacing, x0 + spacing, x0], axis=1)
    cy = np.stack([y0, y0, y0 + spacing, y0 + spacing], axis=1)

    def edge_point(rows: np.ndarray, e: np.ndarray) -> np.ndarray:
        a = e
        b = (e + 1) % 4
        va, vb = cv[rows, a], cv[rows, b]
        denom = np.where(vb != va, vb - va, 1.0)
        w = np.clip((level - va) / denom, 0.0, 1.0)
        px = cx[rows, a] + w * (cx[rows, b] - cx[rows, a])
        py = cy[rows, a] + w * (cy[rows, b] - cy[rows, a])
        return np.stack([px, py], axis=1)

    center_in = cv.mean(axis=1) > level
    e1 = np.full((len(cs), 2), -1)
    e2 = np.full((len(cs), 2), -1)
    for k, pairs in _CASES.items():
        sel = cs == k
        e1[sel, 0], e2[sel, 0] = pairs[0]
    for (k, cin), pairs in _SADDLE.items():
        sel = (cs == k) & (center_in == cin)
        e1[sel, 0], e2[sel, 0] = pairs[0]
        e1[sel, 1], e2[sel, 1] = pairs[1]
    # Walking p -> q across a counter-clockwise cell, the corners passed between
    # the entry and exit edges lie on the right; flip when they are inside.
    segs = []
    for slot in range(2):
        sel = e1[:, slot] >= 0
        if not sel.any():
            continue
        idx = np.flatnonzero(sel)
        p = edge_point(idx, e1[idx, slot])
        q = edge_point(idx, e2[idx, slot])
        flip = cv[idx, (e1[idx, slot] + 1) % 4] > level
        p[flip], q[flip] = q[flip], p[flip].copy()
        segs.append(np.stack([p, q], axis=1))
    return np.concatenate(segs, axis=0)


def enclosed_area(segments: np.ndarray) -> float:
    """Area of the region bounded by oriented segments (interior on the left)."""
    if len(segments) == 0:
        return 0.0
    p, q = segments[:, 0], segments[:, 1]
    return 0.5 * math.fsum((p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]).tolist())


def segment_perimeter(segments: np.ndarray, norm: NormSpec) -> float:
    """``sum |seg| H(nu)``; ``H`` is 1-homogeneous so ``H(rot(q - p))`` suffices."""
    if len(segments) == 0:
        return 0.0
    d = segments[:, 1] - segments[:, 0]
    rot = np.stack([-d[:, 1], d[:, 0]], axis=1)
    return math.fsum(np.asarray(eval_norm(norm, rot)).tolist())


def _euclid_length(segments: np.ndarray) -> float:
    if len(segments) == 0:
        return 0.0
    return math.fsum(np.linalg.norm(segments[:, 1] - segments[:, 0], axis=1).tolist())


def pixel_perimeter(mask: np.ndarray, norm: NormSpec, spacing: float = 1.0) -> float:
    """Exact ``P_H`` of a union of grid cells: ``sum h H(e_k)`` over its boundary edges."""
    m = np.pad(np.asarray(mask, dtype=bool), 1)
    total = 0.0
    for k in range(m.ndim):
        count = int(np.count_nonzero(np.diff(m.astype(np.int8), axis=k)))
        e = np.zeros(m.ndim)
        e[k] = 1.0
        total += count * spacing ** (m.ndim - 1) * float(eval_norm(norm, e))
    return total


def anisotropic_perimeter_mask(
    mask: np.ndarray, norm: NormSpec, spacing: float = 1.0, mode: str = "contour", origin=(0.0, 0.0)
) -> float:
    """``P_H`` of a cell set.

    In ``contour`` mode the indicator is first smoothed by one pass of the
    ``[1, 2, 1] / 4`` kernel per axis and the ``1/2`` level line is traced.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 0.0
    if mode == "pixel":
        return pixel_perimeter(mask, norm, spacing)
    if mode != "contour":
        raise DomainError(f"unknown perimeter mode {mode!r}", "mode")
    if mask.ndim != 2:
        raise DomainError("contour perimeters are implemented for n = 2", "dimension")
    return segment_perimeter(contour_segments(smooth_indicator(mask), 0.5, origin, spacing), norm)


def smooth_indicator(mask: np.ndarray) -> np.ndarray:
    """One separable ``[1, 2, 1] / 4`` pass over the zero-padded indicator."""
    v = np.pad(np.asarray(mask, dtype=float), 1)
    v = 0.25 * v[:-2, :] + 0.5 * v[1:-1, :] + 0.25 * v[2:, :]
    v = np.pad(v, ((1, 1), (0, 0)))
    v = 0.25 * v[:, :-2] + 0.5 * v[:, 1:-1] + 0.25 * v[:, 2:]
    return v[1:-1, :]


@dataclass
class LevelSetGeometry:
    """Superlevel set ``{u > t}`` of a planar grid field."""

    threshold: float
    segments: np.ndarray
    measure: float
    perimeter_H: float
    perimeter_euclid: float


def level_set(f: GridField, t: float, norm: NormSpec) -> LevelSetGeometry:
    if f.ndim != 2:
        raise DomainError("level sets are traced for n = 2", "dimension")
    segs = contour_segments(f.values, t, f.origin, f.spacing)
    meas = int(np.count_nonzero(f.values[f.mask] > t)) * f.cell_measure
    return LevelSetGeometry(t, segs, meas, segment_perimeter(segs, norm), _euclid_length(segs))


# ---------------------------------------------------------------------------
# total variation


@dataclass
class VariationReport:
    """Variation quantities of ``u`` and its gradient rearrangement."""

    ac_tv: float
    singular_tv: float
    coarea_tv: float = math.nan
    l1_u: float = math.nan
    l1_ustar: float = math.nan
    tv_ustar: float = math.nan
    c0: float = math.nan
    omega_measure: float = math.nan
    spacing: float = math.nan
    checks: list[Check] = field(default_factory=list)

    @property
    def total_tv(self) -> float:
        return self.ac_tv + self.singular_tv

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def anisotropic_tv(u: BVComposite, norm: NormSpec) -> VariationReport:
    """``|Du|_H = h^n sum H(grad^a u) + M``."""
    g = gradient_density(u, norm)
    ac = math.fsum(g[u.field.mask].tolist()) * u.field.cell_measure
    M = singular_mass(u.jumps, norm) + u.extra_singular_mass
    return VariationReport(ac, M, spacing=u.field.spacing, omega_measure=u.field.measure)


def _levels(top: float, num_levels: int) -> tuple[np.ndarray, float]:
    if num_levels < 4:
        raise DomainError("need at least 4 levels", "too-few-levels")
    dt = top / num_levels
    return (np.arange(num_levels) + 0.5) * dt, dt


def _level_perimeters(f: GridField, norm: NormSpec, levels: np.ndarray, mode: str) -> np.ndarray:
    if mode == "contour":
        return np.array([segment_perimeter(contour_segments(f.values, t, f.origin, f.spacing), norm) for t in levels])
    if mode == "pixel":
        return np.array([pixel_perimeter(f.values > t, norm, f.spacing) for t in levels])
    raise DomainError(f"unknown perimeter mode {mode!r}", "mode")


def _relative_perimeters(f: GridField, norm: NormSpec, levels: np.ndarray, mode: str) -> np.ndarray:
    """``P_H({u > t}; Omega)``: boundary parts on ``∂Omega`` are dropped."""
    if f.ndim != 2 and mode == "contour":
        raise DomainError("contour perimeters are implemented for n = 2", "dimension")
    out = []
    if mode == "pixel":
        h = f.spacing
        for t in levels:
            above = f.values > t
            total = 0.0
            for k in range(f.ndim):
                a = [slice(None)] * f.ndim
                b = [slice(None)] * f.ndim
                a[k], b[k] = slice(None, -1), slice(1, None)
                both = f.mask[tuple(a)] & f.mask[tuple(b)]
                e = np.zeros(f.ndim)
                e[k] = 1.0
                cut = int(np.count_nonzero(both & (above[tuple(a)] != above[tuple(b)])))
                total += cut * h ** (f.ndim - 1) * float(eval_norm(norm, e))
            out.append(total)
        return np.array(out)
    if mode != "contour":
        raise DomainError(f"unknown perimeter mode {mode!r}", "mode")
    # keep segments whose interpolation cell has all four corners in Omega
    m = f.mask
    inner = m[:-1, :-1] & m[1:, :-1] & m[1:, 1:] & m[:-1, 1:]
    for t in levels:
        segs = contour_segments(f.values, t, f.origin, f.spacing)
        if len(segs) == 0:
            out.append(0.0)
            continue
        mid = 0.5 * (segs[:, 0] + segs[:, 1])
        idx = np.floor((mid - np.asarray(f.origin)) / f.spacing - 0.5).astype(int)
        ok = (idx[:, 0] >= 0) & (idx[:, 1] >= 0) & (idx[:, 0] < inner.shape[0]) & (idx[:, 1] < inner.shape[1])
        keep = np.zeros(len(segs), dtype=bool)
        keep[ok] = inner[idx[ok, 0], idx[ok, 1]]
        out.append(segment_perimeter(segs[keep], norm))
    return np.array(out)


def coarea_tv(
    f: GridField, norm: NormSpec, num_levels: int = 128, mode: str = "contour", region: str = "plane"
) -> float:
    """Midpoint rule for ``∫_0^{max u} P_H({u > t}) dt``.

    ``region="plane"`` measures perimeters of the zero extension in the whole
    plane, so a nonzero trace on ``∂Omega`` counts; ``region="omega"`` takes
    perimeters relative to ``Omega``.
    """
    if np.any(f.values < 0):
        raise DomainError("coarea needs a nonnegative field", "negative-values")
    if region not in ("plane", "omega"):
        raise DomainError(f"unknown region {region!r}", "region")
    top = float(f.values.max())
    if top == 0:
        return 0.0
    levels, dt = _levels(top, num_levels)
    if region == "omega":
        per = _relative_perimeters(f, norm, levels, mode)
    else:
        per = _level_perimeters(f, norm, levels, mode)
    return math.fsum(per.tolist()) * dt


class LevelTable:
    """Perimeters ``P_H({u > t_k})`` at midpoint levels, reused across thresholds."""

    def __init__(self, f: GridField, norm: NormSpec, num_levels: int = 128, mode: str = "contour") -> None:
        self.top = float(f.values.max())
        if self.top <= 0:
            self.levels, self.dt = np.zeros(0), 0.0
            self.perimeters = np.zeros(0)
            return
        self.levels, self.dt = _levels(self.top, num_levels)
        self.perimeters = _level_perimeters(f, norm, self.levels, mode)

    def integral_above(self, tau: float) -> float:
        """``∫_tau^{max u} P_H({u > t}) dt``, each level cell weighted by its overlap."""
        if len(self.levels) == 0:
            return 0.0
        lo = self.levels - 0.5 * self.dt
        hi = self.levels + 0.5 * self.dt
        w = np.clip(hi - np.maximum(lo, tau), 0.0, self.dt)
        return math.fsum((w * self.perimeters).tolist())


def _threshold(u: BVComposite, s: float) -> float:
    omega = u.field.measure
    if not (0.0 <= s <= omega * (1 + 1e-12)):
        raise DomainError(f"s = {s} outside [0, |Omega|]", "s-out-of-range")
    return float(decreasing_rearrangement(u.field)(min(s, omega)))


def compute_GH1(u: BVComposite, norm: NormSpec, s: float, density: np.ndarray | None = None) -> float:
    """``∫_{u > u*(s)} H(grad^a u) dx``."""
    tau = _threshold(u, s)
    g = gradient_density(u, norm) if density is None else density
    sel = u.field.mask & (u.field.values > tau)
    return math.fsum(g[sel].tolist()) * u.field.cell_measure


def compute_GH2(u: BVComposite, norm: NormSpec, s: float) -> float:
    """Jump part of ``|D v_s|_H`` for ``v_s = (u - u*(s))_+``.

    A jump with traces ``lower < upper`` contributes
    ``(upper - tau)_+ - (lower - tau)_+`` per unit ``H``-length.  The scalar
    ``extra_singular_mass`` has no trace information and is counted only at
    ``tau = 0``.
    """
    tau = _threshold(u, s)
    return _jump_part(u, norm, tau)


def _jump_part(u: BVComposite, norm: NormSpec, tau: float) -> float:
    total = 0.0
    if len(u.jumps):
        smp = jump_trace_samples(u.field, u.jumps)
        hnu = np.asarray(eval_norm(norm, u.jumps.normals))[smp.segment]
        amp = np.maximum(smp.upper - tau, 0.0) - np.maximum(smp.lower - tau, 0.0)
        total = math.fsum((amp * hnu * smp.weight).tolist())
    if tau <= 0:
        total += u.extra_singular_mass
    return total


def truncation_variation(
    u: BVComposite, norm: NormSpec, s: float, table: LevelTable | None = None, num_levels: int = 128
) -> tuple[float, float]:
    """``G(s)`` as ``(direct, level_integral)``.

    ``direct`` is ``|D v_s|_H`` for the truncation ``v_s = (u - u*(s))_+``
    (gradient of the truncated samples plus the truncated jumps);
    ``level_integral`` is ``∫_{u*(s)}^∞ P_H({u > t}) dt`` from contour
    perimeters.
    """
    tau = _threshold(u, s)
    f = u.field
    v = f.with_values(np.maximum(f.values - tau, 0.0))
    g = np.asarray(eval_norm(norm, ac_gradient(v, u.jumps)))
    ac = math.fsum(g[f.mask].tolist()) * f.cell_measure
    direct = ac + _jump_part(u, norm, tau)
    if table is None:
        table = LevelTable(f, norm, num_levels)
    return direct, table.integral_above(tau)


def iso_profile_integral(f: GridField, geom: WulffGeometry, tau: float) -> float:
    """``K(tau) = ∫_tau^{max u} n kappa^{1/n} mu(t)^{1 - 1/n} dt``.

    ``mu`` is a step function of ``t`` (constant between consecutive sample
    values), so the integral is summed exactly.
    """
    if tau < 0:
        raise DomainError("tau must be >= 0", "negative-level")
    n = geom.dimension
    prof = decreasing_rearrangement(f)
    vals = prof.values
    lower = np.concatenate([vals[1:], [min(0.0, vals[-1])]])
    # on [lower_i, vals_i) the distribution function equals breakpoints[i + 1]
    mu = prof.breakpoints[1:]
    length = np.clip(vals - np.maximum(lower, tau), 0.0, None)
    dens = n * geom.kappa ** (1.0 / n) * mu ** (1.0 - 1.0 / n)
    return math.fsum((dens * length).tolist())


def isoperimetric_deficit(
    mask: np.ndarray,
    norm: NormSpec,
    geom: WulffGeometry,
    spacing: float = 1.0,
    mode: str = "pixel",
    origin=(0.0, 0.0),
) -> float:
    """``P_H(E) - n kappa^{1/n} |E|^{1 - 1/n}``.

    Parameters
    ----------
    mask : ndarray
        Boolean cell set for ``pixel`` / ``contour`` modes.  In ``level``
        mode a real array ``phi`` of cell-centre samples with
        ``E = {phi > 0}``; the boundary is traced on ``phi`` itself, which
        keeps the sub-cell position of a smooth boundary, and ``|E|`` is the
        area enclosed by the traced polygon.
    mode : {"pixel", "contour", "level"}
    """
    arr = np.asarray(mask)
    n = arr.ndim
    if mode == "level":
        if n != 2:
            raise DomainError("level mode is implemented for n = 2", "dimension")
        segs = contour_segments(arr.astype(float), 0.0, origin, spacing)
        per = segment_perimeter(segs, norm)
        meas = enclosed_area(segs)
    else:
        inside = arr.astype(bool)
        per = anisotropic_perimeter_mask(inside, norm, spacing, mode, origin)
        meas = int(np.count_nonzero(inside)) * spacing**n
    return per - n * geom.kappa ** (1.0 / n) * meas ** (1.0 - 1.0 / n)


def polya_szego_sides(
    f: GridField, norm: NormSpec, geom: WulffGeometry, p: float = 2.0, num_levels: int = 128
) -> tuple[float, float]:
    """``(∫ H(grad u)^p, ∫ H(grad u#)^p)`` for a jump-free nonnegative field.

    The right side treats ``u#`` as linear in ``s`` between ``num_levels``
    equally spaced levels: a shell where ``u*`` falls by ``dt`` over measure
    ``ds`` contributes ``(dt/ds)^p ∫_shell (n kappa^{1/n} s^{1-1/n})^p ds``.
    In the plane the level measures are the areas enclosed by the traced
    contours, so ``ds`` carries no pixel-count noise.
    """
    n = geom.dimension
    g = np.asarray(eval_norm(norm, ac_gradient(f)))
    lhs = math.fsum((g[f.mask] ** p).tolist()) * f.cell_measure
    top = float(f.values.max())
    if top <= 0:
        return lhs, 0.0
    t = np.linspace(0.0, top, num_levels + 1)
    vals = np.sort(f.values[f.mask])
    mu = (len(vals) - np.searchsorted(vals, t, side="right")) * f.cell_measure
    if f.ndim == 2:
        # sub-cell level-set areas; cell counts make ds noisy when dt is small
        for k in range(1, num_levels):
            mu[k] = enclosed_area(contour_segments(f.values, t[k], f.origin, f.spacing))
        mu = np.minimum.accumulate(np.minimum(mu, mu[0]))
    mu[-1] = 0.0
    a = p * (1.0 - 1.0 / n) + 1.0
    c = (n * geom.kappa ** (1.0 / n)) ** p
    rhs = []
    carry = 0.0
    for k in range(num_levels):
        dt = t[k + 1] - t[k] + carry
        ds = mu[k] - mu[k + 1]
        if ds <= 0:
            carry = dt
            continue
        carry = 0.0
        shell = c * (mu[k] ** a - mu[k + 1] ** a) / a
        rhs.append((dt / ds) ** p * shell)
    return lhs, math.fsum(rhs)


# ---------------------------------------------------------------------------
# harness


def verify_main_theorem(
    u: BVComposite,
    norm: NormSpec,
    geom: WulffGeometry,
    num_levels: int = 128,
    tolerances: Tolerances | None = None,
) -> VariationReport:
    """Compare ``u`` with its gradient rearrangement and fill a report.

    Checks: the ``L^1`` inequality with slack ``10 h TV(u)``; preservation
    of the anisotropic total variation; ``c0 P_H(Omega*) = M``;
    monotonicity of the profile; and, when no scalar singular mass is
    present, the coarea value against ``|Du|_H``.
    """
    tol = tolerances or Tolerances()
    rep = anisotropic_tv(u, norm)
    f = u.field
    h = f.spacing
    sym = symmetrize_bv(u, norm, geom)
    prof = sym.profile
    assert isinstance(prof, GradientProfile)
    P_star = wulff_perimeter(geom, sym.R)
    rep.l1_u = f.integral()
    rep.l1_ustar = sym.l1_norm()
    rep.c0 = prof.c0
    rep.tv_ustar = prof.ac_variation() + prof.c0 * P_star
    tv = rep.total_tv
    exact = 1e-9 * max(1.0, tv)
    rep.checks.append(check_le("main_inequality", rep.l1_u, rep.l1_ustar, tol.disc(h, tv)))
    rep.checks.append(check_eq("tv_preservation", rep.tv_ustar, tv, exact))
    rep.checks.append(check_eq("boundary_constant", prof.c0 * P_star, rep.singular_tv, exact))
    mono = float(np.max(np.diff(prof.knot_values), initial=0.0))
    rep.checks.append(check_le("profile_nonincreasing", mono, 0.0, 0.0))
    if u.extra_singular_mass == 0:
        rep.coarea_tv = coarea_tv(f, norm, num_levels)
        rep.checks.append(check_eq("coarea", rep.coarea_tv, tv, tol.coarea(tv, h, tv)))
    return rep
