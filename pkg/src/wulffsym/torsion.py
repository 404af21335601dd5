"""Penalized torsion, insulation quotients and the Saint-Venant comparisons.

Grid discretisation (n = 2, cell-centred samples ``psi``):

``dirichlet`` scheme
    Forward differences on the zero-padded grid, one gradient per cell of
    the grid plus a ring on the low sides, so every link touching the
    domain is seen.  The optimiser keeps the boundary layer of the mask
    (cells with a 4-neighbour outside) at zero.
``interior`` scheme
    Forward differences, falling back to backward ones, using only links
    between two cells of the mask.  Used for the insulation quotient,
    where ``psi`` is free on the boundary.

Radial side: on a Wulff ball ``W_R`` a radial function ``phi(H°(x))``
satisfies ``H(grad) = |phi'|`` and ``dx = n kappa r^{n-1} dr``.  For a
fixed dead core ``W_{r0}`` the minimiser of the penalized energy is the
torsion function ``(R^2 - r^2) / (2n)`` truncated at height
``(R^2 - r0^2) / (2n)``; for ``n = 2`` this gives
``T = (kappa / 16) (R^2 - 8 Lambda)_+^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from matplotlib.path import Path as MplPath
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .anisotropy import NormSpec, WulffGeometry, eval_norm, grad_norm, wulff_boundary, wulff_perimeter, wulff_radius
from .errors import DomainError, InvalidArgumentError
from .fields import GridField, staircase_from_samples
from .optimize import projected_gradient
from .rearrange import GradientProfile
from .variation import Check, Tolerances, check_eq, check_le

__all__ = [
    "PolygonDomain",
    "RadialMinimizer",
    "TorsionReport",
    "square_domain",
    "wulff_domain",
    "polygon_domain",
    "grid_gradient",
    "eval_penalized_functional",
    "eval_insulation_functional",
    "zero_extension_jump",
    "radial_torsion_energy",
    "radial_torsion_minimizer",
    "radial_torsion_oracle",
    "radial_insulation_value",
    "radial_insulation_oracle",
    "minimize_penalized",
    "minimize_insulation",
    "rearranged_competitor_checks",
    "saint_venant_compare",
]

_ETA = 1e-8


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True, eq=False)
class PolygonDomain:
    """A polygon together with the cell mask of its interior."""

    polygon: np.ndarray
    mask: np.ndarray
    origin: tuple[float, float]
    spacing: float

    @property
    def measure(self) -> float:
        return int(np.count_nonzero(self.mask)) * self.spacing**2

    def field(self, values: np.ndarray) -> GridField:
        return GridField(np.where(self.mask, values, 0.0), self.mask, self.origin, self.spacing)

    def boundary_layer(self) -> np.ndarray:
        m = np.pad(self.mask, 1)
        inner = m[1:-1, 1:-1] & m[2:, 1:-1] & m[:-2, 1:-1] & m[1:-1, 2:] & m[1:-1, :-2]
        return self.mask & ~inner


def _polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _check_simple(poly: np.ndarray) -> None:
    k = len(poly)
    if k < 3 or abs(_polygon_area(poly)) == 0:
        raise DomainError("polygon must have at least 3 vertices and nonzero area", "degenerate-polygon")
    a = poly
    b = np.roll(poly, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    for i in range(k):
        j = np.arange(i + 2, k)
        if i == 0:
            j = j[j != k - 1]
        if len(j) == 0:
            continue
        o1 = orient(a[i], b[i], a[j])
        o2 = orient(a[i], b[i], b[j])
        o3 = orient(a[j], b[j], a[i])
        o4 = orient(a[j], b[j], b[i])
        if np.any((o1 * o2 <= 0) & (o3 * o4 <= 0)):
            raise DomainError("polygon is not simple", "polygon-not-simple")
    if np.any(np.linalg.norm(b - a, axis=1) == 0):
        raise DomainError("polygon has a repeated vertex", "polygon-not-simple")


def polygon_domain(vertices, cells: int = 64) -> PolygonDomain:
    """Grid the bounding box with ``cells`` cells along its longer side."""
    poly = np.asarray(vertices, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2:
        raise InvalidArgumentError("polygon vertices must be an (k, 2) array", "shape")
    _check_simple(poly)
    if _polygon_area(poly) < 0:
        poly = poly[::-1].copy()
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    h = float((hi - lo).max()) / cells
    dims = tuple(int(math.ceil((hi[k] - lo[k]) / h - 1e-9)) for k in range(2))
    centers = np.stack(GridField.cell_centers_for(dims, tuple(lo), h), axis=-1)
    mask = MplPath(poly).contains_points(centers.reshape(-1, 2)).reshape(dims)
    if not mask.any():
        raise DomainError("polygon contains no cell centres", "zero-measure")
    return PolygonDomain(poly, mask, (float(lo[0]), float(lo[1])), h)


def square_domain(side: float = 1.0, cells: int = 64) -> PolygonDomain:
    if not side > 0:
        raise DomainError("square side must be positive", "side")
    return polygon_domain([[0, 0], [side, 0], [side, side], [0, side]], cells)


def wulff_domain(norm: NormSpec, R: float, cells: int = 64, num: int = 256) -> PolygonDomain:
    return polygon_domain(wulff_boundary(norm, R, num), cells)


# ---------------------------------------------------------------------------
# discrete gradients and their adjoints


def _dirichlet_grad(psi: np.ndarray, h: float) -> np.ndarray:
    P = np.pad(psi, 1)
    gx = (P[1:, :] - P[:-1, :])[:, :-1] / h
    gy = (P[:, 1:] - P[:, :-1])[:-1, :] / h
    return np.stack([gx, gy], axis=-1)


def _dirichlet_adjoint(G: np.ndarray, h: float) -> np.ndarray:
    """Transpose of :func:`_dirichlet_grad`."""
    nx, ny = G.shape[0] - 1, G.shape[1] - 1
    P = np.zeros((nx + 2, ny + 2))
    P[1:, :-1] += G[..., 0] / h
    P[:-1, :-1] -= G[..., 0] / h
    P[:-1, 1:] += G[..., 1] / h
    P[:-1, :-1] -= G[..., 1] / h
    return P[1:-1, 1:-1]


def _interior_links(mask: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per axis: (uses_forward, uses_backward) cell selectors."""
    out = []
    for k in range(2):
        ok = (mask[:-1, :] & mask[1:, :]) if k == 0 else (mask[:, :-1] & mask[:, 1:])
        fwd = np.zeros_like(mask)
        bwd = np.zeros_like(mask)
        if k == 0:
            fwd[:-1, :] = ok
            bwd[1:, :] = ok
        else:
            fwd[:, :-1] = ok
            bwd[:, 1:] = ok
        out.append((fwd, bwd & ~fwd))
    return out


def _interior_grad(psi: np.ndarray, mask: np.ndarray, h: float, links=None) -> np.ndarray:
    links = links or _interior_links(mask)
    G = np.zeros(psi.shape + (2,))
    for k, (fwd, bwd) in enumerate(links):
        d = np.diff(psi, axis=k) / h
        f = np.zeros_like(psi)
        b = np.zeros_like(psi)
        if k == 0:
            f[:-1, :] = d
            b[1:, :] = d
        else:
            f[:, :-1] = d
            b[:, 1:] = d
        G[..., k] = np.where(fwd, f, np.where(bwd, b, 0.0))
    return G


def _interior_adjoint(G: np.ndarray, mask: np.ndarray, h: float, links=None) -> np.ndarray:
    links = links or _interior_links(mask)
    out = np.zeros(mask.shape)
    for k, (fwd, bwd) in enumerate(links):
        gf = np.where(fwd, G[..., k], 0.0) / h
        gb = np.where(bwd, G[..., k], 0.0) / h
        if k == 0:
            # forward at c uses (c+1) - c ; backward at c uses c - (c-1)
            out[1:, :] += gf[:-1, :]
            out[:-1, :] -= gf[:-1, :]
            out[1:, :] += gb[1:, :]
            out[:-1, :] -= gb[1:, :]
        else:
            out[:, 1:] += gf[:, :-1]
            out[:, :-1] -= gf[:, :-1]
            out[:, 1:] += gb[:, 1:]
            out[:, :-1] -= gb[:, 1:]
    return out


def grid_gradient(psi: GridField, scheme: str = "dirichlet") -> tuple[np.ndarray, np.ndarray]:
    """Per-cell discrete gradients and the cells they belong to.

    Returns ``(G, support)`` with ``G`` of shape ``(..., 2)``.  For the
    ``dirichlet`` scheme the arrays cover the grid plus one ring of cells on
    the low sides; ``support`` marks the cells of the domain.
    """
    if psi.ndim != 2:
        raise DomainError("torsion grids are planar", "dimension")
    if scheme == "dirichlet":
        G = _dirichlet_grad(psi.values, psi.spacing)
        # G[i, j] belongs to cell (i - 1, j - 1); row/column 0 is the ring
        support = np.pad(psi.mask, ((1, 0), (1, 0)))
        return G, support
    if scheme == "interior":
        return _interior_grad(psi.values, psi.mask, psi.spacing), psi.mask.copy()
    raise DomainError(f"unknown scheme {scheme!r}", "scheme")


def _sq_norm_and_grad(norm: NormSpec, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``H(V)^2`` and a (sub)gradient ``2 H(V) dH(V)`` for rows of ``V``."""
    Hv = np.asarray(eval_norm(norm, V))
    D = np.zeros_like(V)
    nz = Hv > 0
    if not nz.any():
        return Hv**2, D
    W = V[nz]
    if norm.is_smooth:
        dH = grad_norm(norm, W)
    elif norm.kind == "pnorm" and norm.p == 1.0:
        dH = np.sign(W)
    elif norm.kind == "pnorm":
        dH = np.zeros_like(W)
        k = np.argmax(np.abs(W), axis=-1)
        r = np.arange(len(W))
        dH[r, k] = np.sign(W[r, k])
    else:
        Dm = norm._D
        dH = Dm[np.argmax(W @ Dm.T, axis=-1)]
    D[nz] = 2.0 * Hv[nz, None] * dH
    return Hv**2, D


# ---------------------------------------------------------------------------
# boundary trace


def _trace_weights(
    mask: np.ndarray, origin, h: float, polygon: np.ndarray, norm: NormSpec, samples_per_edge: int
) -> np.ndarray:
    """Cell weights ``c`` with ``∫_{∂Omega} psi H(nu) dH^1 = sum c * psi``.

    Trapezoid rule along each edge; the trace is the bilinear interpolant
    of the cell values, renormalised over the cells of the mask and clamped
    to the grid.
    """
    poly = np.asarray(polygon, dtype=float)
    nxy = np.asarray(mask.shape)
    W = np.zeros(mask.shape)
    t = np.linspace(0.0, 1.0, samples_per_edge)
    tw = np.full(samples_per_edge, 1.0 / (samples_per_edge - 1))
    tw[[0, -1]] *= 0.5
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        d = b - a
        length = float(np.hypot(*d))
        hnu = float(eval_norm(norm, np.array([-d[1], d[0]]))) / length
        pts = a[None, :] + t[:, None] * d[None, :]
        q = (pts - np.asarray(origin)) / h - 0.5
        i0 = np.floor(q).astype(int)
        fr = q - i0
        corners = []
        for di in (0, 1):
            for dj in (0, 1):
                ii = np.clip(i0[:, 0] + di, 0, nxy[0] - 1)
                jj = np.clip(i0[:, 1] + dj, 0, nxy[1] - 1)
                wx = fr[:, 0] if di else 1 - fr[:, 0]
                wy = fr[:, 1] if dj else 1 - fr[:, 1]
                corners.append((ii, jj, wx * wy * mask[ii, jj]))
        tot = sum(c[2] for c in corners)
        tot = np.where(tot > 0, tot, 1.0)
        for ii, jj, w in corners:
            np.add.at(W, (ii, jj), w / tot * tw * length * hnu)
    return W


def zero_extension_jump(psi: GridField, norm: NormSpec, polygon=None, samples_per_edge: int = 64) -> float:
    """``∫_{∂Omega} |psi| H(nu) dH^1``: the singular mass of the zero extension.

    ``polygon`` defaults to the outer rectangle of the grid.
    """
    if psi.ndim != 2:
        raise DomainError("zero_extension_jump is planar", "dimension")
    if polygon is None:
        ox, oy = psi.origin
        ex, ey = ox + psi.dims[0] * psi.spacing, oy + psi.dims[1] * psi.spacing
        polygon = [[ox, oy], [ex, oy], [ex, ey], [ox, ey]]
    poly = np.asarray(polygon, dtype=float)
    _check_simple(poly)
    W = _trace_weights(psi.mask, psi.origin, psi.spacing, poly, norm, samples_per_edge)
    return math.fsum((W * np.abs(psi.values)).ravel().tolist())


# ---------------------------------------------------------------------------
# functionals


def _eta(Hv: np.ndarray) -> float:
    return _ETA * max(1.0, float(Hv.max(initial=0.0)))


def eval_penalized_functional(psi: GridField, norm: NormSpec, Lambda: float) -> float:
    """``1/2 ∫ H(grad psi)^2 - ∫ psi + Lambda |{H(grad psi) != 0}|`` (dirichlet scheme)."""
    if not (Lambda >= 0 and math.isfinite(Lambda)):
        raise DomainError("Lambda must be >= 0", "negative-lambda")
    G, _ = grid_gradient(psi, "dirichlet")
    Hv = np.asarray(eval_norm(norm, G))
    cm = psi.cell_measure
    energy = 0.5 * math.fsum((Hv**2).ravel().tolist()) * cm
    mass = math.fsum(psi.values[psi.mask].tolist()) * cm
    support = int(np.count_nonzero(Hv > _eta(Hv))) * cm
    return energy - mass + Lambda * support


def eval_insulation_functional(
    psi: GridField, norm: NormSpec, m: float, polygon=None, samples_per_edge: int = 64
) -> float:
    """``[∫ H(grad psi)^2 + (1/m)(∫_{∂Omega}|psi| H(nu))^2] / (∫|psi|)^2`` (interior scheme)."""
    if not (m > 0 and math.isfinite(m)):
        raise DomainError("m must be positive", "m-out-of-range")
    l1 = psi.integral()
    if l1 == 0:
        raise DomainError("psi must not vanish identically", "zero-function")
    G, sup = grid_gradient(psi, "interior")
    Hv = np.asarray(eval_norm(norm, G))[sup]
    energy = math.fsum((Hv**2).tolist()) * psi.cell_measure
    bnd = zero_extension_jump(psi, norm, polygon, samples_per_edge)
    return (energy + bnd**2 / m) / l1**2


# ---------------------------------------------------------------------------
# radial problems


def _check_radial(R: float, Lambda: float) -> None:
    if not (R > 0 and math.isfinite(R)):
        raise DomainError("R must be positive", "radius")
    if not (Lambda >= 0 and math.isfinite(Lambda)):
        raise DomainError("Lambda must be >= 0", "negative-lambda")


def radial_torsion_energy(geom: WulffGeometry, R: float, Lambda: float, r0: float, grid_m: int = 1025) -> float:
    """Penalized energy of the truncated torsion profile with dead core ``W_{r0}``.

    The annulus integral ``∫_{r0}^R [phi'^2/2 - phi] n kappa r^{n-1} dr`` uses
    composite Simpson on ``grid_m`` points; the core adds
    ``-phi(r0) kappa r0^n``.
    """
    n, kappa = geom.dimension, geom.kappa
    if r0 >= R:
        return 0.0
    r = np.linspace(r0, R, grid_m | 1)
    phi = (R * R - r * r) / (2 * n)
    dphi = -r / n
    integrand = (0.5 * dphi**2 - phi) * n * kappa * r ** (n - 1)
    core = -((R * R - r0 * r0) / (2 * n)) * kappa * r0**n
    return float(simpson(integrand, x=r)) + core + Lambda * kappa * (R**n - r0**n)


@dataclass(frozen=True)
class RadialMinimizer:
    """Radial minimiser ``v(x) = phi(H°(x))`` of the penalized energy on ``W_R``."""

    geometry: WulffGeometry
    R: float
    Lambda: float
    dead_core_radius: float
    functional_value: float
    fallback_used: bool = False

    @property
    def torsion(self) -> float:
        """``T_F(W_R, Lambda) = -min``."""
        return 0.0 - self.functional_value

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        n, R, r0 = self.geometry.dimension, self.R, self.dead_core_radius
        out = (R * R - np.maximum(r, r0) ** 2) / (2 * n)
        out = np.where(r >= R, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        n = self.geometry.dimension
        out = np.where((r > self.dead_core_radius) & (r < self.R), -r / n, 0.0)
        return float(out) if out.ndim == 0 else out


def _unimodal(vals: np.ndarray) -> bool:
    k = int(np.argmin(vals))
    scale = 1e-12 * max(1.0, float(np.abs(vals).max()))
    return bool(np.all(np.diff(vals[: k + 1]) <= scale) and np.all(np.diff(vals[k:]) >= -scale))


def radial_torsion_minimizer(
    geom: WulffGeometry, R: float, Lambda: float, grid_m: int = 1025
) -> RadialMinimizer:
    """Minimise the penalized energy over dead-core radii ``r0 in [0, R]``.

    A bounded scalar search locates ``r0`` to ``1e-6 R``.  If a coarse scan
    is not unimodal, a dense scan of 4096 radii is used instead and
    ``fallback_used`` is set.
    """
    _check_radial(R, Lambda)
    if grid_m < 64:
        raise DomainError("grid_m must be >= 64", "grid-too-small")

    def E(r0: float) -> float:
        return radial_torsion_energy(geom, R, Lambda, r0, grid_m)

    scan = np.linspace(0.0, R, 65)
    vals = np.array([E(r) for r in scan])
    fallback = not _unimodal(vals)
    if fallback:
        dense = np.linspace(0.0, R, 4096)
        dv = np.array([E(r) for r in dense])
        k = int(np.argmin(dv))
        r_best, v_best = float(dense[k]), float(dv[k])
    else:
        k = int(np.argmin(vals))
        lo, hi = scan[max(k - 1, 0)], scan[min(k + 1, len(scan) - 1)]
        res = minimize_scalar(E, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6 * R})
        r_best, v_best = float(res.x), float(res.fun)
        for r_end in (lo, hi):
            v_end = E(r_end)
            if v_end < v_best:
                r_best, v_best = float(r_end), v_end
    if v_best >= 0.0:
        r_best, v_best = R, 0.0
    return RadialMinimizer(geom, float(R), float(Lambda), r_best, v_best, fallback)


def _radial_grid(R: float, K: int, n: int, kappa: float):
    r = np.linspace(0.0, R, K + 1)
    dr = R / K
    mid = 0.5 * (r[1:] + r[:-1])
    # exact shell measures for links and trapezoid-like node weights
    link_w = kappa * (r[1:] ** n - r[:-1] ** n)
    node_w = np.zeros(K + 1)
    node_w[:-1] += 0.5 * link_w
    node_w[1:] += 0.5 * link_w
    return r, dr, mid, link_w, node_w


def _tied_quadratic_min(
    energy_grad: Callable[[np.ndarray], tuple[float, np.ndarray]], groups: np.ndarray, size: int, x0=None
) -> tuple[float, np.ndarray]:
    """Minimise ``f(phi)`` over ``phi >= 0`` with ``phi[i] = x[groups[i]]``."""

    def fun(x):
        phi = x[groups]
        v, g = energy_grad(phi)
        return v, np.bincount(groups, weights=g, minlength=size)

    start = np.zeros(size) if x0 is None else x0
    res = projected_gradient(fun, start, lower=0.0, max_iter=20000, tol=1e-12)
    return res.value, res.x[groups]


def radial_torsion_oracle(geom: WulffGeometry, R: float, Lambda: float, K: int = 256, cores: int = 12) -> float:
    """``T_F(W_R, Lambda)`` by direct minimisation over sampled radial profiles.

    Profiles are piecewise linear on ``K`` equal intervals with
    ``phi(R) = 0``.  For ``Lambda > 0`` the dead core is searched over
    ``cores`` node indices, tying the profile to one value on the core.
    """
    _check_radial(R, Lambda)
    n, kappa = geom.dimension, geom.kappa
    r, dr, mid, link_w, node_w = _radial_grid(R, K, n, kappa)

    def energy_grad(phi_free: np.ndarray) -> tuple[float, np.ndarray]:
        phi = np.append(phi_free, 0.0)
        d = np.diff(phi) / dr
        v = 0.5 * float(np.dot(d * d, link_w)) - float(np.dot(phi, node_w))
        gl = d * link_w / dr
        g = -node_w.copy()
        g[:-1] -= gl
        g[1:] += gl
        return v, g[:-1]

    best = 0.0
    core_idx = [0] if Lambda == 0 else sorted(set(np.linspace(0, K - 1, cores).astype(int).tolist()))
    for j in core_idx:
        groups = np.concatenate([np.zeros(j + 1, dtype=int), np.arange(1, K - j)])
        val, _ = _tied_quadratic_min(energy_grad, groups, K - j)
        val += Lambda * kappa * (R**n - r[j] ** n)
        best = min(best, val)
    return -best


def radial_insulation_value(geom: WulffGeometry, R: float, m: float) -> float:
    """``T_G(W_R, m) = m R^2 / n^2 + kappa R^{n+2} / (n (n+2))``.

    The optimal profile is ``a + b (R^2 - r^2)``; its constant trace ``a``
    is the boundary value of the rearranged competitor.
    """
    if not (m > 0 and R > 0):
        raise DomainError("need m > 0 and R > 0", "m-out-of-range")
    n, kappa = geom.dimension, geom.kappa
    return m * R * R / n**2 + kappa * R ** (n + 2) / (n * (n + 2))


def radial_insulation_oracle(geom: WulffGeometry, R: float, m: float, K: int = 256) -> float:
    """``T_G(W_R, m)`` from a discretised radial problem.

    ``1/T_G = min Q / L^2`` with ``Q`` the energy plus boundary term and
    ``L`` the mass; equivalently ``T_G = -min (Q - 2L)`` over ``phi >= 0``.
    """
    if not (m > 0 and R > 0):
        raise DomainError("need m > 0 and R > 0", "m-out-of-range")
    n, kappa = geom.dimension, geom.kappa
    r, dr, mid, link_w, node_w = _radial_grid(R, K, n, kappa)
    P = wulff_perimeter(geom, R)

    def fun(phi: np.ndarray) -> tuple[float, np.ndarray]:
        d = np.diff(phi) / dr
        gl = 2.0 * d * link_w / dr
        g = np.zeros_like(phi)
        g[:-1] -= gl
        g[1:] += gl
        g[-1] += 2.0 * P * P * phi[-1] / m
        g -= 2.0 * node_w
        v = float(np.dot(d * d, link_w)) + (P * phi[-1]) ** 2 / m - 2.0 * float(np.dot(phi, node_w))
        return v, g

    res = projected_gradient(fun, np.zeros(K + 1), lower=0.0, max_iter=50000, tol=1e-13)
    return -res.value


# ---------------------------------------------------------------------------
# grid minimisation


@dataclass
class GridSolution:
    psi: GridField
    value: float
    converged: bool
    diverged: bool = False


def _penalized_smooth(dom: PolygonDomain, norm: NormSpec, free: np.ndarray):
    h = dom.spacing
    cm = h * h
    shape = dom.mask.shape

    def fun(psi_free_full: np.ndarray) -> tuple[float, np.ndarray]:
        psi = np.zeros(shape)
        psi[free] = psi_free_full
        G = _dirichlet_grad(psi, h)
        sq, dsq = _sq_norm_and_grad(norm, G.reshape(-1, 2))
        v = 0.5 * float(sq.sum()) * cm - float(psi_free_full.sum()) * cm
        g = _dirichlet_adjoint(0.5 * dsq.reshape(G.shape), h) * cm
        return v, g[free] - cm

    return fun


def minimize_penalized(
    dom: PolygonDomain, norm: NormSpec, Lambda: float, trials: int = 2, seed: int = 0, levels: int = 12
) -> list[GridSolution]:
    """Upper bounds for ``inf F_Lambda`` on the domain, one per trial.

    Each trial starts from a random nonnegative field and minimises the
    smooth part (``Lambda = 0``).  For ``Lambda > 0`` the plateau candidates
    ``min(psi0, c)`` are polished with the plateau tied to one value and the
    best full objective is kept; ``psi = 0`` is always a candidate.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1", "trials")
    if not (Lambda >= 0 and math.isfinite(Lambda)):
        raise DomainError("Lambda must be >= 0", "negative-lambda")
    rng = np.random.default_rng(seed)
    free = dom.mask & ~dom.boundary_layer()
    nfree = int(np.count_nonzero(free))
    out = []
    zero = dom.field(np.zeros(dom.mask.shape))
    for _ in range(trials):
        if nfree == 0:
            out.append(GridSolution(zero, 0.0, True))
            continue
        smooth = _penalized_smooth(dom, norm, free)
        res = projected_gradient(smooth, rng.random(nfree) * 0.1, lower=0.0, max_iter=20000, tol=1e-9)
        if res.diverged:
            out.append(GridSolution(zero, 0.0, False, diverged=True))
            continue
        psi0 = np.zeros(dom.mask.shape)
        psi0[free] = res.x
        best_psi, best_val = zero, 0.0
        cand = dom.field(psi0)
        val = eval_penalized_functional(cand, norm, Lambda)
        if val < best_val:
            best_psi, best_val = cand, val
        if Lambda > 0:
            top = float(res.x.max())
            for c in top * np.arange(1, levels) / levels:
                plateau = res.x >= c
                groups = np.where(plateau, 0, 1 + np.cumsum(~plateau) - 1)
                size = 1 + int(np.count_nonzero(~plateau))
                x0 = np.zeros(size)
                x0[0] = c
                x0[1:] = res.x[~plateau]

                def fun(x, groups=groups, size=size):
                    v, g = smooth(x[groups])
                    return v, np.bincount(groups, weights=g, minlength=size)

                pr = projected_gradient(fun, x0, lower=0.0, max_iter=5000, tol=1e-8)
                psi = np.zeros(dom.mask.shape)
                psi[free] = pr.x[groups]
                cand = dom.field(psi)
                val = eval_penalized_functional(cand, norm, Lambda)
                if val < best_val:
                    best_psi, best_val = cand, val
        out.append(GridSolution(best_psi, best_val, res.converged))
    return out


def minimize_insulation(
    dom: PolygonDomain, norm: NormSpec, m: float, trials: int = 2, seed: int = 0, samples_per_edge: int = 64
) -> list[GridSolution]:
    """Upper bounds for ``inf G_m`` on the domain, one per trial.

    Uses ``inf Q / L^2 = 1 / max(-(Q - 2L))`` over ``psi >= 0``; ``value``
    is the quotient of the field found.
    """
    if not (m > 0 and math.isfinite(m)):
        raise DomainError("m must be positive", "m-out-of-range")
    rng = np.random.default_rng(seed)
    h = dom.spacing
    cm = h * h
    mask = dom.mask
    links = _interior_links(mask)
    c = _trace_weights(mask, dom.origin, h, dom.polygon, norm, samples_per_edge)[mask]

    def fun(x: np.ndarray) -> tuple[float, np.ndarray]:
        psi = np.zeros(mask.shape)
        psi[mask] = x
        G = _interior_grad(psi, mask, h, links)
        sq, dsq = _sq_norm_and_grad(norm, G[mask])
        full = np.zeros(G.shape)
        full[mask] = dsq
        b = float(np.dot(c, x))
        v = float(sq.sum()) * cm + b * b / m - 2.0 * float(x.sum()) * cm
        g = _interior_adjoint(full, mask, h, links)[mask] * cm + 2.0 * b * c / m - 2.0 * cm
        return v, g

    out = []
    for _ in range(trials):
        res = projected_gradient(fun, rng.random(int(mask.sum())), lower=0.0, max_iter=20000, tol=1e-9)
        vals = np.zeros(mask.shape)
        vals[mask] = res.x
        psi = dom.field(vals)
        if res.diverged or psi.integral() == 0:
            out.append(GridSolution(psi, math.inf, False, diverged=True))
            continue
        q = eval_insulation_functional(psi, norm, m, dom.polygon, samples_per_edge)
        out.append(GridSolution(psi, q, res.converged))
    return out


# ---------------------------------------------------------------------------
# rearranged competitors and the comparison harness


def rearranged_competitor_checks(
    psi: GridField,
    norm: NormSpec,
    geom: WulffGeometry,
    polygon,
    scheme: str,
    tolerances: Tolerances | None = None,
    prefix: str = "",
) -> list[Check]:
    """Relations between ``psi`` and its gradient rearrangement ``psi*``.

    ``g = H(grad psi)`` on the domain cells and ``M`` the boundary mass of
    the zero extension.  Checked: equal Dirichlet energy (staircase level),
    ``c0 P_H(Omega*) = M``, equal gradient-support measure, and
    ``||psi||_1 <= ||psi*||_1 + 10 h TV``.
    """
    tol = tolerances or Tolerances()
    G, support = grid_gradient(psi, scheme)
    g = np.asarray(eval_norm(norm, G))[support]
    cm = psi.cell_measure
    M = zero_extension_jump(psi, norm, polygon)
    gstar = staircase_from_samples(g, cm, increasing=True)
    prof = GradientProfile(gstar, M, geom)
    rec = prof.gradient_staircase()
    e_psi = math.fsum((g**2).tolist()) * cm
    e_star = rec.integral(lambda v: v**2)
    R = wulff_radius(geom, psi.measure)
    P = wulff_perimeter(geom, R)
    eta = _eta(g)
    meas_psi = int(np.count_nonzero(g > eta)) * cm
    meas_star = rec.distribution(eta)
    tv = math.fsum(g.tolist()) * cm + M
    l1 = psi.integral()
    exact = 1e-9
    return [
        check_eq(prefix + "energy_equality", e_star, e_psi, exact * max(1.0, e_psi)),
        check_eq(prefix + "boundary_equality", prof.c0 * P, M, exact * max(1.0, M)),
        check_eq(prefix + "support_equality", meas_star, meas_psi, exact * max(1.0, meas_psi)),
        check_le(prefix + "l1_inequality", l1, prof.integral(), tol.disc(psi.spacing, tv)),
    ]


@dataclass
class TorsionReport:
    mode: str
    parameter: float
    T_omega: float
    T_star: float
    omega_measure: float
    R_star: float
    dead_core_radius: float = math.nan
    fallback_used: bool = False
    trials_run: int = 0
    trials_discarded: int = 0
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def saint_venant_compare(
    dom: PolygonDomain,
    norm: NormSpec,
    geom: WulffGeometry,
    mode: str,
    parameter: float,
    trials: int = 2,
    seed: int = 0,
    tolerances: Tolerances | None = None,
) -> TorsionReport:
    """Compare the grid value on ``Omega`` with the radial value on ``Omega*``.

    ``T_omega`` is the value attained by the best grid field (a lower bound
    for the true ``T`` on ``Omega``); ``T_star`` is the radial value on the
    Wulff ball of equal measure.  Discarded (diverged) trials are counted
    and skipped.
    """
    tol = tolerances or Tolerances()
    if mode not in ("penalized", "insulation"):
        raise DomainError(f"unknown mode {mode!r}", "mode")
    omega = dom.measure
    R = wulff_radius(geom, omega)
    if mode == "penalized":
        sols = minimize_penalized(dom, norm, parameter, trials, seed)
        rad = radial_torsion_minimizer(geom, R, parameter)
        T_star, r0, fb = rad.torsion, rad.dead_core_radius, rad.fallback_used
        scheme = "dirichlet"
    else:
        sols = minimize_insulation(dom, norm, parameter, trials, seed)
        T_star, r0, fb = radial_insulation_value(geom, R, parameter), math.nan, False
        scheme = "interior"
    kept = [s for s in sols if not s.diverged]
    if mode == "penalized":
        T_omega = max([0.0 - s.value for s in kept], default=0.0)
    else:
        T_omega = max([1.0 / s.value for s in kept if s.value > 0], default=0.0)
    rep = TorsionReport(mode, parameter, T_omega, T_star, omega, R, r0, fb, len(sols), len(sols) - len(kept))
    rep.checks.append(check_le("saint_venant", T_omega, T_star, tol.scale * 1e-6))
    for k, s in enumerate(kept):
        if s.psi.integral() == 0:
            continue
        rep.checks.extend(
            rearranged_competitor_checks(s.psi, norm, geom, dom.polygon, scheme, tol, prefix=f"trial{k}_")
        )
    return rep
