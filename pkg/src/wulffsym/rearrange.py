"""Wulff-radial symmetrizations and the gradient rearrangement ``u*``-star.

Every symmetrized function has the form ``x -> profile(kappa_n H°(x)^n)``
on the Wulff ball ``Omega* = W_R`` with ``kappa_n R^n = |Omega|`` and is
zero outside it.  Two profile kinds occur:

* the plain rearrangements ``u*`` / ``u_*`` (a :class:`StaircaseProfile`);
* the gradient rearrangement, whose profile is built in closed form from
  the increasing rearrangement ``g_*`` of ``H(grad^a u)`` and the singular
  mass ``M`` (a :class:`GradientProfile`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .anisotropy import NormSpec, WulffGeometry, eval_norm, eval_polar, wulff_radius
from .errors import DomainError
from .fields import (
    BVComposite,
    GridField,
    JumpSet,
    StaircaseProfile,
    ac_gradient,
    atomic_write_text,
    decreasing_rearrangement,
    increasing_rearrangement,
    staircase_from_samples,
)

__all__ = [
    "GradientProfile",
    "SymmetrizedFunction",
    "anisotropic_symmetrization",
    "singular_mass",
    "gradient_symmetrization",
    "gradient_density",
    "symmetrize_bv",
    "write_profile",
    "wulff_grid",
]


class GradientProfile:
    """Nonincreasing profile ``s -> ∫_s^{|Omega|} g_*(t) / (n kappa^{1/n} t^{1-1/n}) dt + c0``.

    Each staircase piece ``(t1, t2, v)`` of ``g_*`` contributes
    ``v (t2^{1/n} - t1^{1/n}) / kappa^{1/n}``, so evaluation and integrals
    are exact; ``g_*`` is bounded, so the value at ``s = 0`` is finite.

    Parameters
    ----------
    gstar : StaircaseProfile
        Nondecreasing, nonnegative staircase on ``[0, |Omega|]``.
    M : float
        Singular mass ``|D^s u|_H``.
    geometry : WulffGeometry
    """

    increasing = False

    def __init__(self, gstar: StaircaseProfile, M: float, geometry: WulffGeometry) -> None:
        if not gstar.increasing:
            raise DomainError("g_* must be a nondecreasing staircase", "not-monotone")
        if np.any(np.diff(gstar.values) < 0):
            raise DomainError("g_* must be nondecreasing", "not-monotone")
        if np.any(gstar.values < 0):
            raise DomainError("g_* must be nonnegative", "negative-values")
        if not (M >= 0 and math.isfinite(M)):
            raise DomainError("singular mass must be finite and >= 0", "negative-mass")
        self.gstar = gstar
        self.M = float(M)
        self.geometry = geometry
        n = geometry.dimension
        kappa = geometry.kappa
        self.omega_measure = gstar.measure
        self.c0 = self.M / (n * kappa ** (1.0 / n) * self.omega_measure ** (1.0 - 1.0 / n))
        t = gstar.breakpoints
        self._root = t ** (1.0 / n)
        self._drops = gstar.values * np.diff(self._root) / kappa ** (1.0 / n)
        # tail[i] = sum of the contributions of pieces i, i+1, ...
        self._tail = np.concatenate([np.cumsum(self._drops[::-1])[::-1], [0.0]])

    @property
    def breakpoints(self) -> np.ndarray:
        return self.gstar.breakpoints

    @property
    def measure(self) -> float:
        return self.omega_measure

    @property
    def knot_values(self) -> np.ndarray:
        """Profile values at the breakpoints; the last one is ``c0``."""
        return self._tail + self.c0

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0):
            raise DomainError("profile argument must be >= 0", "negative-argument")
        n = self.geometry.dimension
        t = self.gstar.breakpoints
        k = len(self.gstar.values)
        idx = np.clip(np.searchsorted(t, s_arr, side="right") - 1, 0, k - 1)
        part = self.gstar.values[idx] * (self._root[idx + 1] - s_arr ** (1.0 / n))
        out = self._tail[idx + 1] + part / self.geometry.kappa ** (1.0 / n) + self.c0
        out = np.where(s_arr >= self.omega_measure, 0.0, out)
        return float(out) if np.ndim(out) == 0 else out

    def integral(self) -> float:
        """``∫_0^{|Omega|} profile(s) ds`` in closed form."""
        n = self.geometry.dimension
        a = 1.0 + 1.0 / n
        t = self.gstar.breakpoints
        pieces = self.gstar.values * np.diff(t**a) / a
        scale = n * self.geometry.kappa ** (1.0 / n)
        return math.fsum((pieces / scale).tolist()) + self.c0 * self.omega_measure

    def gradient_staircase(self) -> StaircaseProfile:
        """``H(grad u*)`` as a function of ``s``, recovered from the profile drops.

        On piece ``(t1, t2)`` the profile falls by
        ``(P(t1) - P(t2))``; dividing by ``(t2^{1/n} - t1^{1/n}) / kappa^{1/n}``
        returns the constant gradient norm carried by that shell.
        """
        knots = self.knot_values
        drop = knots[:-1] - knots[1:]
        g = drop * self.geometry.kappa ** (1.0 / self.geometry.dimension) / np.diff(self._root)
        g = np.maximum.accumulate(np.maximum(g, 0.0))
        return StaircaseProfile(self.gstar.breakpoints, g, increasing=True)

    def ac_variation(self) -> float:
        """``∫_{Omega*} H(grad u*) dx`` computed from the profile drops."""
        return self.gradient_staircase().integral()


@dataclass(frozen=True, eq=False)
class SymmetrizedFunction:
    """A Wulff-radial function ``x -> profile(kappa_n H°(x)^n)`` on ``W_R``."""

    geometry: WulffGeometry
    norm: NormSpec
    R: float
    profile: StaircaseProfile | GradientProfile
    boundary_value: float = 0.0

    @property
    def omega_measure(self) -> float:
        return self.profile.measure

    def radial_coordinate(self, points) -> np.ndarray:
        """``s = kappa_n H°(x)^n``."""
        return self.geometry.kappa * np.asarray(eval_polar(self.norm, points)) ** self.geometry.dimension

    def evaluate(self, points):
        """Values at points of shape ``(..., n)``; zero outside ``Omega*``."""
        s = self.radial_coordinate(points)
        out = np.where(s < self.omega_measure, self.profile(np.minimum(s, self.omega_measure)), 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def l1_norm(self) -> float:
        """``||.||_{L^1(Omega*)}``, exact from the profile."""
        return self.profile.integral()

    def sample(self, spacing: float) -> GridField:
        """Sample on a cell-centred grid covering ``W_R``; the mask is ``{H° < R}``."""
        dims, origin, centers = wulff_grid(self.norm, self.R, spacing)
        s = self.radial_coordinate(centers)
        mask = s < self.omega_measure
        vals = np.where(mask, self.profile(np.minimum(s, self.omega_measure)), 0.0)
        return GridField(vals, mask, origin, spacing)


def wulff_grid(norm: NormSpec, R: float, spacing: float):
    """Centred grid covering ``W_R`` with one spare cell per side.

    Returns ``(dims, origin, centers)``; the extent of ``W_R`` along
    ``e_k`` is ``R H(e_k)``.
    """
    n = norm.dimension
    extents = [R * float(eval_norm(norm, np.eye(n)[k])) for k in range(n)]
    dims = tuple(2 * int(math.ceil(e / spacing - 1e-9)) + 2 for e in extents)
    origin = tuple(-0.5 * d * spacing for d in dims)
    centers = np.stack(GridField.cell_centers_for(dims, origin, spacing), axis=-1)
    return dims, origin, centers


def anisotropic_symmetrization(
    field: GridField, norm: NormSpec, geom: WulffGeometry, direction: str = "decreasing"
) -> SymmetrizedFunction:
    """``u#(x) = u*(kappa_n H°(x)^n)``, or the increasing variant with ``u_*``."""
    if direction not in ("decreasing", "increasing"):
        raise DomainError(f"unknown direction {direction!r}", "direction")
    if geom.dimension != norm.dimension:
        raise DomainError("geometry and norm dimensions differ", "dimension-mismatch")
    profile = decreasing_rearrangement(field)
    if direction == "increasing":
        profile = increasing_rearrangement(profile)
    R = wulff_radius(geom, field.measure)
    return SymmetrizedFunction(geom, norm, R, profile, 0.0)


def singular_mass(jumps: JumpSet, norm: NormSpec) -> float:
    """``M = sum |a| * length * H(nu)`` over the jump segments."""
    if len(jumps) == 0:
        return 0.0
    if norm.dimension != 2:
        raise DomainError("jump segments need a planar norm", "jump-dimension")
    weights = np.abs(jumps.amplitudes) * jumps.lengths * np.asarray(eval_norm(norm, jumps.normals))
    return math.fsum(weights.tolist())


def gradient_symmetrization(
    gstar: StaircaseProfile, M: float, omega_measure: float, geom: WulffGeometry, norm: NormSpec | None = None
) -> SymmetrizedFunction:
    """Build the gradient rearrangement from ``g_*`` and the singular mass ``M``.

    ``norm`` is needed only for pointwise evaluation; it defaults to the
    Euclidean norm of matching dimension.
    """
    if not math.isclose(gstar.measure, omega_measure, rel_tol=1e-12):
        raise DomainError("g_* must live on [0, |Omega|]", "measure-mismatch")
    profile = GradientProfile(gstar, M, geom)
    if norm is None:
        norm = NormSpec.euclidean(geom.dimension)
    R = wulff_radius(geom, omega_measure)
    return SymmetrizedFunction(geom, norm, R, profile, profile.c0)


def gradient_density(u: BVComposite, norm: NormSpec) -> np.ndarray:
    """``H(grad^a u)`` per cell (zero outside the mask)."""
    grad = ac_gradient(u.field, u.jumps)
    return np.where(u.field.mask, np.asarray(eval_norm(norm, grad)), 0.0)


def symmetrize_bv(u: BVComposite, norm: NormSpec, geom: WulffGeometry) -> SymmetrizedFunction:
    """Gradient rearrangement of a nonnegative BV composite."""
    if np.any(u.field.values < 0):
        raise DomainError("symmetrization needs a nonnegative function", "negative-values")
    g = gradient_density(u, norm)[u.field.mask]
    gstar = staircase_from_samples(g, u.field.cell_measure, increasing=True)
    M = singular_mass(u.jumps, norm) + u.extra_singular_mass
    return gradient_symmetrization(gstar, M, u.field.measure, geom, norm)


def write_profile(sym: SymmetrizedFunction, path: str | Path) -> None:
    """Write ``s_i v_i`` lines then ``c0`` and ``omega``.

    For a staircase ``v_i`` is the value on ``[s_i, s_{i+1})``; for a
    gradient profile it is the (continuous) value at ``s_i``.
    """
    prof = sym.profile
    if isinstance(prof, GradientProfile):
        s, v = prof.breakpoints, prof.knot_values
    else:
        s, v = prof.breakpoints[:-1], prof.values
    lines = [f"{si:.17g} {vi:.17g}" for si, vi in zip(s, v)]
    lines.append(f"c0 {sym.boundary_value:.17g}")
    lines.append(f"omega {sym.omega_measure:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")
