"""Static SVG figures (matplotlib, Agg backend).

Output is deterministic: the SVG hash salt is fixed and no date is
written.
"""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .anisotropy import NormSpec, wulff_boundary  # noqa: E402
from .errors import DomainError  # noqa: E402
from .fields import GridField, StaircaseProfile, atomic_write_text  # noqa: E402
from .variation import contour_segments  # noqa: E402

__all__ = [
    "emit_svg",
    "plot_profile",
    "plot_wulff_shape",
    "plot_level_sets",
    "plot_radial_torsion",
    "plot_radial_insulation",
]


def _save(fig, path: str | Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": "wulffsym", "svg.fonttype": "path"}):
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_text(path, buf.getvalue())


def _simplify(poly: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Drop vertices lying on the segment between their neighbours."""
    prev = np.roll(poly, 1, axis=0)
    nxt = np.roll(poly, -1, axis=0)
    a, b = poly - prev, nxt - poly
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    scale = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    keep = np.abs(cross) > tol * np.maximum(scale, 1e-300)
    return poly[keep] if keep.sum() >= 3 else poly


def plot_profile(profile, path: str | Path, title: str = "profile") -> None:
    """Plot a rearranged profile against ``s``."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if isinstance(profile, StaircaseProfile):
        b = profile.breakpoints
        ax.step(b, np.append(profile.values, profile.values[-1]), where="post", color="k", lw=1.2)
    else:
        b = profile.breakpoints
        s = np.unique(np.concatenate([b, np.linspace(0.0, b[-1], 512)]))
        s = s[s < b[-1]]
        ax.plot(np.append(s, b[-1]), np.append(profile(s), profile.knot_values[-1]), color="k", lw=1.2)
    ax.set_xlabel("s (measure)")
    ax.set_ylabel("value")
    ax.set_title(title)
    _save(fig, path)


def plot_wulff_shape(norm: NormSpec, path: str | Path, R: float = 1.0) -> None:
    poly = _simplify(wulff_boundary(norm, R))
    fig, ax = plt.subplots(figsize=(4, 4))
    closed = np.vstack([poly, poly[:1]])
    ax.plot(closed[:, 0], closed[:, 1], color="k", lw=1.2, gid="wulff-boundary")
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"Wulff shape, {norm.label()}, R = {R:g}")
    _save(fig, path)


def plot_level_sets(field: GridField, levels, path: str | Path) -> None:
    """Marching-squares boundaries of ``{u > t}``, one line collection per level."""
    if field.ndim != 2:
        raise DomainError("level-set plots are planar", "dimension")
    levels = list(levels)
    if not levels:
        raise DomainError("no levels to plot", "empty")
    fig, ax = plt.subplots(figsize=(4, 4))
    cmap = plt.get_cmap("viridis")
    for k, t in enumerate(levels):
        segs = contour_segments(field.values, t, field.origin, field.spacing)
        lc = LineCollection(segs, colors=[cmap(k / max(1, len(levels) - 1))], linewidths=0.8)
        lc.set_gid(f"level-{k}")
        ax.add_collection(lc)
    ox, oy = field.origin
    ax.set_xlim(ox, ox + field.dims[0] * field.spacing)
    ax.set_ylim(oy, oy + field.dims[1] * field.spacing)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    _save(fig, path)


def plot_radial_torsion(minimizer, path: str | Path) -> None:
    """``phi(r)`` with the dead core shaded."""
    r = np.linspace(0.0, minimizer.R, 400)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(r, minimizer.profile(r), color="k", lw=1.2)
    if minimizer.dead_core_radius > 0:
        ax.axvspan(0.0, minimizer.dead_core_radius, color="0.85", label="dead core")
        ax.legend()
    ax.set_xlabel("r = H°(x)")
    ax.set_ylabel("phi(r)")
    ax.set_title(f"Lambda = {minimizer.Lambda:g}, T = {minimizer.torsion:.6g}")
    _save(fig, path)


def plot_radial_insulation(geom, R: float, m: float, path: str | Path) -> None:
    """Optimal radial profile ``a + (R^2 - r^2) / (2n)`` of the insulation quotient on ``W_R``.

    The constant trace is ``a = m R^{2-n} / (n^2 kappa)``.
    """
    n = geom.dimension
    a = m * R ** (2 - n) / (n * n * geom.kappa)
    r = np.linspace(0.0, R, 400)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(r, a + (R * R - r * r) / (2 * n), color="k", lw=1.2)
    ax.axhline(a, color="0.5", lw=0.8, ls="--", label="boundary trace")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    ax.set_xlabel("r = H°(x)")
    ax.set_ylabel("phi(r)")
    ax.set_title(f"m = {m:g}, R = {R:.6g}")
    _save(fig, path)


def emit_svg(kind: str, data, path: str | Path) -> None:
    """Dispatch on ``kind`` in ``{"profile", "wulff-shape", "level-sets", "torsion", "insulation"}``.

    ``insulation`` takes ``(geom, R, m)``.
    """
    if kind == "profile":
        plot_profile(data, path)
    elif kind == "wulff-shape":
        plot_wulff_shape(data, path)
    elif kind == "level-sets":
        field, levels = data
        plot_level_sets(field, levels, path)
    elif kind == "torsion":
        plot_radial_torsion(data, path)
    elif kind == "insulation":
        plot_radial_insulation(*data, path)
    else:
        raise DomainError(f"unknown figure kind {kind!r}", "figure-kind")
