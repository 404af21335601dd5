"""Canonical test functions with known symmetrizations.

All builders return a :class:`BVComposite` whose jump set declares every
discontinuity of the samples, including the zero-extension jump on the
boundary of the domain when the trace is nonzero.
"""

from __future__ import annotations

import numpy as np

from .anisotropy import NormSpec, eval_polar, wulff_boundary
from .fields import BVComposite, GridField, JumpSet, zero_extension_jumps
from .rearrange import wulff_grid

__all__ = [
    "cone",
    "wulff_indicator",
    "bump",
    "square_indicator",
    "square_pyramid",
    "square_torsion_start",
    "random_composite",
    "random_polyomino",
    "random_smooth_field",
    "FIXTURE_NAMES",
    "build_fixture",
]


def _ball(norm: NormSpec, R: float, spacing: float):
    dims, origin, centers = wulff_grid(norm, R, spacing)
    r = np.asarray(eval_polar(norm, centers))
    return dims, origin, r, r < R


def cone(norm: NormSpec, R: float = 1.0, cells: int = 256) -> BVComposite:
    """``(1 - H°(x)/R)_+`` on ``W_R`` (``H(grad) = 1/R``, zero trace)."""
    h = R / cells
    dims, origin, r, mask = _ball(norm, R, h)
    return BVComposite(GridField(np.where(mask, 1.0 - r / R, 0.0), mask, origin, h))


def wulff_indicator(norm: NormSpec, R: float = 1.0, cells: int = 256, edges: int = 1440) -> BVComposite:
    """``chi_{W_R}`` with its boundary declared as a polygon on ``∂W_R``."""
    h = R / cells
    dims, origin, r, mask = _ball(norm, R, h)
    jumps = JumpSet.polygon(wulff_boundary(norm, R, edges), 1.0)
    return BVComposite(GridField(mask.astype(float), mask, origin, h), jumps)


def _unit_square(cells: int):
    h = 1.0 / cells
    x = (np.arange(cells) + 0.5) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    return h, X, Y, np.ones((cells, cells), dtype=bool)


def bump(cells: int = 128) -> BVComposite:
    """``(1 - |x|^2)_+^2`` on the unit disk."""
    h = 1.0 / cells
    n = 2 * cells + 2
    origin = (-0.5 * n * h,) * 2
    f = GridField.from_function(
        lambda x, y: np.maximum(1.0 - x * x - y * y, 0.0) ** 2, (n, n), origin, h, mask=lambda x, y: x * x + y * y < 1
    )
    return BVComposite(f)


def square_indicator(cells: int = 64) -> BVComposite:
    h, X, Y, mask = _unit_square(cells)
    f = GridField(np.ones_like(X), mask, (0.0, 0.0), h)
    return BVComposite(f, zero_extension_jumps(f))


def square_pyramid(cells: int = 64) -> BVComposite:
    """Distance to the boundary of the unit square (trace ``h/2`` declared as jumps)."""
    h, X, Y, mask = _unit_square(cells)
    d = np.minimum(np.minimum(X, 1 - X), np.minimum(Y, 1 - Y))
    f = GridField(d, mask, (0.0, 0.0), h)
    return BVComposite(f, zero_extension_jumps(f))


def square_torsion_start(cells: int = 64) -> BVComposite:
    """``sin(pi x) sin(pi y) / (2 pi^2)`` on the unit square."""
    h, X, Y, mask = _unit_square(cells)
    f = GridField(np.sin(np.pi * X) * np.sin(np.pi * Y) / (2 * np.pi**2), mask, (0.0, 0.0), h)
    return BVComposite(f, zero_extension_jumps(f))


def random_smooth_field(rng: np.random.Generator, cells: int = 64, bumps: int = 3) -> np.ndarray:
    """Sum of Gaussians times ``sin(pi x) sin(pi y)`` on the unit square (nonnegative)."""
    h, X, Y, _ = _unit_square(cells)
    v = np.zeros_like(X)
    for _ in range(bumps):
        cx, cy = rng.uniform(0.2, 0.8, size=2)
        w = rng.uniform(0.08, 0.3)
        v += rng.uniform(0.3, 1.0) * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * w * w))
    return v * np.sin(np.pi * X) * np.sin(np.pi * Y)


def random_composite(
    rng: np.random.Generator, cells: int = 64, squares: int = 2, lift: bool = False
) -> BVComposite:
    """Smooth bump plus pixel-aligned jump squares on the unit square.

    Squares do not overlap and stay two cells away from the boundary.
    With ``lift`` a constant is added, so the zero extension jumps on
    ``∂Omega``.
    """
    h, X, Y, mask = _unit_square(cells)
    v = random_smooth_field(rng, cells)
    occupied = np.zeros_like(mask)
    segs = []
    for _ in range(squares):
        for _attempt in range(50):
            size = int(rng.integers(cells // 8, cells // 3))
            i0 = int(rng.integers(2, cells - size - 2))
            j0 = int(rng.integers(2, cells - size - 2))
            box = (slice(i0 - 1, i0 + size + 1), slice(j0 - 1, j0 + size + 1))
            if not occupied[box].any():
                break
        else:
            continue
        occupied[box] = True
        a = float(rng.uniform(0.2, 1.0))
        v[i0 : i0 + size, j0 : j0 + size] += a
        x0, y0, x1, y1 = i0 * h, j0 * h, (i0 + size) * h, (j0 + size) * h
        segs.append(JumpSet.polygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], a))
    if lift:
        v += float(rng.uniform(0.1, 0.5))
    f = GridField(v, mask, (0.0, 0.0), h)
    jumps = JumpSet()
    for s in segs:
        jumps = jumps + s
    boundary = zero_extension_jumps(f) if lift else JumpSet()
    return BVComposite(f, jumps + boundary)


def random_polyomino(rng: np.random.Generator, size: int = 24, cells: int | None = None) -> np.ndarray:
    """4-connected random cell set grown from the centre of a ``size x size`` grid."""
    cells = cells or int(rng.integers(4, size * size // 3))
    mask = np.zeros((size, size), dtype=bool)
    c = size // 2
    mask[c, c] = True
    frontier = [(c, c)]
    count = 1
    while count < cells:
        i, j = frontier[int(rng.integers(len(frontier)))]
        di, dj = [(1, 0), (-1, 0), (0, 1), (0, -1)][int(rng.integers(4))]
        a, b = i + di, j + dj
        if 0 <= a < size and 0 <= b < size and not mask[a, b]:
            mask[a, b] = True
            frontier.append((a, b))
            count += 1
    return mask


FIXTURE_NAMES = ("cone", "wulff-indicator", "bump", "square-torsion-start")


def build_fixture(name: str, norm: NormSpec, cells: int = 256) -> BVComposite:
    if name == "cone":
        return cone(norm, 1.0, cells)
    if name == "wulff-indicator":
        return wulff_indicator(norm, 1.0, cells)
    if name == "bump":
        return bump(cells)
    if name == "square-torsion-start":
        return square_torsion_start(cells)
    raise KeyError(name)
