"""Grid samples, jump sets and one-dimensional rearrangements.

Conventions
-----------
A :class:`GridField` stores cell-centred samples on a uniform grid.  Axis
``k`` of ``values`` is coordinate ``x_k``; the centre of cell ``(i, j)`` is
``origin + (i + 1/2, j + 1/2) * h``.  Every cell carries the measure
``h**n``, so level sets are unions of whole cells and rearrangement is an
exact sort.

The singular part of the gradient is never inferred from the samples: it is
declared as a :class:`JumpSet` of straight segments.  Gradient stencils that
cross a declared segment are cut, so a step in the samples does not leak
into the absolutely continuous part.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidArgumentError, ParseError

__all__ = [
    "GridField",
    "JumpSet",
    "BVComposite",
    "StaircaseProfile",
    "load_field",
    "save_field",
    "load_jumps",
    "save_jumps",
    "atomic_write_text",
    "ac_gradient",
    "blocked_links",
    "distribution_function",
    "decreasing_rearrangement",
    "increasing_rearrangement",
    "staircase_from_samples",
    "integrate_product",
    "zero_extension_jumps",
    "jump_trace_samples",
]


@dataclass(frozen=True, eq=False)
class GridField:
    """Cell-centred samples of a function, zero-extended outside ``mask``."""

    values: np.ndarray
    mask: np.ndarray
    origin: tuple[float, ...]
    spacing: float

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        mask = np.array(self.mask, dtype=bool)
        if values.ndim < 1 or 0 in values.shape:
            raise InvalidArgumentError("grid must have at least one cell per axis", "empty-grid")
        if mask.shape != values.shape:
            raise InvalidArgumentError("mask and values shapes differ", "shape")
        if len(self.origin) != values.ndim:
            raise InvalidArgumentError("origin length must equal the grid dimension", "shape")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise InvalidArgumentError("spacing must be positive", "spacing")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("values must be finite", "non-finite")
        if np.any(values[~mask] != 0):
            raise DomainError("values must vanish outside the mask", "nonzero-outside")
        if not mask.any():
            raise DomainError("mask is empty, |Omega| = 0", "zero-measure")
        values.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "spacing", float(self.spacing))

    @classmethod
    def from_function(
        cls,
        func: Callable[..., np.ndarray],
        dims: tuple[int, ...],
        origin: tuple[float, ...],
        spacing: float,
        mask: np.ndarray | Callable[..., np.ndarray] | None = None,
    ) -> "GridField":
        """Sample ``func(x, y, ...)`` at cell centres; values outside ``mask`` are zeroed."""
        centers = cls.cell_centers_for(dims, origin, spacing)
        vals = np.asarray(func(*centers), dtype=float) * np.ones(dims)
        if mask is None:
            m = np.ones(dims, dtype=bool)
        elif callable(mask):
            m = np.asarray(mask(*centers), dtype=bool) & np.ones(dims, dtype=bool)
        else:
            m = np.asarray(mask, dtype=bool)
        return cls(np.where(m, vals, 0.0), m, tuple(origin), spacing)

    @staticmethod
    def cell_centers_for(dims, origin, spacing) -> list[np.ndarray]:
        axes = [origin[k] + (np.arange(dims[k]) + 0.5) * spacing for k in range(len(dims))]
        return np.meshgrid(*axes, indexing="ij")

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(np.where(self.mask, values, 0.0), self.mask, self.origin, self.spacing)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def cell_measure(self) -> float:
        return self.spacing**self.ndim

    @property
    def measure(self) -> float:
        """``|Omega|`` = ``h^n`` times the number of masked-in cells."""
        return int(np.count_nonzero(self.mask)) * self.cell_measure

    def cell_centers(self) -> list[np.ndarray]:
        return self.cell_centers_for(self.dims, self.origin, self.spacing)

    def integral(self, p: float = 1.0) -> float:
        """``||u||_{L^p(Omega)}^p`` for finite ``p`` (the plain sum for ``p = 1``)."""
        v = np.abs(self.values[self.mask])
        return math.fsum((v if p == 1 else v**p).tolist()) * self.cell_measure

    def value_at(self, points: np.ndarray) -> np.ndarray:
        """Value of the cell containing each point (0 outside the grid)."""
        pts = np.asarray(points, dtype=float)
        idx = np.floor((pts - np.asarray(self.origin)) / self.spacing).astype(int)
        inside = np.all((idx >= 0) & (idx < np.asarray(self.dims)), axis=-1)
        out = np.zeros(pts.shape[:-1])
        sel = tuple(idx[inside].T)
        out[inside] = self.values[sel]
        return out


@dataclass(frozen=True, eq=False)
class JumpSet:
    """Straight segments (n = 2) across which ``u`` jumps by ``|amplitude|``."""

    starts: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    ends: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    amplitudes: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        starts = np.array(self.starts, dtype=float).reshape(-1, 2)
        ends = np.array(self.ends, dtype=float).reshape(-1, 2)
        amps = np.array(self.amplitudes, dtype=float).reshape(-1)
        if not (len(starts) == len(ends) == len(amps)):
            raise InvalidArgumentError("jump arrays must have equal length", "shape")
        if not (np.all(np.isfinite(starts)) and np.all(np.isfinite(ends)) and np.all(np.isfinite(amps))):
            raise InvalidArgumentError("jump data must be finite", "non-finite")
        if np.any(np.linalg.norm(ends - starts, axis=1) == 0):
            raise DomainError("jump segment of zero length", "degenerate-segment")
        for a in (starts, ends, amps):
            a.flags.writeable = False
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "ends", ends)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_segments(cls, segments) -> "JumpSet":
        """From an iterable of ``(x1, y1, x2, y2, amplitude)``."""
        rows = np.array(list(segments), dtype=float).reshape(-1, 5)
        return cls(rows[:, 0:2], rows[:, 2:4], rows[:, 4])

    @classmethod
    def polygon(cls, vertices, amplitude: float) -> "JumpSet":
        """Closed polygon boundary with a constant jump."""
        v = np.asarray(vertices, dtype=float)
        return cls(v, np.roll(v, -1, axis=0), np.full(len(v), float(amplitude)))

    def __len__(self) -> int:
        return len(self.amplitudes)

    def __add__(self, other: "JumpSet") -> "JumpSet":
        return JumpSet(
            np.vstack([self.starts, other.starts]),
            np.vstack([self.ends, other.ends]),
            np.concatenate([self.amplitudes, other.amplitudes]),
        )

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.ends - self.starts, axis=1)

    @property
    def normals(self) -> np.ndarray:
        """Unit normals (rotation of the direction by +90 degrees)."""
        d = (self.ends - self.starts) / self.lengths[:, None]
        return np.column_stack([-d[:, 1], d[:, 0]])


@dataclass(frozen=True, eq=False)
class BVComposite:
    """A BV function: samples of ``u`` plus its declared singular part.

    ``field`` holds the samples of ``u`` itself (steps included); ``jumps``
    declares where those steps are.  ``extra_singular_mass`` is an
    additional scalar ``|D^s u|_H`` for singular parts that are not
    represented geometrically.
    """

    field: GridField
    jumps: JumpSet = field(default_factory=JumpSet)
    extra_singular_mass: float = 0.0
    nonneg: bool = True

    def __post_init__(self) -> None:
        if self.nonneg and np.any(self.field.values < 0):
            raise DomainError("function must be nonnegative", "negative-values")
        if not (self.extra_singular_mass >= 0 and math.isfinite(self.extra_singular_mass)):
            raise DomainError("singular mass must be finite and >= 0", "negative-mass")
        if len(self.jumps) and self.field.ndim != 2:
            raise DomainError("jump segments are supported for n = 2 only", "jump-dimension")


# ---------------------------------------------------------------------------
# file formats


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_field(f: GridField, path: str | Path) -> None:
    lines = [
        "wulff-field v1",
        "dims " + " ".join(str(d) for d in f.dims),
        "origin " + " ".join(_fmt(o) for o in f.origin),
        "spacing " + _fmt(f.spacing),
    ]
    if f.mask.all():
        lines.append("mask full")
    else:
        lines.append("mask inline")
        for row in f.mask.reshape(f.dims[0], -1):
            lines.append(" ".join("1" if m else "0" for m in row))
    for row in f.values.reshape(f.dims[0], -1):
        lines.append(" ".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _header(lines: list[str], lineno: int, key: str) -> list[str]:
    if lineno > len(lines):
        raise ParseError(f"missing '{key}' header", "header", lineno)
    parts = lines[lineno - 1].split()
    if not parts or parts[0] != key:
        raise ParseError(f"expected '{key}' header", "header", lineno)
    return parts[1:]


def load_field(path: str | Path) -> GridField:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != "wulff-field v1":
        raise ParseError("expected 'wulff-field v1' magic line", "header", 1)
    try:
        dims = tuple(int(t) for t in _header(lines, 2, "dims"))
    except ValueError:
        raise ParseError("dims must be integers", "header", 2) from None
    if len(dims) < 1 or any(d <= 0 for d in dims):
        raise ParseError("dims must be positive", "empty-grid", 2)
    try:
        origin = tuple(float(t) for t in _header(lines, 3, "origin"))
        spacing_tok = _header(lines, 4, "spacing")
        spacing = float(spacing_tok[0]) if len(spacing_tok) == 1 else float("nan")
    except ValueError:
        raise ParseError("non-numeric header entry", "header", 3) from None
    if len(origin) != len(dims):
        raise ParseError("origin length does not match dims", "dimension-mismatch", 3)
    if not (spacing > 0 and math.isfinite(spacing)):
        raise ParseError("spacing must be a positive number", "header", 4)
    mode = _header(lines, 5, "mask")
    if mode not in (["full"], ["inline"]):
        raise ParseError("mask must be 'inline' or 'full'", "header", 5)

    count = int(np.prod(dims))
    tokens: list[tuple[str, int]] = []
    for lineno in range(6, len(lines) + 1):
        tokens.extend((t, lineno) for t in lines[lineno - 1].split())

    pos = 0
    if mode == ["inline"]:
        if len(tokens) < count:
            raise ParseError("truncated mask block", "dimension-mismatch", len(lines))
        mask_tok = tokens[:count]
        for t, ln in mask_tok:
            if t not in ("0", "1"):
                raise ParseError(f"mask entry {t!r} is not 0/1", "mask", ln)
        mask = np.array([t == "1" for t, _ in mask_tok]).reshape(dims)
        pos = count
    else:
        mask = np.ones(dims, dtype=bool)
    vals_tok = tokens[pos:]
    if len(vals_tok) != count:
        ln = vals_tok[-1][1] if vals_tok else len(lines)
        raise ParseError(f"expected {count} values, found {len(vals_tok)}", "dimension-mismatch", ln)
    values = np.empty(count)
    for k, (t, ln) in enumerate(vals_tok):
        try:
            v = float(t)
        except ValueError:
            raise ParseError(f"non-numeric value {t!r}", "value", ln) from None
        if not math.isfinite(v):
            raise ParseError(f"non-finite value {t!r}", "non-finite", ln)
        values[k] = v
    values = values.reshape(dims)
    bad = (~mask) & (values != 0)
    if bad.any():
        k = int(np.flatnonzero(bad.reshape(-1))[0])
        raise ParseError("nonzero value on a masked-out cell", "nonzero-outside", vals_tok[k][1])
    if not mask.any():
        raise ParseError("mask is empty", "zero-measure", 5)
    return GridField(values, mask, origin, spacing)


def save_jumps(jumps: JumpSet, path: str | Path) -> None:
    rows = np.column_stack([jumps.starts, jumps.ends, jumps.amplitudes])
    text = "".join(" ".join(_fmt(v) for v in r) + "\n" for r in rows)
    atomic_write_text(path, text)


def load_jumps(path: str | Path) -> JumpSet:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError("expected 'x1 y1 x2 y2 amplitude'", "jump", lineno)
        try:
            row = [float(t) for t in parts]
        except ValueError:
            raise ParseError("non-numeric jump entry", "jump", lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError("non-finite jump entry", "non-finite", lineno)
        if row[0:2] == row[2:4]:
            raise ParseError("zero-length jump segment", "degenerate-segment", lineno)
        rows.append(row)
    return JumpSet.from_segments(rows)


# ---------------------------------------------------------------------------
# gradients


def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    """Links ``a0-a1`` (arrays) properly crossed by the segment ``b0-b1``."""

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (
            r[..., 0] - p[..., 0]
        )

    o1 = orient(b0, b1, a0)
    o2 = orient(b0, b1, a1)
    o3 = orient(a0, a1, b0)
    o4 = orient(a0, a1, b1)
    return (o1 * o2 < 0) & (o3 * o4 <= 0)


def blocked_links(f: GridField, jumps: JumpSet | None) -> list[np.ndarray]:
    """Per axis, boolean array marking links ``c -> c + e_k`` cut by a jump segment.

    The array for axis ``k`` has the grid shape with axis ``k`` shortened by one.
    """
    shapes = []
    for k in range(f.ndim):
        s = list(f.dims)
        s[k] -= 1
        shapes.append(np.zeros(s, dtype=bool))
    if jumps is None or len(jumps) == 0:
        return shapes
    if f.ndim != 2:
        raise DomainError("jump segments are supported for n = 2 only", "jump-dimension")
    h = f.spacing
    o = np.asarray(f.origin)
    for p, q in zip(jumps.starts, jumps.ends):
        lo = np.floor((np.minimum(p, q) - o) / h - 1).astype(int)
        hi = np.ceil((np.maximum(p, q) - o) / h + 1).astype(int)
        for k in range(2):
            blk = shapes[k]
            i0 = max(lo[0], 0)
            j0 = max(lo[1], 0)
            i1 = min(hi[0], blk.shape[0])
            j1 = min(hi[1], blk.shape[1])
            if i1 <= i0 or j1 <= j0:
                continue
            ii, jj = np.meshgrid(np.arange(i0, i1), np.arange(j0, j1), indexing="ij")
            a0 = np.stack([o[0] + (ii + 0.5) * h, o[1] + (jj + 0.5) * h], axis=-1)
            a1 = a0.copy()
            a1[..., k] += h
            blk[i0:i1, j0:j1] |= _segments_cross(a0, a1, p, q)
    return shapes


def ac_gradient(f: GridField, jumps: JumpSet | None = None) -> np.ndarray:
    """Absolutely continuous gradient, shape ``dims + (n,)``.

    Central differences where both neighbours are usable, one-sided where only
    one is, zero where neither is.  A neighbour is usable when it lies in the
    mask and the link to it does not cross a declared jump.  Cells outside the
    mask get a zero gradient.
    """
    v = f.values
    m = f.mask
    h = f.spacing
    blocked = blocked_links(f, jumps)
    grad = np.zeros(f.dims + (f.ndim,))
    for k in range(f.ndim):
        n_k = f.dims[k]
        lo = [slice(None)] * f.ndim
        hi = [slice(None)] * f.ndim
        lo[k] = slice(0, n_k - 1)
        hi[k] = slice(1, n_k)
        lo, hi = tuple(lo), tuple(hi)
        link_ok = m[lo] & m[hi] & ~blocked[k]
        diff = np.where(link_ok, (v[hi] - v[lo]) / h, 0.0)
        fwd_ok = np.zeros(f.dims, dtype=bool)
        bwd_ok = np.zeros(f.dims, dtype=bool)
        fwd = np.zeros(f.dims)
        bwd = np.zeros(f.dims)
        fwd_ok[lo] = link_ok
        fwd[lo] = diff
        bwd_ok[hi] = link_ok
        bwd[hi] = diff
        both = fwd_ok & bwd_ok
        g = np.where(both, 0.5 * (fwd + bwd), np.where(fwd_ok, fwd, np.where(bwd_ok, bwd, 0.0)))
        grad[..., k] = np.where(m, g, 0.0)
    return grad


# ---------------------------------------------------------------------------
# jumps as seen from the grid


def zero_extension_jumps(f: GridField) -> JumpSet:
    """Pixel-edge segments along ``∂Omega`` carrying the trace of ``u`` (n = 2).

    Each boundary cell edge facing a masked-out (or off-grid) cell becomes one
    segment with amplitude equal to the cell value.  Zero amplitudes are
    dropped.
    """
    if f.ndim != 2:
        raise DomainError("zero_extension_jumps is implemented for n = 2", "jump-dimension")
    m = np.pad(f.mask, 1)
    v = np.pad(f.values, 1)
    h = f.spacing
    ox, oy = f.origin
    rows = []
    # For each direction: neighbour offset, then edge endpoints relative to the cell's lower corner.
    for di, dj, e0, e1 in (
        (1, 0, (1, 0), (1, 1)),
        (-1, 0, (0, 0), (0, 1)),
        (0, 1, (0, 1), (1, 1)),
        (0, -1, (0, 0), (1, 0)),
    ):
        nb = np.roll(np.roll(m, -di, axis=0), -dj, axis=1)
        ii, jj = np.nonzero(m & ~nb)
        amp = v[ii, jj]
        keep = amp != 0
        ii, jj, amp = ii[keep] - 1, jj[keep] - 1, amp[keep]
        x0 = ox + ii * h
        y0 = oy + jj * h
        rows.append(
            np.column_stack(
                [x0 + e0[0] * h, y0 + e0[1] * h, x0 + e1[0] * h, y0 + e1[1] * h, amp]
            )
        )
    return JumpSet.from_segments(np.vstack(rows))


@dataclass
class JumpTraceSamples:
    """Quadrature points along declared jump segments.

    ``lower`` is the trace on the lower side (taken from the adjacent cell),
    ``upper = lower + |amplitude|``.  ``weight`` is the arc length carried by
    each point and ``segment`` the index of its segment.
    """

    segment: np.ndarray
    weight: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def jump_trace_samples(f: GridField, jumps: JumpSet, per_cell: int = 2) -> JumpTraceSamples:
    """Sample one-sided traces along each jump segment.

    The lower side of a segment is the side whose sampled values have the
    smaller mean; it is chosen once per segment so that the upper trace is
    always ``lower + |amplitude|``.
    """
    if len(jumps) == 0:
        z = np.zeros(0)
        return JumpTraceSamples(z.astype(int), z, z, z)
    h = f.spacing
    segs, weights, lowers, uppers = [], [], [], []
    normals = jumps.normals
    for k, (p, q, a) in enumerate(zip(jumps.starts, jumps.ends, jumps.amplitudes)):
        length = float(np.linalg.norm(q - p))
        m = max(1, int(math.ceil(per_cell * length / h)))
        t = (np.arange(m) + 0.5) / m
        pts = p[None, :] + t[:, None] * (q - p)[None, :]
        side_a = f.value_at(pts + 0.5 * h * normals[k])
        side_b = f.value_at(pts - 0.5 * h * normals[k])
        low = side_a if side_a.mean() <= side_b.mean() else side_b
        segs.append(np.full(m, k))
        weights.append(np.full(m, length / m))
        lowers.append(low)
        uppers.append(low + abs(a))
    return JumpTraceSamples(
        np.concatenate(segs), np.concatenate(weights), np.concatenate(lowers), np.concatenate(uppers)
    )


# ---------------------------------------------------------------------------
# distribution functions and rearrangements


@dataclass(frozen=True, eq=False)
class StaircaseProfile:
    """Monotone piecewise-constant function on ``[0, |Omega|]``.

    ``profile(s) = values[i]`` for ``breakpoints[i] <= s < breakpoints[i+1]``
    (right-continuous).  Beyond ``|Omega|`` a nonincreasing profile is 0 (the
    ``u*(|Omega|) = 0`` convention for functions vanishing outside
    ``Omega``); a nondecreasing one keeps its last value.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    increasing: bool = False

    def __post_init__(self) -> None:
        b = np.array(self.breakpoints, dtype=float)
        v = np.array(self.values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or len(b) != len(v) + 1 or len(v) == 0:
            raise InvalidArgumentError("need k+1 breakpoints for k values", "shape")
        if b[0] != 0 or np.any(np.diff(b) <= 0):
            raise InvalidArgumentError("breakpoints must start at 0 and increase", "breakpoints")
        d = np.diff(v)
        if (self.increasing and np.any(d < 0)) or (not self.increasing and np.any(d > 0)):
            raise DomainError("values violate the monotonicity flag", "not-monotone")
        b.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @property
    def measure(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0):
            raise DomainError("profile argument must be >= 0", "negative-argument")
        idx = np.searchsorted(self.breakpoints, s_arr, side="right") - 1
        beyond = idx >= len(self.values)
        idx = np.minimum(idx, len(self.values) - 1)
        out = self.values[idx]
        if not self.increasing:
            out = np.where(beyond, 0.0, out)
        return float(out) if np.ndim(out) == 0 else out

    def integral(self, func: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
        """``∫_0^{|Omega|} func(profile(s)) ds`` (identity by default)."""
        v = self.values if func is None else np.asarray(func(self.values), dtype=float)
        return math.fsum((v * self.widths).tolist())

    def lp_norm(self, p: float = 1.0) -> float:
        if p == math.inf:
            return float(np.abs(self.values).max())
        return self.integral(lambda v: np.abs(v) ** p) ** (1.0 / p)

    def distribution(self, t: float) -> float:
        """Measure of ``{s : profile(s) > t}``."""
        return math.fsum(self.widths[self.values > t].tolist())

    def reflect(self) -> "StaircaseProfile":
        """``s -> profile(|Omega| - s)``, swapping the monotonicity."""
        b = self.measure - self.breakpoints[::-1]
        b[0] = 0.0
        return StaircaseProfile(b, self.values[::-1], not self.increasing)


def staircase_from_samples(
    values: np.ndarray, cell_measure: float, increasing: bool = False
) -> StaircaseProfile:
    """Sort samples (each of mass ``cell_measure``) into a monotone staircase.

    The sort is stable in the flat (row-major) input order; runs of equal
    values are merged into one piece.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    if len(v) == 0:
        raise DomainError("no samples to rearrange", "zero-measure")
    order = np.argsort(v if increasing else -v, kind="stable")
    sv = v[order]
    starts = np.flatnonzero(np.concatenate([[True], sv[1:] != sv[:-1]]))
    counts = np.diff(np.concatenate([starts, [len(sv)]]))
    cum = np.concatenate([[0], np.cumsum(counts)])
    return StaircaseProfile(cum * cell_measure, sv[starts], increasing)


def distribution_function(f: GridField, t: float) -> float:
    """``mu(t) = |{x in Omega : |u(x)| > t}|`` (strict inequality)."""
    if t < 0:
        raise DomainError("distribution function needs t >= 0", "negative-level")
    return int(np.count_nonzero(np.abs(f.values[f.mask]) > t)) * f.cell_measure


def decreasing_rearrangement(f: GridField) -> StaircaseProfile:
    """``u*`` of a nonnegative field."""
    vals = f.values[f.mask]
    if np.any(vals < 0):
        raise DomainError("decreasing rearrangement needs a nonnegative field", "negative-values")
    return staircase_from_samples(vals, f.cell_measure)


def increasing_rearrangement(obj: GridField | StaircaseProfile) -> StaircaseProfile:
    """``u_*(s) = u*(|Omega| - s)``, from a field or from its ``u*``."""
    if isinstance(obj, StaircaseProfile):
        return obj if obj.increasing else obj.reflect()
    return decreasing_rearrangement(obj).reflect()


def integrate_product(a: StaircaseProfile, b: StaircaseProfile) -> float:
    """``∫_0^{|Omega|} a(s) b(s) ds`` for two staircases on the same interval."""
    if not math.isclose(a.measure, b.measure, rel_tol=1e-12):
        raise DomainError("profiles live on different intervals", "measure-mismatch")
    brk = np.union1d(a.breakpoints, b.breakpoints)
    brk = brk[brk <= min(a.measure, b.measure)]
    mid = 0.5 * (brk[1:] + brk[:-1])
    return math.fsum((a(mid) * b(mid) * np.diff(brk)).tolist())
