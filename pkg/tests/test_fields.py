import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wulffsym import (
    BVComposite,
    DomainError,
    GridField,
    InvalidArgumentError,
    JumpSet,
    ParseError,
    StaircaseProfile,
    ac_gradient,
    blocked_links,
    decreasing_rearrangement,
    distribution_function,
    increasing_rearrangement,
    integrate_product,
    jump_trace_samples,
    load_field,
    load_jumps,
    save_field,
    save_jumps,
    staircase_from_samples,
    zero_extension_jumps,
)

nonneg_grid = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=st.floats(0, 100))


def _field(values, h=1.0):
    v = np.asarray(values, dtype=float)
    return GridField(v, np.ones(v.shape, dtype=bool), (0.0,) * v.ndim, h)


def _square(n=64, lo=-1.0, hi=1.0):
    h = (hi - lo) / n
    return h, (lo, lo), (n, n)


# -- GridField and file formats ---------------------------------------------


def test_measure_of_small_field():
    f = _field(np.ones((2, 2)), h=0.25)
    assert f.measure == pytest.approx(4 * 0.25**2)
    assert f.integral() == pytest.approx(0.25)


def test_field_validation():
    with pytest.raises(InvalidArgumentError):
        _field(np.array([[np.nan]]))
    with pytest.raises(DomainError):
        GridField(np.ones((2, 2)), np.array([[True, False], [True, True]]), (0, 0), 1.0)
    with pytest.raises(DomainError):
        GridField(np.zeros((2, 2)), np.zeros((2, 2), dtype=bool), (0, 0), 1.0)
    with pytest.raises(InvalidArgumentError):
        _field(np.ones((2, 2)), h=0.0)


def test_round_trip_random_field(tmp_path):
    rng = np.random.default_rng(0)
    v = rng.random((64, 64)) * 1e3
    mask = rng.random((64, 64)) > 0.2
    f = GridField(np.where(mask, v, 0.0), mask, (-0.1234567890123, 3.3), 1 / 64)
    save_field(f, tmp_path / "f.fld")
    g = load_field(tmp_path / "f.fld")
    assert g.dims == f.dims and g.origin == f.origin and g.spacing == f.spacing
    assert np.array_equal(g.mask, f.mask)
    assert np.array_equal(g.values, f.values)


def test_round_trip_full_mask(tmp_path):
    f = _field(np.arange(6.0).reshape(2, 3) / 7)
    save_field(f, tmp_path / "f.fld")
    assert "mask full" in (tmp_path / "f.fld").read_text()
    assert np.array_equal(load_field(tmp_path / "f.fld").values, f.values)


@pytest.mark.parametrize(
    "text, slug, line",
    [
        ("wulff-field v1\ndims 0 4\norigin 0 0\nspacing 1\nmask full\n", "empty-grid", 2),
        ("wulff-field v2\n", "header", 1),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing -1\nmask full\n1 2\n", "header", 4),
        ("wulff-field v1\ndims 1 2\norigin 0\nspacing 1\nmask full\n1 2\n", "dimension-mismatch", 3),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing 1\nmask full\n1\n", "dimension-mismatch", 6),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing 1\nmask full\n1\nnan\n", "non-finite", 7),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing 1\nmask full\n1 x\n", "value", 6),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing 1\nmask inline\n1 2\n1 1\n", "mask", 6),
        ("wulff-field v1\ndims 1 2\norigin 0 0\nspacing 1\nmask inline\n1 0\n1 1\n", "nonzero-outside", 7),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, text, slug, line):
    p = tmp_path / "bad.fld"
    p.write_text(text)
    with pytest.raises(ParseError) as e:
        load_field(p)
    assert e.value.code == f"parse:{slug}"
    assert e.value.line == line


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_field("/nonexistent/x.fld")


def test_jump_file_round_trip_and_errors(tmp_path):
    j = JumpSet.polygon([[0, 0], [1, 0], [1, 1], [0, 1]], 0.3)
    save_jumps(j, tmp_path / "j.txt")
    k = load_jumps(tmp_path / "j.txt")
    assert np.array_equal(k.starts, j.starts) and np.array_equal(k.amplitudes, j.amplitudes)
    (tmp_path / "bad.txt").write_text("# comment\n0 0 1 1 2\n0 0 0 0 1\n")
    with pytest.raises(ParseError) as e:
        load_jumps(tmp_path / "bad.txt")
    assert e.value.line == 3


def test_jumpset_geometry():
    j = JumpSet.polygon([[0, 0], [2, 0], [2, 1], [0, 1]], 1.0)
    np.testing.assert_allclose(j.lengths, [2, 1, 2, 1])
    np.testing.assert_allclose(np.abs(j.normals), [[0, 1], [1, 0], [0, 1], [1, 0]], atol=1e-15)
    assert len(j + j) == 8
    with pytest.raises(DomainError):
        JumpSet.from_segments([(0, 0, 0, 0, 1)])


# -- gradients ----------------------------------------------------------------


def test_gradient_of_linear_field():
    h, origin, dims = _square(32, 0.0, 1.0)
    f = GridField.from_function(lambda x, y: x, dims, origin, h)
    g = ac_gradient(f)
    np.testing.assert_allclose(g[..., 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(g[..., 1], 0.0, atol=1e-12)


def test_gradient_of_constant_field_is_zero():
    assert not np.any(ac_gradient(_field(np.full((5, 7), 3.0))))


def test_gradient_of_quadratic_within_taylor_bound():
    h, origin, dims = _square(128)  # h = 1/64
    f = GridField.from_function(lambda x, y: x * x + y * y, dims, origin, h)
    X, Y = f.cell_centers()
    g = ac_gradient(f)
    err = np.abs(g[1:-1, 1:-1] - np.stack([2 * X, 2 * Y], axis=-1)[1:-1, 1:-1])
    assert err.max() <= 4 * h * h


def test_gradient_one_sided_at_mask_boundary():
    v = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 4.0], [0.0, 0.0, 0.0]])
    mask = np.array([[False] * 3, [True] * 3, [False] * 3])
    g = ac_gradient(GridField(v, mask, (0, 0), 1.0))
    np.testing.assert_allclose(g[1, :, 1], [1.0, 1.5, 2.0])
    np.testing.assert_allclose(g[1, :, 0], 0.0)
    assert not np.any(g[0]) and not np.any(g[2])


def test_jumps_block_gradient_links():
    v = np.array([[1.0, 1.0, 5.0, 5.0]] * 3)
    f = _field(v)
    free = ac_gradient(f)
    assert np.any(free[..., 1] != 0)
    j = JumpSet.from_segments([(-1, 2, 4, 2, 4.0)])
    assert blocked_links(f, j)[1].sum() == 3
    assert not np.any(ac_gradient(f, j))


def test_zero_extension_jumps_of_pixel_square():
    f = _field(np.full((4, 4), 2.0), h=0.25)
    j = zero_extension_jumps(f)
    assert len(j) == 16
    assert float(np.sum(j.lengths)) == pytest.approx(4.0)
    np.testing.assert_allclose(j.amplitudes, 2.0)


def test_jump_traces_pick_lower_side():
    v = np.zeros((8, 8))
    v[:, 4:] = 1.0
    v += 0.5
    f = _field(v, h=1 / 8)
    j = JumpSet.from_segments([(0, 0.5, 1, 0.5, 1.0)])
    smp = jump_trace_samples(f, j)
    np.testing.assert_allclose(smp.lower, 0.5)
    np.testing.assert_allclose(smp.upper, 1.5)
    assert float(np.sum(smp.weight)) == pytest.approx(1.0)


def test_bv_composite_validation():
    with pytest.raises(DomainError):
        BVComposite(GridField(-np.ones((2, 2)), np.ones((2, 2), bool), (0, 0), 1.0))
    with pytest.raises(DomainError):
        BVComposite(_field(np.ones((2, 2))), extra_singular_mass=-1.0)


# -- distribution and rearrangement --------------------------------------------


def test_distribution_examples():
    f = _field(np.full((3, 3), 2.0))
    assert distribution_function(f, 1.9) == f.measure
    assert distribution_function(f, 2.0) == 0.0
    with pytest.raises(DomainError):
        distribution_function(f, -1.0)


def test_distribution_of_cone_matches_level_areas():
    h = 1 / 256
    n = 2 * 256 + 4
    o = (-n * h / 2,) * 2
    f = GridField.from_function(lambda x, y: np.maximum(1 - np.hypot(x, y), 0), (n, n), o, h, mask=lambda x, y: np.hypot(x, y) < 1)
    for t in (0.1, 0.5, 0.9):
        exact = math.pi * (1 - t) ** 2
        assert abs(distribution_function(f, t) - exact) / exact < 0.02


def test_rearrangement_examples():
    f = _field(np.array([[3.0, 1.0, 2.0]]))
    d = decreasing_rearrangement(f)
    np.testing.assert_array_equal(d.values, [3, 2, 1])
    np.testing.assert_array_equal(d.breakpoints, [0, 1, 2, 3])
    i = increasing_rearrangement(f)
    np.testing.assert_array_equal(i.values, [1, 2, 3])
    c = decreasing_rearrangement(_field(np.full((4, 4), 0.7)))
    assert len(c) == 1 and c(0.0) == 0.7 and c(c.measure) == 0.0


def test_rearrangement_rejects_negative():
    f = GridField(-np.ones((2, 2)), np.ones((2, 2), bool), (0, 0), 1.0)
    with pytest.raises(DomainError):
        decreasing_rearrangement(f)


def test_profile_validation_and_evaluation():
    p = StaircaseProfile([0, 1, 3], [5, 2])
    assert p(0.0) == 5 and p(0.999) == 5 and p(1.0) == 2 and p(3.0) == 0
    with pytest.raises(DomainError):
        StaircaseProfile([0, 1, 3], [2, 5])
    with pytest.raises(InvalidArgumentError):
        StaircaseProfile([0, 1, 1], [5, 2])
    with pytest.raises(DomainError):
        p(-1.0)


def test_l1_of_random_field_is_exact():
    v = np.random.default_rng(1).random((32, 32))
    f = _field(v, h=1 / 32)
    assert decreasing_rearrangement(f).integral() == pytest.approx(f.integral(), rel=1e-15)


# -- properties -------------------------------------------------------------


@given(nonneg_grid, st.floats(0, 100))
@settings(max_examples=80, deadline=None)
def test_equimeasurability(v, t):
    f = _field(v, h=0.5)
    d = decreasing_rearrangement(f)
    assert d.distribution(t) == pytest.approx(distribution_function(f, t), abs=1e-12)
    assert increasing_rearrangement(d).distribution(t) == pytest.approx(distribution_function(f, t), abs=1e-12)


@given(nonneg_grid)
@settings(max_examples=80, deadline=None)
def test_lp_norms_preserved(v):
    f = _field(v, h=0.5)
    d = decreasing_rearrangement(f)
    u = increasing_rearrangement(f)
    for p in (1.0, 2.0):
        ref = (f.integral(p)) ** (1 / p) if p != 1 else f.integral()
        assert d.lp_norm(p) == pytest.approx(ref, rel=1e-12, abs=1e-12)
        assert u.lp_norm(p) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert d.lp_norm(math.inf) == v.max() == u.lp_norm(math.inf)


@given(nonneg_grid, st.integers(0, 2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_hardy_littlewood(v, seed):
    w = np.random.default_rng(seed).random(v.shape) * 10
    f, g = _field(v, h=0.5), _field(w, h=0.5)
    direct = float(np.sum(v * w)) * f.cell_measure
    fs, gs = decreasing_rearrangement(f), decreasing_rearrangement(g)
    slack = 1e-9 * (1 + abs(direct))
    assert direct <= integrate_product(fs, gs) + slack
    assert direct >= integrate_product(fs, increasing_rearrangement(gs)) - slack


@given(nonneg_grid, st.lists(st.floats(0, 100), min_size=2, max_size=8))
@settings(max_examples=80, deadline=None)
def test_distribution_nonincreasing_and_right_continuous(v, ts):
    f = _field(v)
    ts = sorted(ts)
    mus = [distribution_function(f, t) for t in ts]
    assert all(a >= b for a, b in zip(mus, mus[1:]))
    # mu is constant on [t, next sample value): probe just above each jump point
    u = np.unique(v)
    for t, nxt in zip(u, np.append(u[1:], u[-1] + 1.0)):
        probe = t + 0.5 * (nxt - t)
        if probe < nxt:
            assert distribution_function(f, t) == distribution_function(f, probe)


@given(nonneg_grid)
@settings(max_examples=50, deadline=None)
def test_profile_independent_of_tie_order(v):
    a = staircase_from_samples(v.reshape(-1), 1.0)
    b = staircase_from_samples(v.reshape(-1)[::-1], 1.0)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.breakpoints, b.breakpoints)


@given(nonneg_grid)
@settings(max_examples=50, deadline=None)
def test_reflection_identity(v):
    d = decreasing_rearrangement(_field(v))
    u = increasing_rearrangement(d)
    mid = 0.5 * (d.breakpoints[1:] + d.breakpoints[:-1])
    np.testing.assert_array_equal(u(d.measure - mid), d(mid))
