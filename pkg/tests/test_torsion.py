import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wulffsym import (
    DomainError,
    GridField,
    eval_insulation_functional,
    eval_penalized_functional,
    minimize_insulation,
    minimize_penalized,
    parse_norm,
    polygon_domain,
    radial_insulation_oracle,
    radial_insulation_value,
    radial_torsion_energy,
    radial_torsion_minimizer,
    radial_torsion_oracle,
    rearranged_competitor_checks,
    saint_venant_compare,
    square_domain,
    wulff_constant,
    wulff_domain,
    zero_extension_jump,
)
from wulffsym.optimize import projected_gradient
from wulffsym.torsion import _dirichlet_adjoint, _dirichlet_grad, _interior_adjoint, _interior_grad

P2 = parse_norm("p:2")
G2 = wulff_constant(P2)
WEIGHTED = parse_norm("weighted:4,0,1")
GW = wulff_constant(WEIGHTED)


def _unit_square_field(values):
    v = np.asarray(values, dtype=float)
    return GridField(v, np.ones(v.shape, bool), (0.0, 0.0), 1.0 / v.shape[0])


# -- functionals ----------------------------------------------------------------


def test_penalized_functional_examples():
    zero = _unit_square_field(np.zeros((16, 16)))
    assert eval_penalized_functional(zero, P2, 3.0) == 0.0
    dom = wulff_domain(P2, 1.0, 256)
    X, Y = np.stack(zero.cell_centers_for(dom.mask.shape, dom.origin, dom.spacing))
    psi = dom.field((1.0 - X * X - Y * Y) / 4.0)
    v = eval_penalized_functional(psi, P2, 0.0)
    assert abs(v + math.pi / 16) / (math.pi / 16) < 0.02
    assert eval_penalized_functional(psi, P2, 10.0) > 0
    with pytest.raises(DomainError):
        eval_penalized_functional(psi, P2, -1.0)


def test_zero_extension_jump_examples():
    one = _unit_square_field(np.ones((32, 32)))
    assert zero_extension_jump(one, P2) == pytest.approx(4.0, rel=1e-12)
    assert zero_extension_jump(one, WEIGHTED) == pytest.approx(6.0, rel=1e-12)
    inner = np.zeros((32, 32))
    inner[4:28, 4:28] = 1.0
    assert zero_extension_jump(_unit_square_field(inner), P2) == 0.0


def test_insulation_functional_examples():
    one = _unit_square_field(np.ones((32, 32)))
    assert eval_insulation_functional(one, P2, 1.0) == pytest.approx(16.0, rel=1e-12)
    with pytest.raises(DomainError):
        eval_insulation_functional(one, P2, 0.0)
    with pytest.raises(DomainError):
        eval_insulation_functional(_unit_square_field(np.zeros((4, 4))), P2, 1.0)


def test_insulation_closed_form_matches_oracle():
    for geom in (G2, GW):
        for R, m in ((1.0, 1.0), (0.7, 0.2), (1.3, 5.0)):
            exact = radial_insulation_value(geom, R, m)
            assert radial_insulation_oracle(geom, R, m) == pytest.approx(exact, rel=1e-3)
    assert radial_insulation_value(G2, 1.0, 1.0) == pytest.approx(0.25 + math.pi / 8)


# -- radial penalized problem -----------------------------------------------------


def _closed_form(geom, R, Lam):
    return geom.kappa / 16 * max(R * R - 8 * Lam, 0.0) ** 2


@pytest.mark.parametrize("Lam", [0.0, 0.01, 0.05, 0.1, 0.2])
def test_radial_minimizer_matches_closed_form_and_oracle(Lam):
    rad = radial_torsion_minimizer(G2, 1.0, Lam)
    assert rad.torsion == pytest.approx(_closed_form(G2, 1.0, Lam), rel=1e-6, abs=1e-12)
    assert radial_torsion_oracle(G2, 1.0, Lam) == pytest.approx(rad.torsion, rel=2e-2, abs=1e-4)


def test_radial_minimizer_structure():
    rad = radial_torsion_minimizer(GW, 1.2, 0.05)
    r0 = rad.dead_core_radius
    assert 0 < r0 < 1.2
    assert rad.profile(1.2) == 0.0
    core = rad.profile(np.linspace(0, r0, 10))
    np.testing.assert_allclose(core, core[0])
    assert np.all(rad.derivative(np.linspace(0, r0 * 0.99, 10)) == 0)
    assert np.all(np.diff(rad.profile(np.linspace(0, 1.2, 50))) <= 0)
    assert not rad.fallback_used


def test_radial_minimizer_large_lambda_and_monotone():
    big = radial_torsion_minimizer(G2, 1.0, 1.0)
    assert big.torsion == 0.0 and big.dead_core_radius == 1.0
    ts = [radial_torsion_minimizer(G2, 1.0, lam).torsion for lam in np.linspace(0, 0.15, 8)]
    assert all(a >= b for a, b in zip(ts, ts[1:]))
    with pytest.raises(DomainError):
        radial_torsion_minimizer(G2, 1.0, -0.1)
    with pytest.raises(DomainError):
        radial_torsion_minimizer(G2, 0.0, 0.1)


def test_radial_minimizer_beats_random_profiles():
    rng = np.random.default_rng(7)
    R, Lam, kappa = 1.0, 0.04, G2.kappa
    best = radial_torsion_minimizer(G2, R, Lam).functional_value
    r = np.linspace(0, R, 2001)
    for _ in range(200):
        r0 = rng.uniform(0, R)
        knots = np.sort(rng.uniform(r0, R, 6))
        vals = np.sort(rng.uniform(0, 0.3, 6))[::-1]
        phi = np.interp(r, np.concatenate([[r0], knots, [R]]), np.concatenate([[vals[0]], vals, [0.0]]))
        phi[r <= r0] = vals[0]
        d = np.gradient(phi, r)
        w = 2 * kappa * r
        active = np.abs(d) > 1e-12
        energy = np.trapezoid((0.5 * d * d - phi) * w, r) + Lam * np.trapezoid(active * w, r)
        assert energy >= best - 1e-4


def test_radial_energy_at_full_core_is_zero():
    assert radial_torsion_energy(G2, 1.0, 0.3, 1.0) == 0.0


# -- discrete operators ---------------------------------------------------------


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_gradient_schemes_are_adjoint(seed):
    rng = np.random.default_rng(seed)
    h = 0.1
    psi = rng.standard_normal((7, 9))
    G = rng.standard_normal(_dirichlet_grad(psi, h).shape)
    assert np.sum(_dirichlet_grad(psi, h) * G) == pytest.approx(np.sum(psi * _dirichlet_adjoint(G, h)))
    mask = rng.random((7, 9)) > 0.3
    psi = np.where(mask, psi, 0.0)
    Gi = rng.standard_normal(_interior_grad(psi, mask, h).shape)
    lhs = np.sum(_interior_grad(psi, mask, h) * Gi)
    assert lhs == pytest.approx(np.sum(psi * _interior_adjoint(Gi, mask, h)))


def test_projected_gradient_on_box_quadratic():
    a = np.array([1.5, -2.0, 0.3])

    def fun(x):
        return float(np.sum((x - a) ** 2)), 2 * (x - a)

    res = projected_gradient(fun, np.zeros(3), lower=0.0, tol=1e-12)
    assert res.converged
    np.testing.assert_allclose(res.x, np.maximum(a, 0), atol=1e-9)
    free = projected_gradient(fun, np.zeros(3), lower=None, tol=1e-12)
    np.testing.assert_allclose(free.x, a, atol=1e-9)


# -- grid problems --------------------------------------------------------------


def test_minimize_penalized_on_disk_is_close_to_radial():
    dom = wulff_domain(P2, 1.0, 48)
    sols = minimize_penalized(dom, P2, 0.0, trials=1, seed=3)
    assert sols[0].converged
    T = -sols[0].value
    assert T <= _closed_form(G2, 1.0, 0.0) * 1.001
    assert T > 0.85 * _closed_form(G2, 1.0, 0.0)


def test_minimize_insulation_square():
    dom = square_domain(1.0, 24)
    sols = minimize_insulation(dom, P2, 1.0, trials=1, seed=1)
    R = math.sqrt(dom.measure / G2.kappa)
    assert 1.0 / sols[0].value <= radial_insulation_value(G2, R, 1.0)


def test_saint_venant_on_wulff_ball_is_near_equality():
    dom = wulff_domain(WEIGHTED, 1.0, 48)
    rep = saint_venant_compare(dom, WEIGHTED, GW, "penalized", 0.02, trials=1, seed=5)
    assert rep.passed
    # the zeroed boundary layer costs about one cell of width at this resolution
    assert 0.75 * rep.T_star < rep.T_omega <= rep.T_star
    rep = saint_venant_compare(square_domain(1.0, 32), P2, G2, "insulation", 1.0, trials=1, seed=5)
    assert rep.passed and rep.T_omega <= rep.T_star


def test_rearranged_competitor_relations():
    dom = square_domain(1.0, 32)
    rng = np.random.default_rng(2)
    psi = dom.field(rng.random(dom.mask.shape))
    for scheme in ("dirichlet", "interior"):
        checks = rearranged_competitor_checks(psi, WEIGHTED, GW, dom.polygon, scheme)
        assert [c.name for c in checks] == ["energy_equality", "boundary_equality", "support_equality", "l1_inequality"]
        assert all(c.passed for c in checks)


def test_domain_errors():
    with pytest.raises(DomainError):
        polygon_domain([[0, 0], [1, 1], [1, 0], [0, 1]])  # bow tie
    with pytest.raises(DomainError):
        polygon_domain([[0, 0], [1, 0], [2, 0]])
    with pytest.raises(DomainError):
        square_domain(-1.0)
    with pytest.raises(DomainError):
        saint_venant_compare(square_domain(1.0, 8), P2, G2, "sideways", 1.0)


def test_zero_extension_jump_matches_edge_integral():
    n = 256
    x = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    psi = _unit_square_field(X * (1 + Y))
    # traces: bottom x, top 2x, right 1 + y, left 0
    exact = 0.5 + 1.0 + 1.5
    assert zero_extension_jump(psi, P2) == pytest.approx(exact, rel=5e-3)
    # H(e1) = 2, H(e2) = 1 for diag(4, 1)
    assert zero_extension_jump(psi, WEIGHTED) == pytest.approx(0.5 + 1.0 + 2 * 1.5, rel=5e-3)


def test_constant_competitor_on_wulff_ball():
    dom = wulff_domain(P2, 1.0, 128)
    one = dom.field(np.ones(dom.mask.shape))
    q = eval_insulation_functional(one, P2, 2.0, dom.polygon)
    area = one.integral()
    assert q == pytest.approx((2 * math.pi) ** 2 / (2.0 * area**2), rel=2e-2)
    assert eval_insulation_functional(one, P2, 1e12, dom.polygon) < 1e-9


def test_radial_torsion_scaling_and_square_ordering():
    t2 = radial_torsion_minimizer(G2, 2.0, 0.0).torsion
    assert t2 == pytest.approx(16 * radial_torsion_minimizer(G2, 1.0, 0.0).torsion, rel=1e-12)
    assert t2 == pytest.approx(math.pi, abs=G2.kappa_error + 1e-6)
    rep = saint_venant_compare(square_domain(1.0, 32), P2, G2, "penalized", 0.0, trials=1, seed=0)
    # unit square: T = (1/2) * integral of the torsion function, 0.0351 / 2; disk of area 1: 1 / (16 pi)
    assert rep.T_star == pytest.approx(1 / (16 * math.pi), rel=1e-6)
    assert 0.8 * 0.0351 / 2 < rep.T_omega <= 0.0351 / 2 < rep.T_star
