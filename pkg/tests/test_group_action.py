import numpy as np
import pytest

from hstiefel.group_action import (
    GroupElement,
    act_point,
    act_tangent,
    compose,
    isotropy_embed,
    random_group_element,
    random_isotropy_element,
    random_symplectic,
    transitivity_witness,
)
from hstiefel.morse import critical_level, hessian_apply, height, is_critical, notable_point
from hstiefel.quaternion import QuaternionError, QuaternionMatrix, ShapeError, frobenius_inner, random_matrix
from hstiefel.stiefel import random_point, random_tangent

from conftest import random_critical_point, valid_triples


def test_identity_acts_trivially():
    x = random_point(5, 2, 0)
    g = GroupElement.identity(5, 2)
    assert act_point(g, x).mat == x.mat
    v = random_tangent(x, 0)
    assert act_tangent(g, v).mat == v.mat


def test_random_group_element_seeded_and_symplectic():
    g1, g2 = random_group_element(5, 2, 9), random_group_element(5, 2, 9)
    assert g1.m == g2.m and g1.a == g2.a and g1.b == g2.b
    assert g1.n == 5 and g1.k == 2


def test_group_element_validated():
    rng = np.random.default_rng(0)
    with pytest.raises(QuaternionError):
        GroupElement(random_matrix(2, 2, rng), QuaternionMatrix.eye(1), QuaternionMatrix.eye(1))
    with pytest.raises(ShapeError):
        GroupElement(QuaternionMatrix.eye(2), QuaternionMatrix.eye(1), QuaternionMatrix.eye(2))


def test_act_point_preserves_manifold():
    for seed in range(5):
        x = random_point(6, 3, seed)
        y = act_point(random_group_element(6, 3, seed), x)
        assert y.residual() < 1e-12
        assert height(y) == pytest.approx(height(x), abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        act_point(random_group_element(5, 2, 0), random_point(4, 2, 0))


def test_level_preserved_on_notable_points():
    for n, k, q in valid_triples(6):
        g = random_group_element(n, k, n * 100 + k * 10 + q)
        y = act_point(g, notable_point(n, k, q))
        assert is_critical(y, 1e-12).critical
        assert abs(height(y) - q) < 1e-10


def test_action_axioms():
    x = random_point(5, 3, 1)
    g, h = random_group_element(5, 3, 1), random_group_element(5, 3, 2)
    lhs = act_point(compose(g, h), x).mat
    rhs = act_point(g, act_point(h, x)).mat
    assert (lhs - rhs).norm() < 1e-11
    assert (act_point(g * g.inverse(), x).mat - x.mat).norm() < 1e-12


def test_act_tangent_isometric_and_tangent():
    x = random_point(4, 2, 3)
    g = random_group_element(4, 2, 3)
    u, v = random_tangent(x, 1), random_tangent(x, 2)
    gu, gv = act_tangent(g, u), act_tangent(g, v)
    assert gu.tangency_residual() < 1e-12
    assert frobenius_inner(gu.mat, gv.mat) == pytest.approx(frobenius_inner(u.mat, v.mat), abs=1e-11)


def test_hessian_equivariance():
    for seed in range(20):
        x, _ = random_critical_point(seed)
        g = random_group_element(x.n, x.k, seed + 1)
        v = random_tangent(x, seed)
        lhs = hessian_apply(act_point(g, x), act_tangent(g, v)).mat
        rhs = act_tangent(g, hessian_apply(x, v)).mat
        assert (lhs - rhs).norm() < 1e-10


def test_isotropy_identity_blocks():
    eye = QuaternionMatrix.eye
    g = isotropy_embed(eye(1), eye(2), eye(1), eye(1))
    ident = GroupElement.identity(5, 2)
    assert g.m == ident.m and g.a == ident.a and g.b == ident.b


def test_isotropy_fixes_notable_point():
    for n, k, q in valid_triples(6):
        x = notable_point(n, k, q)
        for seed in range(2):
            g = random_isotropy_element(n, k, q, seed)
            assert (act_point(g, x).mat - x.mat).norm() < 1e-12


def test_non_isotropy_element_moves_point():
    n, k, q = 5, 2, 1
    rng = np.random.default_rng(1)
    g = random_isotropy_element(n, k, q, 1)
    bad = GroupElement(g.m, g.a, random_symplectic(k, rng))
    x = notable_point(n, k, q)
    assert (act_point(bad, x).mat - x.mat).norm() > 1e-3


def test_isotropy_size_mismatch():
    eye = QuaternionMatrix.eye
    with pytest.raises(ShapeError):
        isotropy_embed(eye(1), eye(2), eye(2), eye(1))


def test_transitivity_witness():
    for seed in range(40):
        x, q = random_critical_point(seed)
        g, level = transitivity_witness(x)
        assert level == q == critical_level(x)
        y = act_point(g, notable_point(x.n, x.k, q))
        assert (y.mat - x.mat).norm() < 1e-9


def test_witness_requires_critical_point():
    with pytest.raises(QuaternionError):
        transitivity_witness(random_point(4, 2, 0))
