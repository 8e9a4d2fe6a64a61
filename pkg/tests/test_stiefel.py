import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hstiefel.group_action import random_symplectic
from hstiefel.morse import gradient_extension
from hstiefel.quaternion import QuaternionMatrix, frobenius_inner, random_matrix, unitarity_residual
from hstiefel.stiefel import (
    ManifoldError,
    base_point,
    normal_project,
    polar_retract,
    random_point,
    random_tangent,
    sp_dim,
    stiefel_dim,
    tangency_residual,
    tangent_basis,
    tangent_project,
    validate_point,
)

from conftest import GRID

seeds = st.integers(0, 2**32 - 1)
grid_points = st.tuples(st.sampled_from(GRID), seeds)


def test_validate_point():
    validate_point(base_point(3, 2).mat)
    with pytest.raises(ManifoldError) as info:
        validate_point(QuaternionMatrix.from_real([[1.0], [1.0]]))
    assert info.value.residual == pytest.approx(1.0)
    h = 1 / np.sqrt(2)
    validate_point(QuaternionMatrix.from_real([[h], [h]]))


def test_k_must_be_below_n():
    with pytest.raises(ManifoldError):
        validate_point(QuaternionMatrix.eye(2))
    with pytest.raises(ManifoldError):
        random_point(1, 1, 0)


def test_random_point_deterministic():
    assert random_point(2, 1, 7).mat == random_point(2, 1, 7).mat
    assert random_point(4, 2, 3).residual() < 1e-10


def test_tangent_projection_fixes_tangent_vectors():
    x = random_point(4, 2, 0)
    v = random_tangent(x, 1)
    assert (tangent_project(x, v).mat - v.mat).norm() < 1e-14
    assert normal_project(x, v).norm() < 1e-14


def test_projection_of_point_itself():
    x = random_point(5, 3, 2)
    assert tangent_project(x, x.mat).norm() < 1e-14
    assert (normal_project(x, x.mat) - x.mat).norm() < 1e-14


def test_normal_part_of_extension_gradient():
    x = random_point(5, 2, 9)
    expected = x.mat @ (x.P.H @ x.P * 2.0)
    assert (normal_project(x, gradient_extension(x)) - expected).norm() < 1e-14


@settings(max_examples=30, deadline=None)
@given(grid_points)
def test_projectors_complementary_idempotent_orthogonal(arg):
    (n, k), seed = arg
    x = random_point(n, k, seed)
    u = random_matrix(n, k, np.random.default_rng(seed + 1))
    tan = tangent_project(x, u).mat
    nor = normal_project(x, u)
    assert (tan + nor - u).norm() < 1e-11
    assert (tangent_project(x, tan).mat - tan).norm() < 1e-12
    assert (normal_project(x, nor) - nor).norm() < 1e-11
    assert abs(frobenius_inner(tan, nor)) < 1e-11


@settings(max_examples=20, deadline=None)
@given(grid_points)
def test_random_tangent_is_tangent(arg):
    (n, k), seed = arg
    x = random_point(n, k, seed)
    assert random_tangent(x, seed).tangency_residual() < 1e-12


def test_random_tangent_seeded():
    x = random_point(3, 1, 0)
    assert random_tangent(x, 5).mat == random_tangent(x, 5).mat


def test_tangent_at_base_point_has_skew_bottom():
    x0 = base_point(4, 2)
    v = random_tangent(x0, 3)
    y = v.mat[2:, :]
    assert (y + y.H).norm() < 1e-14


@settings(max_examples=20, deadline=None)
@given(grid_points)
def test_transport_of_tangent_spaces(arg):
    (n, k), seed = arg
    rng = np.random.default_rng(seed)
    a = random_symplectic(n, rng)
    x0 = base_point(n, k)
    v = random_tangent(x0, seed)
    x = validate_point(a @ x0.mat)
    assert tangency_residual(x, a @ v.mat) < 1e-11


@pytest.mark.parametrize("n,k,d", [(2, 1, 7), (4, 2, 26)])
def test_tangent_basis_size(n, k, d):
    assert len(tangent_basis(random_point(n, k, 0))) == d


@pytest.mark.parametrize("n,k", GRID)
def test_tangent_basis_orthonormal_and_tangent(n, k):
    x = random_point(n, k, 11)
    basis = tangent_basis(x)
    vecs = np.array([e.mat.real_vector() for e in basis])
    assert np.abs(vecs @ vecs.T - np.eye(len(basis))).max() < 1e-10
    assert max(e.tangency_residual() for e in basis) < 1e-11
    assert len(basis) == stiefel_dim(n, k) == sp_dim(n) - sp_dim(n - k)
    # spans the tangent space: a random tangent vector is recovered from its coordinates
    v = random_tangent(x, 3)
    recon = sum((e.mat * frobenius_inner(e.mat, v.mat) for e in basis), QuaternionMatrix.zeros(n, k))
    assert (recon - v.mat).norm() < 1e-11


def test_polar_retract():
    x = random_point(4, 2, 1)
    assert (polar_retract(x.mat).mat - x.mat).norm() < 1e-13
    assert (polar_retract(x.mat * 2.0).mat - x.mat).norm() < 1e-13
    rng = np.random.default_rng(0)
    y = x.mat + random_matrix(4, 2, rng) * 1e-3
    assert unitarity_residual(polar_retract(y).mat) < 1e-10


def test_polar_retract_is_nearest_point():
    # no nearby point on the manifold is closer than the retraction
    rng = np.random.default_rng(4)
    y = random_matrix(4, 2, rng)
    r = polar_retract(y)
    best = (r.mat - y).norm()
    for seed in range(50):
        z = polar_retract(r.mat + random_tangent(r, seed).mat * 0.05)
        assert (z.mat - y).norm() >= best - 1e-12


def test_polar_retract_rank_deficient():
    y = QuaternionMatrix.from_real([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ManifoldError):
        polar_retract(y)
