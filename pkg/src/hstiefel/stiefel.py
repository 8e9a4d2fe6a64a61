"""The quaternionic Stiefel manifold X_{n,k} of n x k matrices with x* x = I_k."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import (
    DEFAULT_TOL,
    QuaternionError,
    QuaternionMatrix,
    ShapeError,
    UNITS,
    random_matrix,
    unitarity_residual,
)
from .qsvd import complete_symplectic, orthonormalize, svd

RANK_THRESHOLD = 1e-10


class ManifoldError(QuaternionError):
    """Raised when a matrix is not on the Stiefel manifold (or not tangent)."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


def sp_dim(m: int) -> int:
    """Real dimension of Sp(m)."""
    return 2 * m * m + m


def stiefel_dim(n: int, k: int) -> int:
    return 4 * n * k - 2 * k * k + k


def _check_nk(n: int, k: int) -> None:
    if not (0 < k < n):
        raise ManifoldError(f"need 0 < k < n, got n={n}, k={k}")


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    mat: QuaternionMatrix

    @property
    def n(self) -> int:
        return self.mat.rows

    @property
    def k(self) -> int:
        return self.mat.cols

    @property
    def T(self) -> QuaternionMatrix:
        return self.mat[: self.n - self.k, :]

    @property
    def P(self) -> QuaternionMatrix:
        return self.mat[self.n - self.k :, :]

    def residual(self) -> float:
        return unitarity_residual(self.mat)

    @classmethod
    def from_blocks(cls, t: QuaternionMatrix, p: QuaternionMatrix, tol: float = DEFAULT_TOL) -> "StiefelPoint":
        return validate_point(QuaternionMatrix.block([[t], [p]]), tol)


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: StiefelPoint
    mat: QuaternionMatrix

    def tangency_residual(self) -> float:
        return tangency_residual(self.base, self.mat)

    def norm(self) -> float:
        return self.mat.norm()


def validate_point(mat: QuaternionMatrix, tol: float = DEFAULT_TOL) -> StiefelPoint:
    _check_nk(mat.rows, mat.cols)
    res = unitarity_residual(mat)
    if not res <= tol:
        raise ManifoldError(f"x*x differs from the identity by {res:.3e} (tol {tol:.1e})", res)
    return StiefelPoint(mat)


def as_point(x, tol: float = DEFAULT_TOL) -> StiefelPoint:
    if isinstance(x, StiefelPoint):
        return x
    return validate_point(x, tol)


def _mat(u) -> QuaternionMatrix:
    return u.mat if isinstance(u, (TangentVector, StiefelPoint)) else u


def normal_project(x: StiefelPoint, u) -> QuaternionMatrix:
    """``x (x* u + u* x) / 2``."""
    u = _mat(u)
    if u.shape != x.mat.shape:
        raise ShapeError(f"shape mismatch: point {x.mat.shape}, vector {u.shape}")
    xu = x.mat.H @ u
    return x.mat @ (xu + xu.H) * 0.5


def tangent_project(x: StiefelPoint, u) -> TangentVector:
    u = _mat(u)
    return TangentVector(x, u - normal_project(x, u))


def tangency_residual(x: StiefelPoint, u) -> float:
    xu = x.mat.H @ _mat(u)
    return (xu + xu.H).norm()


def as_tangent(x: StiefelPoint, v, tol: float = DEFAULT_TOL) -> TangentVector:
    if isinstance(v, TangentVector):
        v = v.mat
    res = tangency_residual(x, v)
    if not res <= tol * max(1.0, v.norm()):
        raise ManifoldError(f"vector is not tangent (x*v + v*x has norm {res:.3e})", res)
    return TangentVector(x, v)


def random_point(n: int, k: int, seed: int) -> StiefelPoint:
    _check_nk(n, k)
    rng = np.random.default_rng(seed)
    return validate_point(orthonormalize(random_matrix(n, k, rng)))


def random_tangent(x: StiefelPoint, seed: int) -> TangentVector:
    rng = np.random.default_rng(seed)
    return tangent_project(x, random_matrix(x.n, x.k, rng))


def frame(x: StiefelPoint) -> QuaternionMatrix:
    """A matrix ``A`` in Sp(n) with ``x = A x_0``, i.e. last k columns equal x."""
    return complete_symplectic(x.mat, tol=max(DEFAULT_TOL, 10 * x.residual()))


def base_point(n: int, k: int) -> StiefelPoint:
    """``x_0 = [0; I_k]``."""
    _check_nk(n, k)
    return StiefelPoint(QuaternionMatrix.block([[QuaternionMatrix.zeros(n - k, k)], [QuaternionMatrix.eye(k)]]))


def canonical_tangent_basis(n: int, k: int) -> list[QuaternionMatrix]:
    """Orthonormal basis of the tangent space at ``x_0`` as ``[X; Y]`` matrices."""
    out = []
    for r in range(n - k):
        for c in range(k):
            for u in range(4):
                arr = np.zeros((n, k, 4))
                arr[r, c, u] = 1.0
                out.append(arr)
    off = n - k
    for d in range(k):
        for u in range(1, 4):
            arr = np.zeros((n, k, 4))
            arr[off + d, d, u] = 1.0
            out.append(arr)
    h = 1.0 / np.sqrt(2.0)
    for r in range(k):
        for c in range(r + 1, k):
            for u in range(4):
                arr = np.zeros((n, k, 4))
                unit = UNITS[u].to_array()
                arr[off + r, c] = h * unit
                arr[off + c, r] = -h * unit * np.array([1.0, -1.0, -1.0, -1.0])
                out.append(arr)
    return [QuaternionMatrix(a) for a in out]


def tangent_basis(x: StiefelPoint, frame_matrix: QuaternionMatrix | None = None) -> list[TangentVector]:
    """Orthonormal real basis of the tangent space at ``x``.

    The canonical basis at ``x_0`` is carried over by a symplectic ``A`` with
    ``x = A x_0``; pass ``frame_matrix`` to choose ``A``.
    """
    a = frame(x) if frame_matrix is None else frame_matrix
    return [TangentVector(x, a @ e) for e in canonical_tangent_basis(x.n, x.k)]


def polar_retract(y: QuaternionMatrix) -> StiefelPoint:
    """Nearest Stiefel point to a full-rank ``y`` in the Frobenius norm."""
    _check_nk(y.rows, y.cols)
    f = svd(y)
    if f.S[-1] < RANK_THRESHOLD:
        raise ManifoldError(f"rank-deficient input (smallest singular value {f.S[-1]:.3e})", float(f.S[-1]))
    return StiefelPoint(f.U[:, : y.cols] @ f.V.H)
