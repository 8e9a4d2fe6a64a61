"""The height function h(x) = Tr(P* P), its gradient and Hessian.

The Hessian is only offered at critical points.  Three independent routes
are provided: the gauge-free closed form (``hessian_apply``), the block form
through an explicit frame ``A`` (``hessian_block_form``), and the assembly
from the ambient Hessian plus the Weingarten term (``hessian_reference``).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .quaternion import DEFAULT_TOL, QuaternionError, QuaternionMatrix, re_trace
from .stiefel import (
    ManifoldError,
    StiefelPoint,
    TangentVector,
    as_point,
    as_tangent,
    frame,
    normal_project,
    sp_dim,
    stiefel_dim,
    tangency_residual,
    tangent_basis,
    tangent_project,
)

SNAP_TOL = 0.05
LEVEL_TOL = 1e-6
_SNAP_VALUES = np.array([-2.0, 0.0, 2.0])


class NotCriticalError(QuaternionError):
    pass


class LevelError(QuaternionError):
    pass


def _stack(top: QuaternionMatrix, bottom: QuaternionMatrix) -> QuaternionMatrix:
    return QuaternionMatrix.block([[top], [bottom]])


def _split(mat: QuaternionMatrix, k: int) -> tuple[QuaternionMatrix, QuaternionMatrix]:
    n = mat.rows
    return mat[: n - k, :], mat[n - k :, :]


def height(x) -> float:
    x = as_point(x)
    p = x.P
    return re_trace(p.H @ p)


def gradient_field(mat: QuaternionMatrix, k: int) -> QuaternionMatrix:
    """``-2 [T P*P; (P P* - I) P]`` for any ambient ``n x k`` matrix."""
    t, p = _split(mat, k)
    ptp = p.H @ p
    return _stack(t @ ptp * -2.0, (p @ p.H - QuaternionMatrix.eye(k)) @ p * -2.0)


def gradient(x) -> TangentVector:
    x = as_point(x)
    return TangentVector(x, gradient_field(x.mat, x.k))


def gradient_extension(mat) -> QuaternionMatrix:
    """Euclidean gradient ``[0; 2P]`` of Tr(P* P) on all of H^{n x k}."""
    if isinstance(mat, StiefelPoint):
        mat = mat.mat
    n, k = mat.shape
    return _stack(QuaternionMatrix.zeros(n - k, k), mat[n - k :, :] * 2.0)


class CriticalCheck(NamedTuple):
    critical: bool
    residual: float


def is_critical(x, tol: float = DEFAULT_TOL) -> CriticalCheck:
    x = as_point(x)
    res = (x.T @ x.P.H).norm()
    return CriticalCheck(bool(res <= tol), res)


def critical_levels(n: int, k: int) -> list[int]:
    if not (0 < k < n):
        raise ManifoldError(f"need 0 < k < n, got n={n}, k={k}")
    return list(range(max(0, 2 * k - n), k + 1))


def _check_level(n: int, k: int, q: int) -> int:
    levels = critical_levels(n, k)
    if q not in levels:
        raise LevelError(f"q={q} is not a critical level of X_{{{n},{k}}} (levels {levels[0]}..{levels[-1]})")
    return k - q


def critical_level(x, tol: float = DEFAULT_TOL) -> int:
    """Level of a critical point; h takes integer values there."""
    x = as_point(x)
    ok, res = is_critical(x, tol)
    if not ok:
        raise NotCriticalError(f"point is not critical (|T P*| = {res:.3e})")
    h = height(x)
    q = int(round(h))
    if abs(h - q) > LEVEL_TOL:
        raise LevelError(f"height {h!r} of a critical point is not an integer")
    return q


def notable_point(n: int, k: int, q: int) -> StiefelPoint:
    """Canonical representative of level q: T = [I_p 0; 0 0], P = diag(0_p, I_q)."""
    p = _check_level(n, k, q)
    t = np.zeros((n - k, k))
    t[np.arange(p), np.arange(p)] = 1.0
    pm = np.diag(np.concatenate([np.zeros(p), np.ones(q)]))
    return StiefelPoint(QuaternionMatrix.from_real(np.vstack([t, pm])))


def weingarten(x: StiefelPoint, v, w: QuaternionMatrix, tol: float = DEFAULT_TOL) -> TangentVector:
    """Shape operator ``-v x* w - x (v* w + w* v) / 2`` for tangent v, normal w."""
    v = as_tangent(x, v, tol)
    leak = tangent_project(x, w).norm()
    if leak > tol * max(1.0, w.norm()):
        raise ManifoldError(f"w is not normal at x (tangential part {leak:.3e})", leak)
    vw = v.mat.H @ w
    out = v.mat @ x.mat.H @ w * -1.0 - x.mat @ (vw + vw.H) * 0.5
    return TangentVector(x, out)


def _require_critical(x, v, tol: float) -> tuple[StiefelPoint, TangentVector]:
    x = as_point(x)
    ok, res = is_critical(x, tol)
    if not ok:
        raise NotCriticalError(f"Hessian requested at a non-critical point (|T P*| = {res:.3e})")
    return x, as_tangent(x, v, tol)


def hessian_apply(x, v, tol: float = DEFAULT_TOL) -> TangentVector:
    """Riemannian Hessian of h at a critical point, applied to a tangent vector.

    Uses ``-2 (v x* + x v*) x_0 P - 2 [0; P P* - I] x_0* v`` which depends on
    ``x`` and ``v`` only.
    """
    x, v = _require_critical(x, v, tol)
    k = x.k
    _, p = _split(x.mat, k)
    _, v_bot = _split(v.mat, k)
    zeros = QuaternionMatrix.zeros(x.n - k, k)
    x0p = _stack(zeros, p)
    first = (v.mat @ x.mat.H + x.mat @ v.mat.H) @ x0p
    second = _stack(zeros, (p @ p.H - QuaternionMatrix.eye(k)) @ v_bot)
    return TangentVector(x, (first + second) * -2.0)


def hessian_block_form(x, v, frame_matrix: QuaternionMatrix | None = None, tol: float = DEFAULT_TOL) -> TangentVector:
    """Hessian through a frame ``A = [alpha T; beta P]`` in Sp(n) with ``x = A x_0``.

    Computes ``-2 A [X P*P - beta* beta X; X* beta* P - P* beta X]`` where
    ``[X; Y] = A* v``.  The result must not depend on the choice of frame.
    """
    x, v = _require_critical(x, v, tol)
    n, k = x.n, x.k
    a = frame(x) if frame_matrix is None else frame_matrix
    if not (a[:, n - k :] - x.mat).norm() <= tol:
        raise ManifoldError("frame does not carry x_0 to x")
    beta = a[n - k :, : n - k]
    p = x.P
    xy = a.H @ v.mat
    big_x = xy[: n - k, :]
    top = big_x @ p.H @ p - beta.H @ beta @ big_x
    bottom = big_x.H @ beta.H @ p - p.H @ beta @ big_x
    return TangentVector(x, a @ _stack(top, bottom) * -2.0)


def hessian_reference(x, v, tol: float = DEFAULT_TOL) -> TangentVector:
    """Hessian assembled as ``P_x(H phi(v)) + W_x(v, P_x^perp grad phi)``.

    ``H phi(v) = 2 [0; x_0* v]`` is the Hessian of the ambient extension and
    ``W`` the Weingarten map.  Independent of :func:`hessian_apply`.
    """
    x, v = _require_critical(x, v, tol)
    k = x.k
    _, v_bot = _split(v.mat, k)
    h_phi = _stack(QuaternionMatrix.zeros(x.n - k, k), v_bot * 2.0)
    normal_grad = normal_project(x, gradient_extension(x.mat))
    w = weingarten(x, v, normal_grad, tol)
    return TangentVector(x, tangent_project(x, h_phi).mat + w.mat)


def hessian_matrix(x, basis: list[TangentVector] | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Real d x d matrix of the Hessian in an orthonormal tangent basis."""
    x = as_point(x)
    basis = tangent_basis(x) if basis is None else basis
    vecs = np.array([e.mat.real_vector() for e in basis])
    images = np.array([hessian_apply(x, e, tol).mat.real_vector() for e in basis])
    # column j holds <e_i, H e_j>
    return vecs @ images.T


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: list
    mult_minus2: int
    mult_zero: int
    mult_plus2: int
    residual: float
    rank: int
    asymmetry: float

    def to_dict(self) -> dict:
        return asdict(self)


def hessian_spectrum(x, tol: float = DEFAULT_TOL, frame_matrix: QuaternionMatrix | None = None) -> SpectrumReport:
    x = as_point(x)
    basis = tangent_basis(x, frame_matrix)
    h = hessian_matrix(x, basis, tol)
    asym = float(np.linalg.norm(h - h.T))
    eig = np.linalg.eigvalsh(0.5 * (h + h.T))
    dist = np.abs(eig[:, None] - _SNAP_VALUES[None, :])
    residual = float(dist.min(axis=1).max()) if len(eig) else 0.0
    if residual > SNAP_TOL:
        raise NotCriticalError(f"Hessian eigenvalue {residual:.3e} away from {{-2, 0, 2}}")
    counts = np.bincount(dist.argmin(axis=1), minlength=3)
    rank = int(np.linalg.matrix_rank(h, tol=SNAP_TOL))
    return SpectrumReport(
        eigenvalues=[float(e) for e in eig],
        mult_minus2=int(counts[0]),
        mult_zero=int(counts[1]),
        mult_plus2=int(counts[2]),
        residual=residual,
        rank=rank,
        asymmetry=asym,
    )


@dataclass(frozen=True)
class SigmaInvariants:
    n: int
    k: int
    q: int
    p: int
    index: int
    kernel_dim: int
    plus_dim: int
    dim_sigma: int
    dim_X: int

    def to_dict(self) -> dict:
        return asdict(self)


def group_dims(n: int, k: int, q: int) -> tuple[int, int]:
    """Dimensions of K_{n,k} and of the isotropy group L_{n,k,q}."""
    p = _check_level(n, k, q)
    dim_k = sp_dim(n - k) + 2 * sp_dim(k)
    dim_l = 2 * sp_dim(p) + sp_dim(n - k - p) + sp_dim(k - p)
    return dim_k, dim_l


def bundle_dim(n: int, k: int, q: int) -> int:
    """Fibre Sp(k) over Gr_{n-k,p} x Gr_{k,k-p}."""
    p = _check_level(n, k, q)
    return sp_dim(k) + 4 * p * (n - k - p) + 4 * p * (k - p)


def sigma_invariants(n: int, k: int, q: int) -> SigmaInvariants:
    p = _check_level(n, k, q)
    dim_k, dim_l = group_dims(n, k, q)
    return SigmaInvariants(
        n=n,
        k=k,
        q=q,
        p=p,
        index=4 * (n - 2 * k + q) * q,
        kernel_dim=4 * n * p - 8 * p * p + 2 * k * k + k,
        plus_dim=4 * p * p,
        dim_sigma=dim_k - dim_l,
        dim_X=stiefel_dim(n, k),
    )
