"""Action of K_{n,k} = Sp(n-k) x Sp(k) x Sp(k) on X_{n,k}: (m, a, b).x = [m T b*; a P b*]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .morse import critical_level, notable_point
from .quaternion import DEFAULT_TOL, QuaternionError, QuaternionMatrix, ShapeError, random_matrix, unitarity_residual
from .qsvd import orthonormalize, relative_svd
from .stiefel import StiefelPoint, TangentVector, _check_nk, as_point, as_tangent


@dataclass(frozen=True, eq=False)
class GroupElement:
    m: QuaternionMatrix
    a: QuaternionMatrix
    b: QuaternionMatrix
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.a.shape != self.b.shape:
            raise ShapeError(f"a and b must both be k x k, got {self.a.shape} and {self.b.shape}")
        for name in ("m", "a", "b"):
            mat = getattr(self, name)
            if mat.rows != mat.cols:
                raise ShapeError(f"{name} must be square, got {mat.shape}")
            res = unitarity_residual(mat)
            if res > self.tol:
                raise QuaternionError(f"{name} is not symplectic (residual {res:.3e})")

    @property
    def n(self) -> int:
        return self.m.rows + self.a.rows

    @property
    def k(self) -> int:
        return self.a.rows

    @classmethod
    def identity(cls, n: int, k: int) -> "GroupElement":
        return cls(QuaternionMatrix.eye(n - k), QuaternionMatrix.eye(k), QuaternionMatrix.eye(k))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.m.H, self.a.H, self.b.H)

    def left_block(self) -> QuaternionMatrix:
        return QuaternionMatrix.block_diag(self.m, self.a)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    if (g.n, g.k) != (h.n, h.k):
        raise ShapeError("group elements act on different manifolds")
    return GroupElement(g.m @ h.m, g.a @ h.a, g.b @ h.b, tol=max(g.tol, h.tol))


def _check_dims(g: GroupElement, n: int, k: int) -> None:
    if (g.n, g.k) != (n, k):
        raise ShapeError(f"element of K_{{{g.n},{g.k}}} cannot act on X_{{{n},{k}}}")


def act_point(g: GroupElement, x) -> StiefelPoint:
    x = as_point(x)
    _check_dims(g, x.n, x.k)
    return StiefelPoint(g.left_block() @ x.mat @ g.b.H)


def act_tangent(g: GroupElement, v: TangentVector, tol: float = DEFAULT_TOL) -> TangentVector:
    v = as_tangent(v.base, v, tol)
    return TangentVector(act_point(g, v.base), g.left_block() @ v.mat @ g.b.H)


def random_symplectic(size: int, rng: np.random.Generator) -> QuaternionMatrix:
    if size == 0:
        return QuaternionMatrix.zeros(0, 0)
    return orthonormalize(random_matrix(size, size, rng))


def random_group_element(n: int, k: int, seed: int) -> GroupElement:
    _check_nk(n, k)
    rng = np.random.default_rng(seed)
    m = random_symplectic(n - k, rng)
    a = random_symplectic(k, rng)
    b = random_symplectic(k, rng)
    return GroupElement(m, a, b)


def isotropy_embed(m1, m2, a1, a2) -> GroupElement:
    """Embedding of Sp(p) x Sp(n-k-p) x Sp(p) x Sp(k-p) as the stabilizer of x_0^q."""
    if a1.rows != m1.rows:
        raise ShapeError(f"m1 and a1 must have the same size p, got {m1.rows} and {a1.rows}")
    return GroupElement(
        QuaternionMatrix.block_diag(m1, m2),
        QuaternionMatrix.block_diag(a1, a2),
        QuaternionMatrix.block_diag(m1, a2),
    )


def random_isotropy_element(n: int, k: int, q: int, seed: int) -> GroupElement:
    p = k - q
    rng = np.random.default_rng(seed)
    return isotropy_embed(
        random_symplectic(p, rng),
        random_symplectic(n - k - p, rng),
        random_symplectic(p, rng),
        random_symplectic(k - p, rng),
    )


def _permutation(order: list[int], signs: list[float] | None = None) -> QuaternionMatrix:
    size = len(order)
    real = np.zeros((size, size))
    signs = signs or [1.0] * size
    for col, row in enumerate(order):
        real[row, col] = signs[col]
    return QuaternionMatrix.from_real(real)


def transitivity_witness(x, tol: float = DEFAULT_TOL) -> tuple[GroupElement, int]:
    """Find g in K_{n,k} with ``g . x_0^q = x`` for a critical point x at level q.

    The relative SVD puts the unit block first, whereas the notable point
    puts it last; fixed signed permutations bridge the two layouts.
    """
    x = as_point(x)
    q = critical_level(x, tol)
    n, k = x.n, x.k
    p = k - q
    rel = relative_svd(x)
    if rel.q != 0 or rel.p != q:
        raise QuaternionError(f"relative SVD blocks (p={rel.p}, q={rel.q}, r={rel.r}) do not match level {q}")
    pp = n - k - p  # rows of T beyond the unit block of the notable point
    # columns: notable order (p zeros, q ones) -> decomposition order (q ones, p zeros)
    rho = _permutation([q + i for i in range(p)] + list(range(q)))
    # rows of T: notable order (p ones, pp zeros) -> decomposition order (pp zeros, p entries -1)
    sigma = _permutation([pp + i for i in range(p)] + list(range(pp)), [-1.0] * p + [1.0] * pp)
    tau = _permutation([q + i for i in range(p)] + list(range(q)))
    g = GroupElement(rel.m @ sigma, rel.a @ tau, rel.b @ rho, tol=max(tol, 1e-9))
    return g, q

