"""Quaternionic SVD (one-sided Jacobi) and the relative SVD of a Stiefel point.

The Jacobi iteration works directly on quaternion columns: each pair is
first phase-aligned by a unit quaternion so that their Hermitian product is
real, then rotated by an ordinary real Givens rotation.  Both steps are
symplectic, so the accumulated right factor stays in Sp(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import (
    DEFAULT_TOL,
    QuaternionError,
    QuaternionMatrix,
    conj,
    hamilton,
    unitarity_residual,
)

MAX_SWEEPS = 100
SV_THRESHOLD = 1e-8
PIVOT_THRESHOLD = 1e-6

_EPS = np.finfo(float).eps


class ConvergenceError(QuaternionError):
    pass


@dataclass(frozen=True)
class SVDFactorization:
    """``A = U diag(S) V*`` with ``U``, ``V`` symplectic and ``S`` descending."""

    U: QuaternionMatrix
    S: np.ndarray
    V: QuaternionMatrix

    def sigma(self) -> QuaternionMatrix:
        """The ``m x n`` diagonal middle factor."""
        arr = np.zeros((self.U.cols, self.V.cols, 4))
        idx = np.arange(len(self.S))
        arr[idx, idx, 0] = self.S
        return QuaternionMatrix(arr)

    def reconstruct(self) -> QuaternionMatrix:
        return self.U @ self.sigma() @ self.V.H


# column helpers on raw (rows, cols, 4) arrays --------------------------------


def _inner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quaternion ``u* v`` for two column arrays of shape (rows, 4)."""
    return hamilton(conj(u), v).sum(axis=0)


def _project_out(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    # v - sum_i b_i (b_i* v); coefficients sit on the right.
    for i in range(basis.shape[1]):
        b = basis[:, i]
        v = v - hamilton(b, _inner(b, v))
    return v


def _complement(q: np.ndarray, size: int) -> np.ndarray:
    """Orthonormal columns spanning the complement of the columns of ``q``."""
    basis = q
    found = []
    for e in range(size):
        if basis.shape[1] == size:
            break
        cand = np.zeros((size, 4))
        cand[e, 0] = 1.0
        # two passes: classical re-orthogonalization
        cand = _project_out(basis, _project_out(basis, cand))
        nrm = np.linalg.norm(cand)
        if nrm <= PIVOT_THRESHOLD:
            continue
        cand = cand / nrm
        found.append(cand)
        basis = np.concatenate([basis, cand[:, None, :]], axis=1)
    if basis.shape[1] != size:
        raise ConvergenceError("symplectic completion failed to find enough columns")
    return np.stack(found, axis=1) if found else np.zeros((size, 0, 4))


def orthonormalize(a: QuaternionMatrix) -> QuaternionMatrix:
    """Gram-Schmidt over the right H-module, with one re-orthogonalization pass."""
    cols = []
    basis = np.zeros((a.rows, 0, 4))
    for j in range(a.cols):
        v = _project_out(basis, _project_out(basis, a.data[:, j]))
        nrm = np.linalg.norm(v)
        if nrm <= PIVOT_THRESHOLD:
            raise QuaternionError(f"column {j} is numerically dependent on the previous ones")
        v = v / nrm
        cols.append(v)
        basis = np.concatenate([basis, v[:, None, :]], axis=1)
    return QuaternionMatrix(basis)


def complete_symplectic(q: QuaternionMatrix, tol: float = DEFAULT_TOL) -> QuaternionMatrix:
    """Extend orthonormal columns ``q`` (m x j) to a matrix in Sp(m).

    The returned matrix has ``q`` as its last ``j`` columns, bit for bit.
    """
    if q.cols > q.rows:
        raise QuaternionError(f"cannot complete {q.cols} columns in H^{q.rows}")
    res = unitarity_residual(q)
    if res > tol:
        raise QuaternionError(f"columns are not orthonormal (residual {res:.3e})")
    comp = _complement(q.data, q.rows)
    return QuaternionMatrix(np.concatenate([comp, q.data], axis=1))


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-sided Jacobi on a tall array; returns (A V, V)."""
    w = a.copy()
    n = w.shape[1]
    v = np.zeros((n, n, 4))
    v[np.arange(n), np.arange(n), 0] = 1.0
    tol = max(w.shape[0], 1) * _EPS
    for _ in range(MAX_SWEEPS):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci, cj = w[:, i], w[:, j]
                alpha = np.sum(ci * ci)
                beta = np.sum(cj * cj)
                gamma = _inner(ci, cj)
                g = np.linalg.norm(gamma)
                if g <= tol * np.sqrt(alpha * beta) or g == 0.0:
                    continue
                rotated = True
                # phase-align column j so that ci* cj becomes the real number g
                phase = conj(gamma / g)
                cj = hamilton(cj, phase)
                vj = hamilton(v[:, j], phase)
                zeta = (beta - alpha) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                vi = v[:, i]
                w[:, i], w[:, j] = c * ci - s * cj, s * ci + c * cj
                v[:, i], v[:, j] = c * vi - s * vj, s * vi + c * vj
        if not rotated:
            return w, v
    raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")


def svd(a: QuaternionMatrix) -> SVDFactorization:
    """Full SVD of a quaternionic matrix.

    Parameters
    ----------
    a : QuaternionMatrix
        Any ``m x n`` matrix.

    Returns
    -------
    SVDFactorization
        ``U`` (m x m) and ``V`` (n x n) symplectic, ``S`` of length
        ``min(m, n)`` sorted in descending order.
    """
    m, n = a.shape
    if m < n:
        f = svd(a.H)
        return SVDFactorization(U=f.V, S=f.S, V=f.U)
    w, v = _jacobi(a.data)
    sv = np.sqrt(np.sum(w * w, axis=(0, 2)))
    order = np.argsort(-sv, kind="stable")
    sv, w, v = sv[order], w[:, order], v[:, order]

    rank_tol = max(m, n) * _EPS * (sv[0] if n else 0.0)
    u_cols = np.zeros((m, 0, 4))
    for j in range(n):
        if sv[j] <= rank_tol:
            break
        col = _project_out(u_cols, _project_out(u_cols, w[:, j]))
        nrm = np.linalg.norm(col)
        if nrm <= PIVOT_THRESHOLD * sv[j]:
            break
        u_cols = np.concatenate([u_cols, (col / nrm)[:, None, :]], axis=1)
    u = np.concatenate([u_cols, _complement(u_cols, m)], axis=1)
    return SVDFactorization(U=QuaternionMatrix(u), S=sv, V=QuaternionMatrix(v))


def singular_values(a: QuaternionMatrix) -> np.ndarray:
    return svd(a).S


@dataclass(frozen=True)
class RelativeSVD:
    """Shared-right-frame factorization of the blocks of a Stiefel point.

    ``P = a diag(I_p, diag(c), 0_r) b*`` and ``T = m E b*`` where the
    ``(n-k) x k`` matrix ``E`` has a zero ``p' x p`` corner, ``-diag(s)`` in
    the middle and ``-I_r`` at the bottom right.
    """

    m: QuaternionMatrix
    a: QuaternionMatrix
    b: QuaternionMatrix
    p: int
    q: int
    r: int
    c: np.ndarray
    s: np.ndarray

    @property
    def k(self) -> int:
        return self.p + self.q + self.r

    @property
    def n(self) -> int:
        return self.m.rows + self.k

    @property
    def p_prime(self) -> int:
        return self.m.rows - self.q - self.r

    def p_middle(self, c=None) -> QuaternionMatrix:
        c = self.c if c is None else np.asarray(c, dtype=float)
        return QuaternionMatrix.from_real(np.diag(np.concatenate([np.ones(self.p), c, np.zeros(self.r)])))

    def t_middle(self, s=None) -> QuaternionMatrix:
        s = self.s if s is None else np.asarray(s, dtype=float)
        real = np.zeros((self.m.rows, self.k))
        pp, p, q = self.p_prime, self.p, self.q
        real[pp + np.arange(q), p + np.arange(q)] = -s
        real[pp + q + np.arange(self.r), p + q + np.arange(self.r)] = -1.0
        return QuaternionMatrix.from_real(real)

    def blocks(self, c=None, s=None) -> tuple[QuaternionMatrix, QuaternionMatrix]:
        """(T, P) rebuilt from the factors, optionally with replaced interior values."""
        t = self.m @ self.t_middle(s) @ self.b.H
        p = self.a @ self.p_middle(c) @ self.b.H
        return t, p

    def reconstruct(self, c=None, s=None) -> QuaternionMatrix:
        t, p = self.blocks(c, s)
        return QuaternionMatrix(np.concatenate([t.data, p.data], axis=0))


def classify_singular_values(sv: np.ndarray, eps: float = SV_THRESHOLD) -> tuple[int, int, int]:
    """Sizes (p, q, r) of the one/interior/zero blocks of a descending list."""
    p = int(np.sum(sv > 1.0 - eps))
    r = int(np.sum(sv < eps))
    return p, len(sv) - p - r, r


def relative_svd(x, eps: float = SV_THRESHOLD, tol: float = DEFAULT_TOL) -> RelativeSVD:
    """Relative SVD of a Stiefel point (or an ``n x k`` matrix on the manifold)."""
    from .stiefel import as_point

    x = as_point(x, tol)
    t_block, p_block = x.T, x.P
    f = svd(p_block)
    p, q, r = classify_singular_values(f.S, eps)
    if q + r > x.n - x.k:
        raise QuaternionError(
            f"{q + r} non-unit singular values of P cannot fit in {x.n - x.k} rows of T"
        )
    c = f.S[p : p + q].copy()
    s = np.sqrt(1.0 - c * c)
    tb = (t_block @ f.V).data
    given = np.zeros((x.n - x.k, q + r, 4))
    for idx, j in enumerate(range(p, x.k)):
        col = tb[:, j]
        given[:, idx] = -col / np.linalg.norm(col)
    # the given columns are orthonormal only as accurately as T*T + P*P = I holds
    m = complete_symplectic(QuaternionMatrix(given), tol=max(tol, 1e-9))
    return RelativeSVD(m=m, a=f.U, b=f.V, p=p, q=q, r=r, c=c, s=s)
