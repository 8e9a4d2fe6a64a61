"""Quaternion scalars and dense quaternionic matrices.

Matrices are stored as read-only float64 arrays of shape ``(rows, cols, 4)``
with components in ``(w, x, y, z)`` order.  Every operation returns a new
value; nothing in the public surface mutates its arguments.

Products follow the right H-vector-space convention: in ``A @ B`` the
entries of ``A`` always multiply from the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class QuaternionError(ValueError):
    """Base class for domain errors raised by this package."""


class ShapeError(QuaternionError):
    pass


def hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product over the trailing axis of two broadcastable arrays."""
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conj(a: np.ndarray) -> np.ndarray:
    return a * np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(c) for c in arr)
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_array()))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Quaternion.from_array(self.to_array() * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Quaternion.from_array(self.to_array() * float(other))
        return NotImplemented

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def isclose(self, other: "Quaternion", tol: float = DEFAULT_TOL) -> bool:
        return bool(np.linalg.norm(self.to_array() - other.to_array()) <= tol)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
UNITS = (ONE, I, J, K)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion.from_array(hamilton(a.to_array(), b.to_array()))


class QuaternionMatrix:
    """Immutable dense ``rows x cols`` matrix over the quaternions.

    Supports ``@`` (quaternionic product), ``+``, ``-``, multiplication by
    real scalars, and slicing, which returns sub-blocks.  ``A.H`` is the
    conjugate transpose.
    """

    __slots__ = ("_data",)
    __array_priority__ = 1000

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ShapeError(f"expected an array of shape (rows, cols, 4), got {arr.shape}")
        arr.flags.writeable = False
        self._data = arr

    # construction -----------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QuaternionMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def eye(cls, size: int) -> "QuaternionMatrix":
        arr = np.zeros((size, size, 4))
        arr[np.arange(size), np.arange(size), 0] = 1.0
        return cls(arr)

    @classmethod
    def from_real(cls, real) -> "QuaternionMatrix":
        real = np.atleast_2d(np.asarray(real, dtype=np.float64))
        arr = np.zeros(real.shape + (4,))
        arr[..., 0] = real
        return cls(arr)

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "QuaternionMatrix":
        """Build from a grid whose entries are Quaternions or length-4 sequences."""
        grid = [
            [e.to_array() if isinstance(e, Quaternion) else np.asarray(e, dtype=float) for e in row]
            for row in rows
        ]
        return cls(np.array(grid, dtype=np.float64).reshape(len(grid), -1, 4))

    @classmethod
    def diag(cls, values: Iterable) -> "QuaternionMatrix":
        vals = list(values)
        arr = np.zeros((len(vals), len(vals), 4))
        for i, v in enumerate(vals):
            arr[i, i] = v.to_array() if isinstance(v, Quaternion) else [float(v), 0, 0, 0]
        return cls(arr)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["QuaternionMatrix"]]) -> "QuaternionMatrix":
        return cls(np.concatenate([np.concatenate([b.data for b in row], axis=1) for row in blocks], axis=0))

    @classmethod
    def block_diag(cls, *mats: "QuaternionMatrix") -> "QuaternionMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        arr = np.zeros((rows, cols, 4))
        r = c = 0
        for m in mats:
            arr[r : r + m.rows, c : c + m.cols] = m.data
            r += m.rows
            c += m.cols
        return cls(arr)

    # accessors --------------------------------------------------------------

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape[:2]

    @property
    def H(self) -> "QuaternionMatrix":
        return adjoint(self)

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self._data[i, j])

    def __getitem__(self, key) -> "QuaternionMatrix":
        if not isinstance(key, tuple) or len(key) != 2:
            raise TypeError("index with a pair, e.g. A[1:3, :]")
        key = tuple(slice(k, k + 1) if isinstance(k, (int, np.integer)) else k for k in key)
        return QuaternionMatrix(self._data[key])

    def real_vector(self) -> np.ndarray:
        """Flattened copy in row-major, then (w, x, y, z), order."""
        return self._data.reshape(-1).copy()

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(np.sum(self._data**2)))

    def isclose(self, other: "QuaternionMatrix", tol: float = DEFAULT_TOL) -> bool:
        return self.shape == other.shape and (self - other).norm() <= tol

    # arithmetic -------------------------------------------------------------

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        _same_shape(self, other)
        return QuaternionMatrix(self._data + other._data)

    def __sub__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        _same_shape(self, other)
        return QuaternionMatrix(self._data - other._data)

    def __neg__(self) -> "QuaternionMatrix":
        return QuaternionMatrix(-self._data)

    def __mul__(self, other) -> "QuaternionMatrix":
        # A * q multiplies every entry by q on the right.
        if isinstance(other, Quaternion):
            return QuaternionMatrix(hamilton(self._data, other.to_array()))
        return QuaternionMatrix(self._data * float(other))

    def __rmul__(self, other) -> "QuaternionMatrix":
        if isinstance(other, Quaternion):
            return QuaternionMatrix(hamilton(other.to_array(), self._data))
        return QuaternionMatrix(self._data * float(other))

    def __truediv__(self, other: float) -> "QuaternionMatrix":
        return QuaternionMatrix(self._data / float(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuaternionMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"QuaternionMatrix({self.rows}x{self.cols})"


def _same_shape(a: QuaternionMatrix, b: QuaternionMatrix) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def mat_mul(a: QuaternionMatrix, b: QuaternionMatrix) -> QuaternionMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    aw, ax, ay, az = np.moveaxis(a.data, -1, 0)
    bw, bx, by, bz = np.moveaxis(b.data, -1, 0)
    return QuaternionMatrix(
        np.stack(
            [
                aw @ bw - ax @ bx - ay @ by - az @ bz,
                aw @ bx + ax @ bw + ay @ bz - az @ by,
                aw @ by - ax @ bz + ay @ bw + az @ bx,
                aw @ bz + ax @ by - ay @ bx + az @ bw,
            ],
            axis=-1,
        )
    )


def adjoint(a: QuaternionMatrix) -> QuaternionMatrix:
    return QuaternionMatrix(conj(a.data.transpose(1, 0, 2)))


def re_trace(a: QuaternionMatrix) -> float:
    if a.rows != a.cols:
        raise ShapeError(f"trace of a non-square {a.rows}x{a.cols} matrix")
    return float(np.trace(a.data[..., 0]))


def frobenius_inner(a: QuaternionMatrix, b: QuaternionMatrix) -> float:
    """Real inner product ``Re Tr(a* b)``."""
    _same_shape(a, b)
    # Re(conj(p) q) is the Euclidean dot product of the components.
    return float(np.sum(a.data * b.data))


def unitarity_residual(a: QuaternionMatrix) -> float:
    """Frobenius norm of ``a* a - I``."""
    return (a.H @ a - QuaternionMatrix.eye(a.cols)).norm()


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> QuaternionMatrix:
    """Matrix with independent standard-normal components."""
    return QuaternionMatrix(rng.standard_normal((rows, cols, 4)))
