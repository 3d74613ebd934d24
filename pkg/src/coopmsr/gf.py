"""Exact arithmetic in a prime field GF(p).

Scalars are :class:`FieldElement` values; bulk work (codewords, parity rows)
uses ``int64`` numpy arrays holding canonical residues, with the owning
:class:`Field` supplying the modulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_PRIME = 65537
MAX_DENSE = 64


class SingularMatrixError(ValueError):
    """Raised when a dense system has no unique solution."""

    def __init__(self, message: str, rank: int):
        super().__init__(f"{message} (rank {rank})")
        self.rank = rank


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    p: int

    def __post_init__(self):
        if self.p < 3:
            raise ValueError(f"modulus {self.p} too small: need p >= 3")
        if self.p >= 2**31:
            raise ValueError(f"modulus {self.p} too large: need p < 2^31")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    # integer-level helpers, used by the array code paths
    def inv_int(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return pow(x, self.p - 2, self.p)

    def pow_int(self, x: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        # Python's pow gives 0**0 == 1, which the t = 1 parity rows rely on
        return pow(int(x) % self.p, e, self.p)

    def array(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=np.int64), self.p)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def solve(self, A, b, max_size: int = MAX_DENSE) -> np.ndarray:
        return solve_dense(A, b, self, max_size=max_size)

    def rank(self, A) -> int:
        return _row_reduce(self.array(A), self.p)[1]

    def inverse(self, A) -> np.ndarray:
        A = self.array(A)
        q = A.shape[0]
        return solve_dense(A, np.eye(q, dtype=np.int64), self, max_size=max(q, MAX_DENSE))


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def _check(self, other) -> FieldElement:
        if isinstance(other, int):
            return self.field(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field.p != self.field.p:
            raise ValueError(
                f"mixed moduli: GF({self.field.p}) and GF({other.field.p})"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement((self.value + other.value) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement((self.value - other.value) % self.field.p, self.field)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value * other.value % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.p, self.field)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, e: int):
        return FieldElement(self.field.pow_int(self.value, e), self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv_int(self.value), self.field)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def make_field(p: int) -> Field:
    return Field(p)


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return x - y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def neg(x: FieldElement) -> FieldElement:
    return -x


def inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def power(x: FieldElement, e: int) -> FieldElement:
    return x**e


def _row_reduce(M: np.ndarray, p: int) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form of ``M`` mod ``p``.

    Returns the reduced copy, its rank and the pivot columns.
    """
    M = M.copy()
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return M, r, pivots


def solve_dense(A, b, field: Field, max_size: int = MAX_DENSE) -> np.ndarray:
    """Solve the square system ``A x = b`` exactly over ``field``.

    ``b`` may be a vector or a matrix of right-hand sides. Raises
    :class:`SingularMatrixError` carrying the rank found.
    """
    p = field.p
    A = _as_residues(A, field)
    q = A.shape[0]
    if A.ndim != 2 or A.shape[1] != q:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if q > max_size:
        raise ValueError(f"system of size {q} exceeds dense bound {max_size}")
    b = _as_residues(b, field)
    vec = b.ndim == 1
    B = b.reshape(q, -1)
    aug = np.concatenate([A, B], axis=1)
    red, rank, pivots = _row_reduce(aug, p)
    if rank < q or pivots[q - 1] >= q:
        raise SingularMatrixError("singular system", _row_reduce(A, p)[1])
    x = red[:q, q:]
    return x[:, 0] if vec else x


def _as_residues(x, field: Field) -> np.ndarray:
    # accepts ints, FieldElements or int arrays
    if not isinstance(x, np.ndarray) or x.dtype == object:
        x = np.array(x, dtype=object).astype(np.int64)
    return np.mod(x.astype(np.int64), field.p)


def left_inverse(A: np.ndarray, field: Field) -> np.ndarray:
    """A matrix ``L`` with ``L @ A = I`` for a tall full-column-rank ``A``.

    Picks the first independent rows; the remaining rows get zero weight.
    """
    p = field.p
    A = field.array(A)
    rows, cols = A.shape
    _, rank, pivots = _row_reduce(A.T.copy(), p)
    if rank < cols:
        raise SingularMatrixError("rank deficient block", rank)
    chosen = pivots[:cols]
    sq_inv = solve_dense(A[chosen], np.eye(cols, dtype=np.int64), field, max_size=max(cols, MAX_DENSE))
    L = np.zeros((cols, rows), dtype=np.int64)
    L[:, chosen] = sq_inv
    return L


def vandermonde(points: Sequence[int], field: Field) -> np.ndarray:
    """Rows ``t = 0..q-1``, columns the points: entry ``x_j ** t``."""
    q = len(points)
    return field.array([[field.pow_int(x, t) for x in points] for t in range(q)])
