"""Arithmetic in GF(q), q = 2**61 - 1, and an incremental row-echelon basis.

Scalars are plain Python ints in ``[0, q)``. Row vectors are 1-D ``numpy.uint64``
arrays. The hot loops (row reduction, kernel extraction) are numba kernels that
use a 32-bit split multiply with Mersenne folding, so no 128-bit type is needed.
"""

from __future__ import annotations

import numba as nb
import numpy as np

MODULUS = (1 << 61) - 1

_Q = np.uint64(MODULUS)
_M32 = np.uint64(0xFFFFFFFF)
_M29 = np.uint64((1 << 29) - 1)
_S3 = np.uint64(3)
_S29 = np.uint64(29)
_S32 = np.uint64(32)
_S61 = np.uint64(61)
_ZERO = np.uint64(0)
_ONE = np.uint64(1)


class FieldError(ArithmeticError):
    """Raised for undefined field operations (inverting zero)."""


class DimensionError(ValueError):
    """Raised when a row's length disagrees with the ambient dimension."""


# -- scalar ops -------------------------------------------------------------

def _check(a: int) -> int:
    a = int(a)
    if not 0 <= a < MODULUS:
        raise FieldError(f"{a} is not a reduced field element")
    return a


def add(a: int, b: int) -> int:
    return (_check(a) + _check(b)) % MODULUS


def sub(a: int, b: int) -> int:
    return (_check(a) - _check(b)) % MODULUS


def neg(a: int) -> int:
    return (-_check(a)) % MODULUS


def mul(a: int, b: int) -> int:
    return (_check(a) * _check(b)) % MODULUS


def inv(a: int) -> int:
    a = _check(a)
    if a == 0:
        raise FieldError("zero has no inverse")
    return pow(a, MODULUS - 2, MODULUS)


def reduce_int(x: int) -> int:
    """Map any integer (possibly negative) to its residue."""
    return int(x) % MODULUS


# -- numba kernels ----------------------------------------------------------

@nb.njit(inline="always")
def _mulmod(a, b):
    ah = a >> _S32
    al = a & _M32
    bh = b >> _S32
    bl = b & _M32
    hh = ah * bh
    mid = ah * bl + al * bh
    ll = al * bl
    r = (hh << _S3) + (mid >> _S29) + ((mid & _M29) << _S32) + (ll >> _S61) + (ll & _Q)
    r = (r & _Q) + (r >> _S61)
    if r >= _Q:
        r -= _Q
    return r


@nb.njit(inline="always")
def _submod(a, b):
    if a >= b:
        return a - b
    return a + (_Q - b)


@nb.njit(inline="always")
def _addmod(a, b):
    r = a + b
    if r >= _Q:
        r -= _Q
    return r


@nb.njit(cache=True)
def _powmod(a, e):
    result = _ONE
    base = a
    while e > 0:
        if e & 1:
            result = _mulmod(result, base)
        base = _mulmod(base, base)
        e >>= 1
    return result


@nb.njit(cache=True)
def _invmod(a):
    return _powmod(a, MODULUS - 2)


@nb.njit(cache=True, nogil=True)
def _reduce(rows, last, pivot_of, vec, stop_early):
    """Eliminate ``vec`` against the echelon rows in place.

    Returns the lowest column where the residual is nonzero and no pivot
    exists, or -1 if there is none. With ``stop_early`` the scan stops at
    that column (enough to decide independence).
    """
    dim = vec.shape[0]
    first = -1
    for j in range(dim):
        f = vec[j]
        if f == _ZERO:
            continue
        r = pivot_of[j]
        if r < 0:
            if first < 0:
                first = j
                if stop_early:
                    return first
            continue
        row = rows[r]
        vec[j] = _ZERO
        for k in range(j + 1, last[r] + 1):
            x = row[k]
            if x != _ZERO:
                vec[k] = _submod(vec[k], _mulmod(f, x))
    return first


@nb.njit(cache=True, nogil=True)
def _store(rows, last, pivots, pivot_of, rank, vec, col):
    """Normalize ``vec`` at ``col`` and append it as echelon row ``rank``."""
    dim = vec.shape[0]
    s = _invmod(vec[col])
    hi = col
    row = rows[rank]
    for k in range(dim):
        row[k] = _ZERO
    for k in range(col, dim):
        x = vec[k]
        if x != _ZERO:
            row[k] = _mulmod(s, x)
            hi = k
    last[rank] = hi
    pivots[rank] = col
    pivot_of[col] = rank


@nb.njit(cache=True, nogil=True)
def _insert_rows(rows, last, pivots, pivot_of, rank, mat, stop_at):
    """Insert the rows of ``mat`` (clobbered) until rank reaches ``stop_at``."""
    for i in range(mat.shape[0]):
        if rank >= stop_at:
            break
        vec = mat[i]
        col = _reduce(rows, last, pivot_of, vec, True)
        if col >= 0:
            _store(rows, last, pivots, pivot_of, rank, vec, col)
            rank += 1
    return rank


@nb.njit(cache=True, nogil=True)
def _kernel_basis(rows, last, pivots, pivot_of, rank, dim):
    """Columns of the returned (dim, dim - rank) matrix span the right kernel."""
    k = dim - rank
    free_idx = np.full(dim, -1, np.int64)
    t = 0
    for j in range(dim):
        if pivot_of[j] < 0:
            free_idx[j] = t
            t += 1
    x = np.zeros((dim, k), np.uint64)
    for j in range(dim):
        if free_idx[j] >= 0:
            x[j, free_idx[j]] = _ONE
    order = np.argsort(pivots[:rank])[::-1]
    acc = np.zeros(k, np.uint64)
    for oi in range(rank):
        r = order[oi]
        pc = pivots[r]
        row = rows[r]
        for t in range(k):
            acc[t] = _ZERO
        for j in range(pc + 1, last[r] + 1):
            c = row[j]
            if c == _ZERO:
                continue
            xj = x[j]
            for t in range(k):
                if xj[t] != _ZERO:
                    acc[t] = _addmod(acc[t], _mulmod(c, xj[t]))
        xp = x[pc]
        for t in range(k):
            xp[t] = _submod(_ZERO, acc[t])
    return x


@nb.njit(cache=True, nogil=True)
def _vecmat(vec, mat):
    """Row vector times matrix, mod q."""
    m, k = mat.shape
    out = np.zeros(k, np.uint64)
    for i in range(m):
        c = vec[i]
        if c == _ZERO:
            continue
        for t in range(k):
            out[t] = _addmod(out[t], _mulmod(c, mat[i, t]))
    return out


@nb.njit(cache=True)
def _mul_arrays(a, b):
    out = np.empty_like(a)
    for i in range(a.shape[0]):
        out[i] = _mulmod(a[i], b[i])
    return out


def mul_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two uint64 residue arrays."""
    return _mul_arrays(np.ascontiguousarray(a, np.uint64), np.ascontiguousarray(b, np.uint64))


def as_row(values, dim: int | None = None) -> np.ndarray:
    """Coerce ``values`` (ints, possibly negative) into a reduced uint64 row."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise DimensionError("rows must be one-dimensional")
    if arr.dtype == np.uint64:
        if arr.size and int(arr.max()) >= MODULUS:
            raise FieldError("row entries must be < MODULUS")
        row = arr.copy()
    else:
        row = np.array([int(v) % MODULUS for v in arr], dtype=np.uint64)
    if dim is not None and row.shape[0] != dim:
        raise DimensionError(f"row has length {row.shape[0]}, expected {dim}")
    return row


class RowBasis:
    """Row-echelon basis of a subspace of GF(q)^ambient_dim.

    Pivots are the lowest nonzero column of each inserted residual and are
    normalized to 1. Rows are stored densely.
    """

    def __init__(self, ambient_dim: int, capacity: int | None = None):
        if ambient_dim < 0:
            raise DimensionError("ambient_dim must be non-negative")
        self.ambient_dim = ambient_dim
        cap = ambient_dim if capacity is None else min(capacity, ambient_dim)
        self._rows = np.zeros((max(cap, 1), ambient_dim), np.uint64)
        self._last = np.zeros(max(cap, 1), np.int64)
        self._pivots = np.zeros(max(cap, 1), np.int64)
        self._pivot_of = np.full(ambient_dim, -1, np.int64)
        self.rank = 0

    def _grow(self):
        cap = self._rows.shape[0]
        new = max(cap + 1, min(self.ambient_dim, 2 * cap))
        rows = np.zeros((new, self.ambient_dim), np.uint64)
        rows[:cap] = self._rows
        self._rows = rows
        self._last = np.concatenate([self._last, np.zeros(new - cap, np.int64)])
        self._pivots = np.concatenate([self._pivots, np.zeros(new - cap, np.int64)])

    def _coerce(self, row) -> np.ndarray:
        if isinstance(row, np.ndarray) and row.dtype == np.uint64 and row.ndim == 1:
            if row.shape[0] != self.ambient_dim:
                raise DimensionError(
                    f"row has length {row.shape[0]}, expected {self.ambient_dim}")
            return row.copy()
        return as_row(row, self.ambient_dim)

    def insert(self, row) -> bool:
        """Add ``row``; True if it was independent (rank grew by one)."""
        vec = self._coerce(row)
        return self._insert_owned(vec)

    def _insert_owned(self, vec: np.ndarray) -> bool:
        col = _reduce(self._rows, self._last, self._pivot_of, vec, True)
        if col < 0:
            return False
        if self.rank == self._rows.shape[0]:
            self._grow()
        _store(self._rows, self._last, self._pivots, self._pivot_of, self.rank, vec, col)
        self.rank += 1
        return True

    def insert_many(self, mat: np.ndarray, stop_at: int | None = None) -> int:
        """Insert every row of a (m, ambient_dim) uint64 matrix, which is overwritten.

        Stops once the rank reaches ``stop_at``. Returns the new rank.
        """
        if mat.ndim != 2 or mat.shape[1] != self.ambient_dim:
            raise DimensionError(f"matrix must have {self.ambient_dim} columns")
        if mat.dtype != np.uint64:
            raise DimensionError("matrix must be uint64 residues")
        limit = self.ambient_dim if stop_at is None else min(stop_at, self.ambient_dim)
        need = min(self.ambient_dim, self.rank + mat.shape[0])
        while self._rows.shape[0] < need:
            self._grow()
        self.rank = int(_insert_rows(self._rows, self._last, self._pivots, self._pivot_of,
                                     self.rank, mat, limit))
        return self.rank

    def reduce(self, row) -> np.ndarray:
        """Residual of ``row`` after elimination; zero iff ``row`` is in the span."""
        vec = self._coerce(row)
        _reduce(self._rows, self._last, self._pivot_of, vec, False)
        return vec

    def contains(self, row) -> bool:
        vec = self._coerce(row)
        return _reduce(self._rows, self._last, self._pivot_of, vec, True) < 0

    @property
    def pivots(self) -> list[int]:
        return [int(p) for p in self._pivots[: self.rank]]

    @property
    def rows(self) -> np.ndarray:
        return self._rows[: self.rank].copy()

    def kernel(self) -> np.ndarray:
        """(ambient_dim, ambient_dim - rank) matrix whose columns span the null space.

        A vector lies in the row span iff its product with this matrix is zero.
        """
        return _kernel_basis(self._rows, self._last, self._pivots, self._pivot_of,
                             self.rank, self.ambient_dim)

    def copy(self) -> "RowBasis":
        other = RowBasis.__new__(RowBasis)
        other.ambient_dim = self.ambient_dim
        other._rows = self._rows.copy()
        other._last = self._last.copy()
        other._pivots = self._pivots.copy()
        other._pivot_of = self._pivot_of.copy()
        other.rank = self.rank
        return other

    def __repr__(self):
        return f"RowBasis(ambient_dim={self.ambient_dim}, rank={self.rank})"


def vecmat(vec: np.ndarray, mat: np.ndarray) -> np.ndarray:
    return _vecmat(np.ascontiguousarray(vec, np.uint64), np.ascontiguousarray(mat, np.uint64))

