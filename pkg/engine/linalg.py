# engine/linalg.py
"""
Exact dense linear algebra over prime fields F_p, 2 <= p <= 251.

Matrices are ``galois`` field arrays, so every entry carries its modulus in
its type. Products and Kronecker products run on plain int64 views and are
reduced mod p; elimination is delegated to ``FieldArray.row_reduce``.
"""

from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import galois
import numpy as np

from engine.errors import DimensionMismatch, FieldError

MAX_MODULUS = 251

Mat = galois.FieldArray


@lru_cache(maxsize=None)
def field(p: int):
    """The field class GF(p); rejects non-primes and moduli above 251."""
    if not isinstance(p, (int, np.integer)) or not 2 <= int(p) <= MAX_MODULUS or not galois.is_prime(int(p)):
        raise FieldError(f"modulus must be a prime in [2, {MAX_MODULUS}], got {p!r}")
    return galois.GF(int(p))


def modulus(m: Mat) -> int:
    return int(type(m).characteristic)


def _ints(m) -> np.ndarray:
    return np.asarray(m.view(np.ndarray), dtype=np.int64)


def _same_field(a: Mat, b: Mat):
    if type(a) is not type(b):
        raise FieldError(f"matrices over GF({modulus(a)}) and GF({modulus(b)}) cannot be combined")


def matrix(gf, rows: Sequence[Sequence[int]], shape: Optional[Tuple[int, int]] = None) -> Mat:
    """Build a matrix from integer rows; entries are reduced mod p, so -1 is allowed."""
    data = np.asarray(rows, dtype=np.int64)
    if shape is not None:
        data = data.reshape(shape)
    if data.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {data.shape}")
    return gf(data % gf.characteristic)


def zeros(gf, rows: int, cols: int) -> Mat:
    return gf.Zeros((rows, cols))


def identity(gf, n: int) -> Mat:
    return gf.Identity(n) if n else gf.Zeros((0, 0))


def scalar(gf, value: int):
    return gf(int(value) % gf.characteristic)


def mul(a: Mat, b: Mat) -> Mat:
    _same_field(a, b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    gf = type(a)
    return gf((_ints(a) @ _ints(b)) % gf.characteristic)


def mul_all(first: Mat, *rest: Mat) -> Mat:
    out = first
    for m in rest:
        out = mul(out, m)
    return out


def power(m: Mat, k: int) -> Mat:
    out = identity(type(m), m.shape[0])
    for _ in range(k):
        out = mul(out, m)
    return out


def kron(a: Mat, b: Mat) -> Mat:
    _same_field(a, b)
    gf = type(a)
    return gf(np.kron(_ints(a), _ints(b)) % gf.characteristic)


def hstack(gf, blocks: Sequence[Mat], rows: int) -> Mat:
    if not blocks:
        return zeros(gf, rows, 0)
    return gf(np.hstack([_ints(b) for b in blocks]))


def vstack(gf, blocks: Sequence[Mat], cols: int) -> Mat:
    if not blocks:
        return zeros(gf, 0, cols)
    return gf(np.vstack([_ints(b) for b in blocks]))


def block_diag(gf, blocks: Sequence[Mat]) -> Mat:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = _ints(b)
        r += b.shape[0]
        c += b.shape[1]
    return gf(out)


def is_zero(m: Mat) -> bool:
    return m.size == 0 or not np.any(_ints(m))


def equal(a: Mat, b: Mat) -> bool:
    return a.shape == b.shape and np.array_equal(_ints(a), _ints(b))


def to_lists(m: Mat) -> List[List[int]]:
    return _ints(m).tolist()


def flatten(m: Mat) -> Mat:
    """Row-major vectorisation as a single column."""
    return m.reshape((m.size, 1))


def unflatten(v: Mat, rows: int, cols: int) -> Mat:
    return v.reshape((rows, cols))


def rref(m: Mat) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form together with the pivot columns."""
    if m.size == 0:
        return m.copy(), []
    reduced = m.row_reduce()
    pivots = []
    ints = _ints(reduced)
    for row in ints:
        nz = np.flatnonzero(row)
        if nz.size == 0:
            break
        pivots.append(int(nz[0]))
    return reduced, pivots


def rank(m: Mat) -> int:
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullity(m: Mat) -> int:
    return m.shape[1] - rank(m)


def kernel_basis(m: Mat) -> Mat:
    """Columns form a basis of the right null space, one per free column in order."""
    gf = type(m)
    rows, cols = m.shape
    if rows == 0:
        return identity(gf, cols)
    reduced, pivots = rref(m)
    free = [j for j in range(cols) if j not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    ints = _ints(reduced)
    p = gf.characteristic
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, c in enumerate(pivots):
            basis[c, k] = (-ints[i, f]) % p
    return gf(basis)


def solve(a: Mat, b: Mat) -> Optional[Mat]:
    """Some x with a @ x == b, or None when the system is inconsistent."""
    _same_field(a, b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve needs equal row counts, got {a.shape} and {b.shape}")
    gf = type(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return zeros(gf, n, b.shape[1])
    reduced, pivots = rref(hstack(gf, [a, b], a.shape[0]))
    if any(c >= n for c in pivots):
        return None
    ints = _ints(reduced)
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c, :] = ints[i, n:]
    return gf(x)


def is_invertible(m: Mat) -> bool:
    return m.shape[0] == m.shape[1] and rank(m) == m.shape[0]


def inverse(m: Mat) -> Mat:
    if not is_invertible(m):
        raise DimensionMismatch("matrix is not invertible")
    return solve(m, identity(type(m), m.shape[0]))


def independent_columns(m: Mat) -> List[int]:
    """Indices of the leftmost maximal linearly independent set of columns."""
    return rref(m)[1]


def column_basis(m: Mat) -> Mat:
    cols = independent_columns(m)
    return m[:, cols] if cols else zeros(type(m), m.shape[0], 0)


def complement_columns(sub: Mat, ambient: int) -> Mat:
    """Standard basis vectors that extend the column span of ``sub`` to the whole space."""
    gf = type(sub)
    stacked = hstack(gf, [sub, identity(gf, ambient)], ambient)
    pivots = rref(stacked)[1]
    picked = [c - sub.shape[1] for c in pivots if c >= sub.shape[1]]
    return identity(gf, ambient)[:, picked] if picked else zeros(gf, ambient, 0)


def in_column_span(sub: Mat, v: Mat) -> bool:
    return solve(sub, v) is not None if sub.shape[1] else is_zero(v)


def coordinates(basis: Mat, v: Mat) -> Mat:
    """Coordinates of v (a column or columns) in terms of independent columns ``basis``."""
    x = solve(basis, v)
    if x is None:
        raise DimensionMismatch("vector is not in the span of the basis")
    return x


def linear_combination(gf, coeffs: Iterable[int], mats: Sequence[Mat], shape: Tuple[int, int]) -> Mat:
    acc = np.zeros(shape, dtype=np.int64)
    for c, m in zip(coeffs, mats):
        c = int(c)
        if c:
            acc += c * _ints(m)
    return gf(acc % gf.characteristic)
