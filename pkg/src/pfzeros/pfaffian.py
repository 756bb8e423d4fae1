"""Pfaffians, hafnians and determinants of dense matrices.

Two Pfaffian routes are provided: the literal signed sum over perfect
matchings (small orders only) and an O(n^3) skew-symmetric elimination with
pivoting.  They share a sign convention, so either can be used as the oracle
for the other.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from pfzeros.errors import NotSkew, NotSymmetric, OrderTooLarge

SKEW_TOL = 1e-12
SYM_TOL = 1e-12
MAX_COMBINATORIAL_HALF_ORDER = 6
MAX_HAFNIAN_HALF_ORDER = 8


def _as_square(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    return a


def check_skew(m, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate an even-order skew-symmetric matrix and return it as an array."""
    a = _as_square(m)
    if a.shape[0] % 2:
        raise NotSkew(f"Pfaffian needs an even order, got {a.shape[0]}")
    dev = np.max(np.abs(a + a.T)) if a.size else 0.0
    if dev > tol:
        raise NotSkew(f"matrix is not skew-symmetric (max |m + m^T| = {dev:.3g})")
    return a


def check_symmetric(m, tol: float = SYM_TOL) -> np.ndarray:
    a = _as_square(m)
    if a.shape[0] % 2:
        raise NotSymmetric(f"hafnian needs an even order, got {a.shape[0]}")
    dev = np.max(np.abs(a - a.T)) if a.size else 0.0
    if dev > tol:
        raise NotSymmetric(f"matrix is not symmetric (max |m - m^T| = {dev:.3g})")
    return a


def _scalar(x):
    x = complex(x) if isinstance(x, (complex, np.complexfloating)) else float(x)
    return x


def pfaffian_combinatorial(m):
    """Pfaffian as the signed sum over all perfect matchings.

    Expands along the first row, ``pf(B) = sum_j (-1)^(j+1) b_{0j} pf(B_{0j})``
    with 0-based ``j``, which enumerates every matching exactly once.  Limited to
    order 12 since the number of terms is ``(2n - 1)!!``.
    """
    a = check_skew(m)
    if a.shape[0] > 2 * MAX_COMBINATORIAL_HALF_ORDER:
        raise OrderTooLarge(
            f"combinatorial Pfaffian limited to order {2 * MAX_COMBINATORIAL_HALF_ORDER}"
        )
    rows = a.tolist()

    def expand(idx: tuple[int, ...]):
        if not idx:
            return 1
        first, rest = idx[0], idx[1:]
        total = 0
        for pos, j in enumerate(rest):
            entry = rows[first][j]
            if entry == 0:
                continue
            term = entry * expand(rest[:pos] + rest[pos + 1:])
            total = total - term if pos % 2 else total + term
        return total

    return _scalar(expand(tuple(range(a.shape[0]))))


def pfaffian_eliminate(m):
    """Pfaffian by skew-symmetric Gaussian elimination with partial pivoting.

    Each step pivots the largest entry of column ``k`` below the diagonal into
    position ``(k+1, k)``, records the swap's sign, and eliminates the rest of
    the 2x2 block column.  An all-zero pivot column means the matrix is
    singular and the Pfaffian is 0.
    """
    a = check_skew(m)
    a = (a - a.T) / 2
    n = a.shape[0]
    result = 1.0 + 0j if np.iscomplexobj(a) else 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            result = -result
        pivot = a[k, k + 1]
        if pivot == 0:
            return _scalar(0.0 * result)
        result = result * pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return _scalar(result)


def pfaffian(m):
    """Pfaffian of an even-order skew-symmetric matrix (elimination route)."""
    return pfaffian_eliminate(m)


def hafnian(m):
    """Hafnian: the unsigned sum over perfect matchings of a symmetric matrix.

    Implemented as first-row expansion ``haf(A) = sum_j a_{0j} haf(A_{0j})``
    with memoisation over the set of remaining indices, so order 16 costs
    about 2^16 subproblems instead of 15!! terms.
    """
    a = check_symmetric(m)
    n = a.shape[0]
    if n > 2 * MAX_HAFNIAN_HALF_ORDER:
        raise OrderTooLarge(f"hafnian limited to order {2 * MAX_HAFNIAN_HALF_ORDER}")
    rows = a.tolist()

    @lru_cache(maxsize=None)
    def expand(mask: int):
        if mask == 0:
            return 1
        first = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << first)
        total = 0
        j_bits = rest
        while j_bits:
            low = j_bits & -j_bits
            j = low.bit_length() - 1
            total += rows[first][j] * expand(rest & ~low)
            j_bits ^= low
        return total

    return _scalar(expand((1 << n) - 1))


def determinant(m):
    """Determinant via LU factorisation with partial pivoting (LAPACK)."""
    a = _as_square(m)
    if a.shape[0] == 0:
        return 1.0
    return _scalar(np.linalg.det(a))
