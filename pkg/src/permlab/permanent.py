"""Permanent engines and the Laplace expansion matrix.

Two engines per entry domain:

* Ryser's inclusion-exclusion with Gray-code column updates, O(2^n * n).
  The floating-point variant batches subsets through matrix products; the
  exact variant runs over Gaussian integers (arbitrary-precision int pairs)
  with the Nijenhuis-Wilf halving, so it touches 2^(n-1) subsets.
* A direct sum over all n! permutations, kept as the small-n oracle.

Backends never mix silently: an `ExactMatrix` is computed exactly, a
`ComplexMatrix` in doubles, and conversion between the two is the caller's
explicit choice.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple, Union

import numpy as np

from .matrices import ComplexMatrix, ExactMatrix

__all__ = [
    "GaussianInteger",
    "PermanentValue",
    "LaplaceMatrix",
    "permanent_ryser",
    "permanent_naive",
    "minor",
    "laplace_matrix",
    "permanent_directional_derivative",
    "RYSER_MAX_N",
    "NAIVE_MAX_N",
    "LAPLACE_MAX_N",
]

RYSER_MAX_N = 32   # 2^n work: hard cost guard
NAIVE_MAX_N = 9    # n! work: oracle scale only
LAPLACE_MAX_N = 20  # n^2 * 2^n work


class GaussianInteger(NamedTuple):
    """Complex number with arbitrary-precision integer components."""

    re: int
    im: int

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


@dataclass(frozen=True)
class PermanentValue:
    """A permanent plus the provenance of the engine that produced it."""

    value: Union[complex, GaussianInteger]
    backend: str  # float-ryser | float-naive | exact-ryser | exact-naive

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, GaussianInteger)

    @property
    def real(self) -> float:
        if self.is_exact:
            return float(self.value.re)
        return self.value.real

    def to_complex(self) -> complex:
        if self.is_exact:
            return self.value.to_complex()
        return complex(self.value)


# ---------------------------------------------------------------------------
# floating-point kernels


_subset_tables_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _subset_tables(n: int):
    """0/1 subset membership matrix (2^n x n) and Ryser signs (-1)^(n-|S|)."""
    cached = _subset_tables_cache.get(n)
    if cached is not None:
        return cached
    ks = np.arange(1 << n, dtype=np.uint64)[:, None]
    bits = ((ks >> np.arange(n, dtype=np.uint64)[None, :]) & 1).astype(np.float64)
    signs = np.where((n - bits.sum(axis=1).astype(np.int64)) % 2 == 0, 1.0, -1.0)
    if n <= 16:
        _subset_tables_cache[n] = (bits, signs)
    return bits, signs


def _per_ryser_float(a: np.ndarray) -> complex:
    n = a.shape[0]
    ar = np.ascontiguousarray(a.real.T)
    ai = np.ascontiguousarray(a.imag.T)
    total = 0.0 + 0.0j
    if n <= 16:
        bits, signs = _subset_tables(n)
        rowsums = (bits @ ar) + 1j * (bits @ ai)
        return complex(signs @ np.prod(rowsums, axis=1))
    chunk = 1 << 16
    for k0 in range(0, 1 << n, chunk):
        ks = np.arange(k0, min(k0 + chunk, 1 << n), dtype=np.uint64)[:, None]
        bits = ((ks >> np.arange(n, dtype=np.uint64)[None, :]) & 1).astype(np.float64)
        signs = np.where((n - bits.sum(axis=1).astype(np.int64)) % 2 == 0, 1.0, -1.0)
        rowsums = (bits @ ar) + 1j * (bits @ ai)
        total += signs @ np.prod(rowsums, axis=1)
    return complex(total)


_perm_cache: dict[int, np.ndarray] = {}


def _perm_table(n: int) -> np.ndarray:
    tbl = _perm_cache.get(n)
    if tbl is None:
        tbl = np.array(list(permutations(range(n))), dtype=np.intp)
        if n <= 8:
            _perm_cache[n] = tbl
    return tbl


def _per_naive_float(a: np.ndarray) -> complex:
    n = a.shape[0]
    perms = _perm_table(n)
    rows = np.arange(n)[None, :]
    total = 0.0 + 0.0j
    chunk = 50000
    for k0 in range(0, perms.shape[0], chunk):
        p = perms[k0:k0 + chunk]
        total += np.prod(a[rows, p], axis=1).sum()
    return complex(total)


# ---------------------------------------------------------------------------
# exact kernels (Gaussian integers)


def _per_ryser_exact(re, im, n) -> tuple[int, int]:
    """Ryser with the last column folded into the start vector; iterates the
    2^(n-1) subsets of the remaining columns in Gray-code order.  Entries are
    doubled to keep everything integral; the final division by 2^(n-1) is
    exact and asserted so."""
    if n == 1:
        return re[0][0], im[0][0]
    m = n - 1
    sr = [2 * r[m] - sum(r) for r in re]
    si = [2 * r[m] - sum(r) for r in im]
    cols_r = [tuple(2 * re[i][j] for i in range(n)) for j in range(m)]
    cols_i = [tuple(2 * im[i][j] for i in range(n)) for j in range(m)]
    pr = sr[0]
    pi = si[0]
    for t in range(1, n):
        xr = sr[t]
        xi = si[t]
        pr, pi = pr * xr - pi * xi, pr * xi + pi * xr
    tot_r = pr
    tot_i = pi
    included = [False] * m
    par = 0
    inner = range(1, n)
    for k in range(1, 1 << m):
        b = (k & -k).bit_length() - 1
        cr = cols_r[b]
        ci = cols_i[b]
        par ^= 1
        if included[b]:
            included[b] = False
            sr = [x - y for x, y in zip(sr, cr)]
            si = [x - y for x, y in zip(si, ci)]
        else:
            included[b] = True
            sr = [x + y for x, y in zip(sr, cr)]
            si = [x + y for x, y in zip(si, ci)]
        pr = sr[0]
        pi = si[0]
        for t in inner:
            xr = sr[t]
            xi = si[t]
            pr, pi = pr * xr - pi * xi, pr * xi + pi * xr
        if par:
            tot_r -= pr
            tot_i -= pi
        else:
            tot_r += pr
            tot_i += pi
    d = 1 << (n - 1)
    qr, rr = divmod(tot_r, d)
    qi, ri = divmod(tot_i, d)
    if rr or ri:
        raise AssertionError("halved Ryser sum not divisible by 2^(n-1)")
    if m % 2:
        return -qr, -qi
    return qr, qi


def _per_naive_exact(re, im, n) -> tuple[int, int]:
    tr = 0
    ti = 0
    for sigma in permutations(range(n)):
        pr, pi = 1, 0
        for i in range(n):
            ar = re[i][sigma[i]]
            ai = im[i][sigma[i]]
            pr, pi = pr * ar - pi * ai, pr * ai + pi * ar
        tr += pr
        ti += pi
    return tr, ti


# ---------------------------------------------------------------------------
# public engines


def _require_square(A, op: str) -> int:
    if not A.is_square:
        raise ValueError(f"{op} requires a square matrix, got {A.shape}")
    return A.rows


def permanent_ryser(A) -> PermanentValue:
    """Permanent by Ryser's formula; exact for ExactMatrix inputs."""
    n = _require_square(A, "permanent_ryser")
    if n > RYSER_MAX_N:
        raise ValueError(f"n = {n} exceeds the 2^n cost guard (max {RYSER_MAX_N})")
    if isinstance(A, ExactMatrix):
        r, i = _per_ryser_exact(A.re, A.im, n)
        return PermanentValue(GaussianInteger(r, i), "exact-ryser")
    if isinstance(A, ComplexMatrix):
        return PermanentValue(_per_ryser_float(A.data), "float-ryser")
    raise TypeError(f"expected ComplexMatrix or ExactMatrix, got {type(A).__name__}")


def permanent_naive(A) -> PermanentValue:
    """Permanent by direct summation over all n! permutations (oracle)."""
    n = _require_square(A, "permanent_naive")
    if n > NAIVE_MAX_N:
        raise ValueError(f"n = {n} exceeds the n! oracle guard (max {NAIVE_MAX_N})")
    if isinstance(A, ExactMatrix):
        r, i = _per_naive_exact(A.re, A.im, n)
        return PermanentValue(GaussianInteger(r, i), "exact-naive")
    if isinstance(A, ComplexMatrix):
        return PermanentValue(_per_naive_float(A.data), "float-naive")
    raise TypeError(f"expected ComplexMatrix or ExactMatrix, got {type(A).__name__}")


def minor(A, i: int, j: int):
    """Submatrix with row i and column j deleted (0-based)."""
    n = _require_square(A, "minor")
    if n < 2:
        raise ValueError("a 1 x 1 matrix has no minors")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"minor indices ({i}, {j}) out of range for n = {n}")
    if isinstance(A, ExactMatrix):
        re = [row[:j] + row[j + 1:] for k, row in enumerate(A.re) if k != i]
        im = [row[:j] + row[j + 1:] for k, row in enumerate(A.im) if k != i]
        return ExactMatrix(re, im)
    return ComplexMatrix(np.delete(np.delete(A.data, i, axis=0), j, axis=1))


# ---------------------------------------------------------------------------
# Laplace expansion matrix


@dataclass(frozen=True)
class LaplaceMatrix:
    """Entry-wise product of A with its minor permanents.

    Entry (i, j) is a_ij * per(A(i, j)).  Every row sum and every column sum
    equals per(A) (the Laplace expansion), which is recomputed independently
    and stored in `source_permanent`.
    """

    matrix: Union[ComplexMatrix, ExactMatrix]
    source_permanent: PermanentValue


def _exact_permanent_job(payload):
    re, im = payload
    return _per_ryser_exact(re, im, len(re))


def _minor_lists(re, im, i, j):
    mre = [row[:j] + row[j + 1:] for k, row in enumerate(re) if k != i]
    mim = [row[:j] + row[j + 1:] for k, row in enumerate(im) if k != i]
    return mre, mim


def laplace_matrix(A, workers: int | None = None) -> LaplaceMatrix:
    """Build the Laplace expansion matrix of a square A (2 <= n <= 20).

    The n^2 minor permanents are independent; `workers` > 1 evaluates them
    on a process pool (exact backend only, where each minor costs 2^(n-1)
    bignum operations).  Results are deterministic and independent of
    scheduling.  `workers=None` picks a pool only when it can actually help.
    """
    n = _require_square(A, "laplace_matrix")
    if n < 2:
        raise ValueError("laplace_matrix requires n >= 2")
    if n > LAPLACE_MAX_N:
        raise ValueError(f"n = {n} exceeds the n^2 * 2^n cost guard (max {LAPLACE_MAX_N})")
    if isinstance(A, ComplexMatrix):
        a = A.data
        f = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                f[i, j] = a[i, j] * _per_ryser_float(
                    np.delete(np.delete(a, i, axis=0), j, axis=1))
        return LaplaceMatrix(ComplexMatrix(f), permanent_ryser(A))
    if not isinstance(A, ExactMatrix):
        raise TypeError(f"expected ComplexMatrix or ExactMatrix, got {type(A).__name__}")

    re, im = A.re, A.im
    jobs = [_minor_lists(re, im, i, j) for i in range(n) for j in range(n)]
    if workers is None:
        cpus = os.cpu_count() or 1
        workers = min(cpus, 8) if (n >= 12 and cpus > 1) else 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            minors = list(pool.map(_exact_permanent_job, jobs,
                                   chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        minors = [_exact_permanent_job(job) for job in jobs]
    fre = [[0] * n for _ in range(n)]
    fim = [[0] * n for _ in range(n)]
    for idx, (mr, mi) in enumerate(minors):
        i, j = divmod(idx, n)
        ar, ai = re[i][j], im[i][j]
        fre[i][j] = ar * mr - ai * mi
        fim[i][j] = ar * mi + ai * mr
    return LaplaceMatrix(ExactMatrix(fre, fim), permanent_ryser(A))


def permanent_directional_derivative(A, C):
    """Sum of c_ij * per(A(i, j)) over all entries: the derivative of
    per(A + tC) at t = 0.  Returns a complex for float inputs and a
    GaussianInteger for exact inputs."""
    n = _require_square(A, "permanent_directional_derivative")
    if n < 2:
        raise ValueError("needs n >= 2")
    if A.shape != C.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {C.shape}")
    if isinstance(A, ComplexMatrix) and isinstance(C, ComplexMatrix):
        a, c = A.data, C.data
        total = 0.0 + 0.0j
        for i in range(n):
            for j in range(n):
                total += c[i, j] * _per_ryser_float(
                    np.delete(np.delete(a, i, axis=0), j, axis=1))
        return total
    if isinstance(A, ExactMatrix) and isinstance(C, ExactMatrix):
        tr = 0
        ti = 0
        for i in range(n):
            for j in range(n):
                mre, mim = _minor_lists(A.re, A.im, i, j)
                pr, pi = _per_ryser_exact(mre, mim, n - 1)
                cr, ci = C.re[i][j], C.im[i][j]
                tr += cr * pr - ci * pi
                ti += cr * pi + ci * pr
        return GaussianInteger(tr, ti)
    raise TypeError("A and C must be the same matrix kind")
