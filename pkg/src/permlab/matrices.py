"""Dense matrix value types and constructors.

Two entry domains are supported: double-precision complex (`ComplexMatrix`)
and exact Gaussian integers, i.e. complex numbers with arbitrary-precision
integer real and imaginary parts (`ExactMatrix`).  All types are immutable
after construction; operations never mutate their inputs.

The on-disk format for both kinds is a JSON document

    {"rows": n, "cols": m, "entries": [[re, im], ...]}

with entries in row-major order.  Exact matrices use integer components.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ComplexMatrix",
    "ExactMatrix",
    "ComplexVector",
    "PsdReport",
    "gram",
    "hadamard",
    "correlation_matrix",
    "is_psd",
    "has_nonnegative_entries",
    "load_matrix",
    "save_matrix",
    "content_digest",
]

# components below 2^53 render losslessly as doubles
_EXACT_FLOAT_BOUND = 1 << 53


class ComplexMatrix:
    """Immutable dense complex matrix with finite double-precision entries."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"matrix dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("matrix entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexMatrix is immutable")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other):
        return isinstance(other, ComplexMatrix) and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"ComplexMatrix({self.data.tolist()!r})"

    @classmethod
    def identity(cls, n: int) -> "ComplexMatrix":
        return cls(np.eye(n))

    @classmethod
    def ones(cls, n: int) -> "ComplexMatrix":
        """The n x n matrix with every entry equal to 1."""
        return cls(np.ones((n, n)))


class ExactMatrix:
    """Immutable dense matrix over the Gaussian integers.

    Entries are stored as two parallel tuples-of-tuples of Python ints
    (real and imaginary components), so there is no magnitude limit.
    """

    __slots__ = ("re", "im", "rows", "cols")

    def __init__(self, re, im):
        re = tuple(tuple(int(x) for x in row) for row in re)
        im = tuple(tuple(int(x) for x in row) for row in im)
        if len(re) < 1 or len(re[0]) < 1:
            raise ValueError("matrix dimensions must be positive")
        rows, cols = len(re), len(re[0])
        if any(len(r) != cols for r in re) or len(im) != rows or any(len(r) != cols for r in im):
            raise ValueError("ragged or mismatched real/imaginary parts")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> tuple[int, int]:
        return (self.re[i][j], self.im[i][j])

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.re == other.re and self.im == other.im

    def __repr__(self):
        return f"ExactMatrix(re={self.re!r}, im={self.im!r})"

    @classmethod
    def from_pairs(cls, entries) -> "ExactMatrix":
        """Build from a nested list of (re, im) integer pairs."""
        re = [[p[0] for p in row] for row in entries]
        im = [[p[1] for p in row] for row in entries]
        return cls(re, im)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                   [[0] * n for _ in range(n)])

    @classmethod
    def ones(cls, n: int) -> "ExactMatrix":
        return cls([[1] * n for _ in range(n)], [[0] * n for _ in range(n)])

    def to_complex(self) -> ComplexMatrix:
        """Render as doubles.  Lossless when every component is below 2^53."""
        arr = np.array([[complex(self.re[i][j], self.im[i][j])
                         for j in range(self.cols)] for i in range(self.rows)])
        return ComplexMatrix(arr)

    def max_component(self) -> int:
        return max(max(max(abs(x) for x in row) for row in self.re),
                   max(max(abs(x) for x in row) for row in self.im))


class ComplexVector:
    """Immutable complex vector; `unit` builds a normalized instance."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError(f"expected a nonempty 1-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("vector entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexVector is immutable")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __getitem__(self, idx):
        return self.data[idx]

    def __repr__(self):
        return f"ComplexVector({self.data.tolist()!r})"

    @classmethod
    def unit(cls, data) -> "ComplexVector":
        """Normalize to unit 2-norm; rejects the zero vector."""
        arr = np.asarray(data, dtype=np.complex128)
        nrm = np.linalg.norm(arr)
        if nrm == 0.0 or not np.isfinite(nrm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(arr / nrm)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.data.imag == 0.0))


# ---------------------------------------------------------------------------
# constructors


def gram(X):
    """Conjugate-transpose product X* X.  Hermitian PSD by construction.

    Preserves the entry domain: an `ExactMatrix` input yields an exact
    Gaussian-integer Gram matrix.
    """
    if isinstance(X, ComplexMatrix):
        a = X.data.conj().T @ X.data
        # enforce an exactly Hermitian result; BLAS order differences can
        # leave the two triangles a few ulp apart
        a = (a + a.conj().T) / 2.0
        np.fill_diagonal(a, a.diagonal().real)
        return ComplexMatrix(a)
    if isinstance(X, ExactMatrix):
        k, n = X.rows, X.cols
        re, im = X.re, X.im
        gre = [[0] * n for _ in range(n)]
        gim = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                rr = 0
                ii = 0
                for t in range(k):
                    # conj(x_ti) * x_tj
                    rr += re[t][i] * re[t][j] + im[t][i] * im[t][j]
                    ii += re[t][i] * im[t][j] - im[t][i] * re[t][j]
                gre[i][j] = rr
                gim[i][j] = ii
        return ExactMatrix(gre, gim)
    raise TypeError(f"gram expects ComplexMatrix or ExactMatrix, got {type(X).__name__}")


def hadamard(A, B):
    """Entry-wise product.  Both operands must be the same matrix kind;
    convert explicitly to mix exact and floating-point matrices."""
    if isinstance(A, ComplexMatrix) and isinstance(B, ComplexMatrix):
        if A.shape != B.shape:
            raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
        return ComplexMatrix(A.data * B.data)
    if isinstance(A, ExactMatrix) and isinstance(B, ExactMatrix):
        if A.shape != B.shape:
            raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
        rows, cols = A.shape
        re = [[A.re[i][j] * B.re[i][j] - A.im[i][j] * B.im[i][j] for j in range(cols)]
              for i in range(rows)]
        im = [[A.re[i][j] * B.im[i][j] + A.im[i][j] * B.re[i][j] for j in range(cols)]
              for i in range(rows)]
        return ExactMatrix(re, im)
    raise TypeError("hadamard requires two matrices of the same kind "
                    f"(got {type(A).__name__}, {type(B).__name__})")


def correlation_matrix(v: ComplexVector, eps: float) -> ComplexMatrix:
    """Rank-at-most-2 correlation matrix built from a unit vector.

    Entry (i, j) is (1 + eps^2 conj(v_i) v_j) / (alpha_i alpha_j) with
    alpha_i = sqrt(1 + eps^2 |v_i|^2).  The diagonal is pinned to exactly 1
    (its closed form is identically 1), the matrix is Hermitian PSD, and
    eps = 0 gives the all-ones matrix.
    """
    if not isinstance(v, ComplexVector):
        v = ComplexVector(v)
    if abs(v.norm() - 1.0) > 1e-12:
        raise ValueError(f"v must be unit-norm within 1e-12 (got ||v|| = {v.norm()!r})")
    if not (eps >= 0.0) or not math.isfinite(eps):
        raise ValueError(f"eps must be a nonnegative finite real, got {eps!r}")
    w = v.data
    alpha = np.sqrt(1.0 + eps * eps * np.abs(w) ** 2)
    b = (1.0 + eps * eps * np.outer(np.conj(w), w)) / np.outer(alpha, alpha)
    b = (b + b.conj().T) / 2.0
    np.fill_diagonal(b, 1.0)
    return ComplexMatrix(b)


# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class PsdReport:
    """Outcome of a positive-semidefiniteness test, with failure witnesses."""

    ok: bool
    hermitian_ok: bool
    min_eigenvalue: float | None
    # (i, j, |a_ij - conj(a_ji)|) for the worst non-Hermitian entry pair
    hermitian_defect: tuple[int, int, float] | None
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def _as_complex(A) -> ComplexMatrix:
    if isinstance(A, ComplexMatrix):
        return A
    if isinstance(A, ExactMatrix):
        return A.to_complex()
    return ComplexMatrix(A)


def is_psd(A, tol: float = 1e-9) -> PsdReport:
    """Test membership in the positive semidefinite Hermitian matrices.

    Hermiticity is required entry-wise within tol * max|a_ij|; the minimum
    eigenvalue (from a full Hermitian eigendecomposition) must be at least
    -tol * ||A||_2.  Exact matrices are rendered to doubles first.
    """
    M = _as_complex(A)
    if not M.is_square:
        raise ValueError(f"is_psd requires a square matrix, got {M.shape}")
    a = M.data
    scale = float(np.abs(a).max())
    defect = np.abs(a - a.conj().T)
    worst = float(defect.max())
    if worst > tol * scale and scale > 0.0:
        i, j = np.unravel_index(int(defect.argmax()), defect.shape)
        return PsdReport(False, False, None, (int(i), int(j), worst), tol)
    evals = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    lam_min = float(evals[0])
    norm2 = float(np.abs(evals).max())
    ok = lam_min >= -tol * norm2
    return PsdReport(ok, True, lam_min, None, tol)


def has_nonnegative_entries(A, tol: float = 1e-9) -> bool:
    """True when every entry is (numerically) a nonnegative real.

    The threshold is relative: |imag| <= tol * max|a_ij| and
    real >= -tol * max|a_ij|.  Exact matrices are tested exactly.
    """
    if isinstance(A, ExactMatrix):
        return all(x == 0 for row in A.im for x in row) and \
            all(x >= 0 for row in A.re for x in row)
    M = _as_complex(A)
    a = M.data
    scale = float(np.abs(a).max())
    thr = tol * scale
    return bool(np.all(np.abs(a.imag) <= thr) and np.all(a.real >= -thr))


# ---------------------------------------------------------------------------
# serialization


def _entries_pairs(M):
    if isinstance(M, ExactMatrix):
        return [[M.re[i][j], M.im[i][j]] for i in range(M.rows) for j in range(M.cols)]
    return [[float(z.real), float(z.imag)] for z in M.data.ravel()]


def matrix_to_obj(M) -> dict:
    """JSON-ready dict in the shared matrix file schema."""
    rows, cols = (M.rows, M.cols)
    return {"rows": rows, "cols": cols, "entries": _entries_pairs(M)}


def matrix_from_obj(obj: dict, kind: str = "auto"):
    """Inverse of `matrix_to_obj`.

    kind "auto" yields an ExactMatrix when every component is an integer
    token, a ComplexMatrix otherwise.  kind "exact" additionally accepts
    integral floats but rejects fractional components; kind "float" always
    yields a ComplexMatrix.
    """
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix document: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(entries)}")
    pairs = []
    for e in entries:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise ValueError(f"each entry must be an [re, im] pair, got {e!r}")
        pairs.append((e[0], e[1]))

    def all_int_tokens():
        return all(isinstance(x, int) and not isinstance(x, bool) for p in pairs for x in p)

    if kind == "auto":
        kind = "exact" if all_int_tokens() else "float"
    if kind == "exact":
        comps = []
        for p in pairs:
            for x in p:
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise ValueError(f"non-numeric component in exact load: {x!r}")
                if isinstance(x, float):
                    if not x.is_integer():
                        raise ValueError(f"non-integer component in exact load: {x!r}")
                    x = int(x)
                comps.append(x)
        re = [[comps[2 * (i * cols + j)] for j in range(cols)] for i in range(rows)]
        im = [[comps[2 * (i * cols + j) + 1] for j in range(cols)] for i in range(rows)]
        return ExactMatrix(re, im)
    if kind == "float":
        data = np.array([complex(p[0], p[1]) for p in pairs]).reshape(rows, cols)
        return ComplexMatrix(data)
    raise ValueError(f"unknown kind {kind!r} (expected auto/exact/float)")


def save_matrix(M, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_obj(M), fh)
        fh.write("\n")


def load_matrix(path, kind: str = "auto"):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    return matrix_from_obj(obj, kind=kind)


def content_digest(*matrices) -> str:
    """Order-sensitive SHA-256 over canonical matrix bytes."""
    h = hashlib.sha256()
    for M in matrices:
        if isinstance(M, ExactMatrix):
            h.update(b"exact|%d|%d|" % (M.rows, M.cols))
            for i in range(M.rows):
                for j in range(M.cols):
                    h.update(b"%d,%d;" % (M.re[i][j], M.im[i][j]))
        else:
            M = _as_complex(M)
            h.update(b"float|%d|%d|" % (M.rows, M.cols))
            h.update(M.data.tobytes())
    return h.hexdigest()
