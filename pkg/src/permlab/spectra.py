"""Largest-eigenvalue machinery for Hermitian PSD matrices.

Power iteration is the primary engine: the matrices here are tiny (n <= 32)
and positive semidefinite, so the dominant eigenvalue in magnitude is the
largest eigenvalue.  The iterate is normalized every step, which keeps
magnitudes bounded even for eigenvalues around 1e64.  A full Hermitian
eigendecomposition is exposed separately as a cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import ComplexMatrix, ComplexVector, ExactMatrix

__all__ = [
    "SpectralResult",
    "NonConvergenceError",
    "lambda_max_hermitian",
    "real_symmetric_part",
    "lambda_max_real_sym",
    "rayleigh_quotient",
    "hermitian_eigensystem",
    "START_SEED",
]

START_SEED = 0xB4A7
MAX_ITERATIONS = 100_000

_REL_CHANGE_TOL = 1e-13
_RESIDUAL_ACCEPT = 1e-12
_RESIDUAL_SUCCESS = 1e-10


@dataclass(frozen=True)
class SpectralResult:
    """Dominant eigenpair with convergence metadata.

    `residual` is ||F v - lambda v||_2 relative to a lower bound on ||F||_2,
    so the reported figure never understates the true residual.
    """

    eigenvalue: float
    eigenvector: ComplexVector
    iterations: int
    residual: float


class NonConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap; carries the best estimate."""

    def __init__(self, best: SpectralResult):
        self.best = best
        super().__init__(
            f"power iteration did not converge after {best.iterations} iterations "
            f"(best eigenvalue {best.eigenvalue!r}, residual {best.residual:.3e})")


def _coerce_square(F) -> np.ndarray:
    if isinstance(F, ExactMatrix):
        F = F.to_complex()
    if isinstance(F, ComplexMatrix):
        a = F.data
    else:
        a = np.asarray(F, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _require_hermitian(a: np.ndarray, tol: float = 1e-9) -> None:
    scale = float(np.abs(a).max())
    if scale == 0.0:
        return
    if float(np.abs(a - a.conj().T).max()) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")


def _power_iteration(a: np.ndarray, start_vectors, seed: int) -> SpectralResult:
    n = a.shape[0]
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        v = np.full(n, 1.0 / np.sqrt(n), dtype=a.dtype)
        return SpectralResult(0.0, ComplexVector(v), 0, 0.0)
    norm_lb = fro / np.sqrt(n)  # ||F||_F / sqrt(n) <= ||F||_2
    total_iters = 0
    best: SpectralResult | None = None
    budget = MAX_ITERATIONS // len(start_vectors)
    for v0 in start_vectors:
        v = v0 / np.linalg.norm(v0)
        prev_lam = None
        streak = 0
        for _ in range(budget):
            total_iters += 1
            w = a @ v
            lam = float(np.real(np.vdot(v, w)))
            denom = max(abs(lam), norm_lb)
            resid = float(np.linalg.norm(w - lam * v)) / denom
            if prev_lam is not None:
                change = abs(lam - prev_lam) / max(abs(lam), 1e-300)
                streak = streak + 1 if change <= _REL_CHANGE_TOL else 0
            prev_lam = lam
            result = SpectralResult(lam, ComplexVector(v), total_iters, resid)
            if best is None or resid < best.residual:
                best = result
            if resid <= _RESIDUAL_ACCEPT or (streak >= 3 and resid <= _RESIDUAL_SUCCESS):
                return result
            wn = float(np.linalg.norm(w))
            if wn <= fro * 1e-18:
                break  # iterate fell into the kernel; try the next start
            v = w / wn
    raise NonConvergenceError(best if best is not None else
                              SpectralResult(0.0, ComplexVector(np.ones(n)), total_iters, np.inf))


def lambda_max_hermitian(F, seed: int = START_SEED) -> SpectralResult:
    """Dominant eigenpair of a Hermitian PSD matrix by power iteration.

    The start vector is drawn from a fixed-seed generator so runs are
    reproducible; the all-equal vector serves as a fallback restart.
    Raises `NonConvergenceError` after the iteration cap.
    """
    a = _coerce_square(F)
    _require_hermitian(a)
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    starts = [v0.astype(np.complex128), np.ones(n, dtype=np.complex128)]
    return _power_iteration(a, starts, seed)


def real_symmetric_part(F) -> ComplexMatrix:
    """Entry-wise real part of a Hermitian matrix (a real symmetric matrix;
    PSD whenever F is)."""
    a = _coerce_square(F)
    _require_hermitian(a)
    r = a.real
    return ComplexMatrix((r + r.T) / 2.0)


def lambda_max_real_sym(F, seed: int = START_SEED) -> SpectralResult:
    """Dominant eigenpair of the entry-wise real part of Hermitian PSD F.

    Equals the maximum of v^T F v over real unit vectors; the returned
    eigenvector is real.
    """
    r = real_symmetric_part(F).data.real
    n = r.shape[0]
    rng = np.random.default_rng(seed)
    starts = [rng.standard_normal(n), np.ones(n)]
    return _power_iteration(r, starts, seed)


def rayleigh_quotient(F, v) -> float:
    """Re(v* F v) for a unit vector v and Hermitian F."""
    a = _coerce_square(F)
    if isinstance(v, ComplexVector):
        w = v.data
    else:
        w = np.asarray(v, dtype=np.complex128)
    if w.shape != (a.shape[0],):
        raise ValueError(f"dimension mismatch: matrix {a.shape}, vector {w.shape}")
    nrm = float(np.linalg.norm(w))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"v must be unit-norm (got ||v|| = {nrm!r})")
    val = complex(np.vdot(w, a @ w))
    scale = max(abs(val), float(np.linalg.norm(a)))
    if scale > 0.0 and abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"Rayleigh quotient has a non-real part ({val.imag!r}); "
                         "matrix is not Hermitian enough")
    return val.real


def hermitian_eigensystem(F):
    """Full spectrum of a Hermitian matrix, ascending, via LAPACK.

    Cross-check oracle for the power iteration; also backs PSD witnesses.
    Returns (eigenvalues, eigenvectors) with eigenvectors in columns.
    """
    a = _coerce_square(F)
    _require_hermitian(a)
    evals, evecs = np.linalg.eigh((a + a.conj().T) / 2.0)
    return evals, evecs
