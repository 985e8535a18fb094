"""Bundled reference dataset: the 16x16 counterexample instance.

The instance is a rank-2 Gram matrix A = X* X built from a 2x16 complex
integer matrix X.  It violates both spectral inequalities (C2 and C4), and
lifts to Hadamard-product violations of C1 and C3.  Reference figures,
recomputable via `permlab verify-paper`:

    per(A)                  ~ 2.1978e64   (exact integer, zero imaginary part)
    lambda_max_real(F_A)    ~ 2.2632e64
    ratio                   ~ 1.0298

The same data ships as JSON files under data/ for external tooling; these
constants are the embedded copy so no filesystem setup is needed.
"""

from __future__ import annotations

from .matrices import ExactMatrix, gram

__all__ = [
    "COUNTEREXAMPLE16_X_RE",
    "COUNTEREXAMPLE16_X_IM",
    "counterexample16_x",
    "counterexample16_gram",
]

COUNTEREXAMPLE16_X_RE = (
    (25, -23, 29, 11, -20, 47, 18, 29, 35, -25, -32, -28, -18, 25, 12, -36),
    (8, 38, -11, 34, 61, 42, -23, 10, 35, 24, 11, 9, 13, -9, 34, 22),
)

COUNTEREXAMPLE16_X_IM = (
    (30, 20, 51, -43, -11, 47, 4, 27, -26, -2, 11, 37, 64, 26, -28, 23),
    (0, 20, 10, 4, 28, 12, -46, 24, -43, 10, -17, -63, -23, 50, -40, 15),
)


def counterexample16_x() -> ExactMatrix:
    """The 2x16 complex integer matrix X of the bundled counterexample."""
    return ExactMatrix(COUNTEREXAMPLE16_X_RE, COUNTEREXAMPLE16_X_IM)


def counterexample16_gram() -> ExactMatrix:
    """The 16x16 Hermitian PSD matrix A = X* X (exact Gaussian integers)."""
    return gram(counterexample16_x())
