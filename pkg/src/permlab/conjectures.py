"""Executable checkers for the four permanent inequalities, plus the
constructive lift that turns a spectral violation into a Hadamard-product
violation.

The four checks, for A, B positive semidefinite Hermitian:

  C1: per(A o B) <= per(A) * prod_i b_ii
  C2: lambda_max(F_A) <= per(A)
  C3: C1 restricted to B with nonnegative entries (precondition, not a result)
  C4: lambda_max of the entry-wise real part of F_A <= per(A)

where o is the Hadamard product and F_A the Laplace expansion matrix.
A violation of C2 (resp. C4) can be lifted to a violation of C1 (resp. C3)
by scanning the rank-2 correlation family built from the dominant
eigenvector; `lift_counterexample` implements that scan over a geometric
epsilon grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import (
    ComplexMatrix,
    ComplexVector,
    ExactMatrix,
    content_digest,
    correlation_matrix,
    hadamard,
    has_nonnegative_entries,
    is_psd,
    matrix_from_obj,
    matrix_to_obj,
)
from .permanent import LaplaceMatrix, laplace_matrix, permanent_ryser
from .spectra import lambda_max_hermitian, lambda_max_real_sym, rayleigh_quotient

__all__ = [
    "CheckReport",
    "LiftResult",
    "NoViolatingEpsilonError",
    "check_conjecture1",
    "check_conjecture2",
    "check_conjecture3",
    "check_conjecture4",
    "taylor_residual",
    "lift_counterexample",
    "REPORT_RTOL",
    "EPSILON_GRID",
]

# separates "inequality violated" from rounding noise
REPORT_RTOL = 1e-9

# geometric grid 2^0 .. 2^-20; below that eps^2 sits at double-precision noise
EPSILON_GRID = tuple(2.0 ** -k for k in range(21))

CHECK_FORMAT = "permlab-check-1"
LIFT_FORMAT = "permlab-lift-1"


@dataclass(frozen=True)
class CheckReport:
    """One inequality evaluation: holds iff margin >= -REPORT_RTOL * scale."""

    conjecture_id: str  # C1 | C2 | C3 | C4
    lhs: float
    rhs: float
    margin: float       # rhs - lhs
    holds: bool
    near_zero: bool     # |margin| within the rounding-noise band
    backend: str
    inputs_digest: str

    def to_obj(self) -> dict:
        return {
            "format_version": CHECK_FORMAT,
            "conjecture_id": self.conjecture_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "near_zero": self.near_zero,
            "backend": self.backend,
            "inputs_digest": self.inputs_digest,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "CheckReport":
        if obj.get("format_version") != CHECK_FORMAT:
            raise ValueError(f"unsupported check format: {obj.get('format_version')!r}")
        return cls(obj["conjecture_id"], float(obj["lhs"]), float(obj["rhs"]),
                   float(obj["margin"]), bool(obj["holds"]), bool(obj["near_zero"]),
                   obj["backend"], obj["inputs_digest"])


def _make_report(conjecture_id: str, lhs: float, rhs: float,
                 backend: str, inputs_digest: str) -> CheckReport:
    margin = rhs - lhs
    tol = REPORT_RTOL * max(abs(lhs), abs(rhs))
    return CheckReport(conjecture_id, lhs, rhs, margin,
                       holds=margin >= -tol, near_zero=abs(margin) <= tol,
                       backend=backend, inputs_digest=inputs_digest)


@dataclass(frozen=True)
class LiftResult:
    """A Hadamard-product violation produced from a spectral one."""

    epsilon_star: float
    v: ComplexVector
    B: ComplexMatrix
    per_AB: float
    per_A: float
    violation: float  # per_AB - per_A, positive on success
    scan_trace: tuple  # ((eps, per(A o B(eps))), ...) over the full grid

    def to_obj(self) -> dict:
        return {
            "format_version": LIFT_FORMAT,
            "epsilon_star": self.epsilon_star,
            "v": [[float(z.real), float(z.imag)] for z in self.v.data],
            "B": matrix_to_obj(self.B),
            "per_AB": self.per_AB,
            "per_A": self.per_A,
            "violation": self.violation,
            "scan_trace": [[e, p] for (e, p) in self.scan_trace],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "LiftResult":
        if obj.get("format_version") != LIFT_FORMAT:
            raise ValueError(f"unsupported lift format: {obj.get('format_version')!r}")
        v = ComplexVector([complex(p[0], p[1]) for p in obj["v"]])
        B = matrix_from_obj(obj["B"], kind="float")
        return cls(float(obj["epsilon_star"]), v, B, float(obj["per_AB"]),
                   float(obj["per_A"]), float(obj["violation"]),
                   tuple((float(e), float(p)) for e, p in obj["scan_trace"]))


class NoViolatingEpsilonError(RuntimeError):
    """The epsilon scan found no grid point with a positive violation."""

    def __init__(self, scan_trace):
        self.scan_trace = tuple(scan_trace)
        super().__init__(
            f"no violating epsilon in the {len(self.scan_trace)}-point grid; "
            "see .scan_trace for the full scan")


# ---------------------------------------------------------------------------
# helpers


def _require_psd(M, name: str):
    rep = is_psd(M)
    if not rep:
        if not rep.hermitian_ok:
            raise ValueError(f"{name} is not Hermitian (worst defect {rep.hermitian_defect})")
        raise ValueError(f"{name} is not PSD (min eigenvalue {rep.min_eigenvalue!r})")


def _to_float_matrix(M) -> ComplexMatrix:
    return M.to_complex() if isinstance(M, ExactMatrix) else M


def _diag_product_real(B) -> float:
    if isinstance(B, ExactMatrix):
        p = 1
        for i in range(B.rows):
            p *= B.re[i][i]
        return float(p)
    return float(np.prod(B.data.diagonal().real))


def _combine_backend(lhs_tag: str, rhs_tag: str) -> str:
    return lhs_tag if lhs_tag == rhs_tag else f"{lhs_tag}+{rhs_tag}"


def _hadamard_permanent(A, B):
    """per(A o B): exact when both operands are exact, else in doubles with
    explicit conversion of the exact side."""
    if isinstance(A, ExactMatrix) and isinstance(B, ExactMatrix):
        return permanent_ryser(hadamard(A, B))
    return permanent_ryser(hadamard(_to_float_matrix(A), _to_float_matrix(B)))


# ---------------------------------------------------------------------------
# checkers


def _check_product_inequality(conjecture_id: str, A, B) -> CheckReport:
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    _require_psd(A, "A")
    _require_psd(B, "B")
    per_ab = _hadamard_permanent(A, B)
    per_a = permanent_ryser(A)
    lhs = per_ab.real
    rhs = per_a.real * _diag_product_real(B)
    return _make_report(conjecture_id, lhs, rhs,
                        _combine_backend(per_ab.backend, per_a.backend),
                        content_digest(A, B))


def check_conjecture1(A, B) -> CheckReport:
    """per(A o B) <= per(A) * prod_i b_ii for PSD Hermitian A, B."""
    return _check_product_inequality("C1", A, B)


def check_conjecture3(A, B) -> CheckReport:
    """Same inequality as C1 with B additionally required to have
    nonnegative entries.  A failed nonnegativity check is a precondition
    error, not a violation."""
    if not has_nonnegative_entries(B):
        raise ValueError("B must have nonnegative entries for this check "
                         "(precondition, distinct from a violation)")
    report = _check_product_inequality("C3", A, B)
    return report


def check_conjecture2(A, fa: LaplaceMatrix | None = None,
                      workers: int | None = None) -> CheckReport:
    """lambda_max of the Laplace expansion matrix against per(A).

    `fa` may carry a precomputed LaplaceMatrix of A to avoid the n^2 * 2^n
    rebuild; it must have been built from this A.
    """
    _require_psd(A, "A")
    if fa is None:
        fa = laplace_matrix(A, workers=workers)
    spectral = lambda_max_hermitian(_to_float_matrix(fa.matrix))
    per_a = fa.source_permanent
    return _make_report("C2", spectral.eigenvalue, per_a.real,
                        per_a.backend, content_digest(A))


def check_conjecture4(A, fa: LaplaceMatrix | None = None,
                      workers: int | None = None) -> CheckReport:
    """lambda_max of the entry-wise real part of the Laplace expansion
    matrix against per(A)."""
    _require_psd(A, "A")
    if fa is None:
        fa = laplace_matrix(A, workers=workers)
    spectral = lambda_max_real_sym(_to_float_matrix(fa.matrix))
    per_a = fa.source_permanent
    return _make_report("C4", spectral.eigenvalue, per_a.real,
                        per_a.backend, content_digest(A))


# ---------------------------------------------------------------------------
# Taylor expansion of per(A o B(eps)) around eps = 0


def taylor_residual(A, v, eps: float):
    """Residual of the second-order expansion
    per(A o B(eps)) ~= per(A) + eps^2 (v* F_A v - per(A)).

    Returns (residual, slope_term).  The remainder is fourth order in eps,
    so halving eps should shrink the residual by roughly 16x.
    """
    if not (0.0 < eps <= 0.5):
        raise ValueError(f"eps must lie in (0, 0.5], got {eps!r}")
    _require_psd(A, "A")
    if not isinstance(v, ComplexVector):
        v = ComplexVector(v)
    B = correlation_matrix(v, eps)
    per_a = permanent_ryser(A).real
    per_ab = _hadamard_permanent(A, B).real
    fa = laplace_matrix(A)
    slope = rayleigh_quotient(_to_float_matrix(fa.matrix), v) - per_a
    residual = abs(per_ab - per_a - eps * eps * slope)
    return residual, slope


# ---------------------------------------------------------------------------
# constructive lift


def lift_counterexample(A, mode: str = "complex",
                        fa: LaplaceMatrix | None = None,
                        workers: int | None = None) -> LiftResult:
    """Lift a spectral violation of A into a Hadamard-product violation.

    mode "complex": requires a C2 violation; v is the dominant eigenvector
    of the Laplace expansion matrix, and the produced pair (A, B(eps*))
    violates C1.  mode "real": requires a C4 violation; v is the (real)
    dominant eigenvector of the entry-wise real part, candidate B(eps) with
    negative entries are skipped, and the produced pair violates C3.

    Scans eps over the geometric grid 2^0 .. 2^-20 and keeps the eps with
    the largest positive violation per(A o B(eps)) - per(A), ties broken
    toward larger eps.  Raises `NoViolatingEpsilonError` (with the full
    scan trace) if no grid point violates.
    """
    if mode not in ("complex", "real"):
        raise ValueError(f"mode must be 'complex' or 'real', got {mode!r}")
    _require_psd(A, "A")
    if fa is None:
        fa = laplace_matrix(A, workers=workers)
    fa_float = _to_float_matrix(fa.matrix)
    per_a = fa.source_permanent
    if mode == "complex":
        report_fn = check_conjecture2
        spectral = lambda_max_hermitian(fa_float)
    else:
        report_fn = check_conjecture4
        spectral = lambda_max_real_sym(fa_float)
    precheck = report_fn(A, fa=fa)
    if precheck.holds:
        raise ValueError(
            f"A does not violate {precheck.conjecture_id} "
            f"(margin {precheck.margin!r}); nothing to lift")
    v = ComplexVector.unit(spectral.eigenvector.data)
    if mode == "real" and not v.is_real:
        # power iteration on a real matrix keeps a real iterate, so this
        # can only trip if the input lost Hermiticity
        raise AssertionError("real-mode eigenvector has a nonzero imaginary part")

    a_float = _to_float_matrix(A)
    per_a_real = per_a.real
    trace = []
    best = None  # (violation, eps, B, per_ab)
    for eps in EPSILON_GRID:
        B = correlation_matrix(v, eps)
        per_ab = permanent_ryser(hadamard(a_float, B)).real
        trace.append((eps, per_ab))
        if mode == "real" and not has_nonnegative_entries(B):
            continue
        violation = per_ab - per_a_real
        if violation > 0.0 and (best is None or violation > best[0]):
            best = (violation, eps, B, per_ab)
    if best is None:
        raise NoViolatingEpsilonError(trace)
    violation, eps_star, B_star, per_ab_star = best
    if mode == "real":
        assert has_nonnegative_entries(B_star)
    return LiftResult(eps_star, v, B_star, per_ab_star, per_a_real,
                      violation, tuple(trace))
