"""Seeded stochastic search for spectral counterexamples over rank-2
Gaussian-integer Gram matrices A = X* X with X a 2 x n complex integer
matrix, plus self-contained, re-verifiable violation certificates.

The climb is a plain accept-if-not-worse hill climb on the ratio

    lambda_max_real(F_A) / per(A)

with single-component integer perturbations.  All randomness derives from
the config seed (restart r uses seed XOR r), so a config determines the
certificate stream byte for byte; restarts are independent and may run on
a worker pool without changing the stream.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .conjectures import (
    REPORT_RTOL,
    CheckReport,
    LiftResult,
    _make_report,
    check_conjecture3,
    lift_counterexample,
)
from .matrices import ExactMatrix, content_digest, gram
from .permanent import LaplaceMatrix, laplace_matrix, permanent_ryser
from .spectra import lambda_max_real_sym

__all__ = [
    "SearchConfig",
    "Certificate",
    "DegenerateInstanceError",
    "CertificateVerificationError",
    "random_instance",
    "objective",
    "hill_climb",
    "verify_certificate",
    "attach_lift",
    "CERT_FORMAT",
]

CERT_FORMAT = "permlab-cert-1"


class DegenerateInstanceError(ValueError):
    """gram(X) has a non-positive permanent; the instance carries no ratio."""


class CertificateVerificationError(RuntimeError):
    def __init__(self, field_name: str, stored, recomputed):
        self.field_name = field_name
        self.stored = stored
        self.recomputed = recomputed
        super().__init__(f"certificate field {field_name!r} does not reproduce: "
                         f"stored {stored!r}, recomputed {recomputed!r}")


@dataclass(frozen=True)
class SearchConfig:
    n: int
    seed: int
    max_iters: int
    entry_bound: int = 64
    restarts: int = 1
    objective_threshold: float = 1.0
    warm_start: ExactMatrix | None = field(default=None)

    def __post_init__(self):
        if not (2 <= self.n <= 20):
            raise ValueError(f"n must be in 2..20, got {self.n}")
        if self.entry_bound < 0:
            raise ValueError("entry_bound must be >= 0")
        if self.max_iters < 0 or self.restarts < 1:
            raise ValueError("max_iters must be >= 0 and restarts >= 1")
        if self.warm_start is not None and self.warm_start.shape != (2, self.n):
            raise ValueError(f"warm_start must be 2 x {self.n}, "
                             f"got {self.warm_start.shape}")


@dataclass(frozen=True)
class Certificate:
    """Self-contained record of a ratio observation: the integer data X,
    the exact permanent (decimal string), the eigenvalue, and where in the
    seeded run it was found."""

    x: ExactMatrix              # 2 x n complex integer matrix
    per_a_decimal: str          # exact per(gram(X)), zero imaginary part
    per_a: float                # double rendering of the same
    lambda_max_real: float
    ratio: float
    seed: int
    restart: int
    iteration: int
    lift: LiftResult | None = None

    def to_obj(self) -> dict:
        return {
            "format_version": CERT_FORMAT,
            "X_real": [list(row) for row in self.x.re],
            "X_imag": [list(row) for row in self.x.im],
            "per_A": {"decimal": self.per_a_decimal, "double": self.per_a},
            "lambda_max_real": self.lambda_max_real,
            "ratio": self.ratio,
            "seed_provenance": {"seed": self.seed, "restart": self.restart,
                                "iteration": self.iteration},
            "lift": self.lift.to_obj() if self.lift is not None else None,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_obj(cls, obj: dict) -> "Certificate":
        if obj.get("format_version") != CERT_FORMAT:
            raise ValueError(f"unsupported certificate format: "
                             f"{obj.get('format_version')!r}")
        x = ExactMatrix(obj["X_real"], obj["X_imag"])
        prov = obj["seed_provenance"]
        lift = obj.get("lift")
        return cls(x, obj["per_A"]["decimal"], float(obj["per_A"]["double"]),
                   float(obj["lambda_max_real"]), float(obj["ratio"]),
                   int(prov["seed"]), int(prov["restart"]), int(prov["iteration"]),
                   LiftResult.from_obj(lift) if lift is not None else None)

    @classmethod
    def from_json_line(cls, line: str) -> "Certificate":
        return cls.from_obj(json.loads(line))


# ---------------------------------------------------------------------------
# instance generation and objective


def random_instance(rng: np.random.Generator, n: int, entry_bound: int) -> ExactMatrix:
    """Uniform 2 x n complex integer matrix with components in
    [-entry_bound, entry_bound]; real parts drawn first, then imaginary."""
    re = rng.integers(-entry_bound, entry_bound + 1, size=(2, n))
    im = rng.integers(-entry_bound, entry_bound + 1, size=(2, n))
    return ExactMatrix(re.tolist(), im.tolist())


def _evaluate(X: ExactMatrix, workers: int | None = None):
    """(ratio, per decimal, per double, lambda) for A = gram(X), with all
    permanents on the exact backend."""
    A = gram(X)
    fa = laplace_matrix(A, workers=workers)
    per = fa.source_permanent.value
    if per.im != 0:
        raise AssertionError("permanent of an exact Hermitian Gram has nonzero "
                             "imaginary part; arithmetic bug")
    if per.re <= 0:
        raise DegenerateInstanceError(f"per(gram(X)) = {per.re} is not positive")
    lam = lambda_max_real_sym(fa.matrix.to_complex()).eigenvalue
    per_f = float(per.re)
    return lam / per_f, str(per.re), per_f, lam


def objective(X: ExactMatrix, workers: int | None = None) -> float:
    """lambda_max_real(F_{gram(X)}) / per(gram(X)), exact-backend permanents
    rendered to doubles for the quotient."""
    if X.shape[0] != 2:
        raise ValueError(f"X must have exactly 2 rows, got {X.shape}")
    return _evaluate(X, workers=workers)[0]


# ---------------------------------------------------------------------------
# hill climb


def _exceeds_threshold(ratio: float, threshold: float) -> bool:
    """Strictly above the threshold by more than eigensolver rounding noise.

    Conforming instances sit at ratio exactly 1 (the all-equal vector is an
    eigenvector with eigenvalue per(A)), so a plain > would emit spurious
    certificates a few ulp above the default threshold."""
    return ratio > threshold + REPORT_RTOL * max(abs(threshold), abs(ratio))


def _perturb(X: ExactMatrix, rng: np.random.Generator, n: int) -> ExactMatrix:
    """One uniformly chosen entry component moved by a uniform step in
    +-{1..8}.  Consumes exactly two rng draws."""
    c = int(rng.integers(4 * n))
    s = int(rng.integers(16))
    step = s - 8 if s < 8 else s - 7
    col, rem = divmod(c, 4)
    row, part = divmod(rem, 2)
    re = [list(r) for r in X.re]
    im = [list(r) for r in X.im]
    (re if part == 0 else im)[row][col] += step
    return ExactMatrix(re, im)


def _run_restart(config: SearchConfig, restart: int,
                 workers: int | None = None, evaluate_fn=None):
    """Candidate certificates of one restart, in iteration order.

    A candidate is recorded whenever the current objective strictly exceeds
    both the threshold and the best candidate so far in this restart; the
    global best-so-far filter is applied at merge time so parallel and
    sequential execution emit identical streams.
    """
    evaluate = evaluate_fn or (lambda X: _evaluate(X, workers=workers))
    rng = np.random.default_rng(config.seed ^ restart)
    n = config.n
    if config.warm_start is not None:
        X = config.warm_start
        current = evaluate(X)
    else:
        X = None
        current = None
        for _ in range(1000):
            X = random_instance(rng, n, config.entry_bound)
            try:
                current = evaluate(X)
            except DegenerateInstanceError:
                continue
            break
        if current is None:
            return []
    candidates = []
    best_ratio = -np.inf
    ratio = current[0]
    if _exceeds_threshold(ratio, config.objective_threshold):
        candidates.append(_certificate(config, restart, 0, X, current))
        best_ratio = ratio
    for k in range(1, config.max_iters + 1):
        Xp = _perturb(X, rng, n)
        try:
            trial = evaluate(Xp)
        except DegenerateInstanceError:
            continue  # degenerate move: report-and-skip, never accept
        if trial[0] >= ratio:
            X, current, ratio = Xp, trial, trial[0]
            if _exceeds_threshold(ratio, config.objective_threshold) and ratio > best_ratio:
                candidates.append(_certificate(config, restart, k, X, current))
                best_ratio = ratio
    return candidates


def _certificate(config, restart, iteration, X, evaluation) -> Certificate:
    ratio, per_dec, per_f, lam = evaluation
    return Certificate(X, per_dec, per_f, lam, ratio,
                       config.seed, restart, iteration)


def hill_climb(config: SearchConfig, workers: int | None = None,
               restart_workers: int = 1, evaluate_fn=None):
    """Yield certificates in canonical (restart, iteration) order.

    Emission keeps only strict improvements over the best ratio emitted so
    far across the whole run, and only above the configured threshold.
    `restart_workers` > 1 evaluates restarts on a process pool; the emitted
    stream is identical either way.  `evaluate_fn` is a test seam that
    replaces the exact objective (sequential execution only).
    """
    if restart_workers > 1 and evaluate_fn is None:
        with ProcessPoolExecutor(max_workers=restart_workers) as pool:
            per_restart = list(pool.map(_run_restart, [config] * config.restarts,
                                        range(config.restarts)))
    else:
        per_restart = (
            _run_restart(config, r, workers=workers, evaluate_fn=evaluate_fn)
            for r in range(config.restarts))
    best = -np.inf
    for candidates in per_restart:
        for cert in candidates:
            if cert.ratio > best and _exceeds_threshold(cert.ratio,
                                                        config.objective_threshold):
                best = cert.ratio
                yield cert


# ---------------------------------------------------------------------------
# verification


def _check_close(name: str, stored: float, recomputed: float, rtol: float = 1e-9):
    if not np.isclose(stored, recomputed, rtol=rtol, atol=0.0):
        raise CertificateVerificationError(name, stored, recomputed)


def verify_certificate(cert: Certificate,
                       workers: int | None = None) -> tuple[CheckReport, CheckReport | None]:
    """Recompute everything from the certificate's X alone.

    The permanent is recomputed exactly; the eigenvalue is recomputed from
    the double-rendered Laplace expansion matrix (agreement well inside the
    1e-9 relative gate).  Returns the resulting C4 report, plus a re-run C3
    report when the certificate carries a lift.  Any stored-vs-recomputed
    mismatch beyond 1e-9 relative raises `CertificateVerificationError`.
    """
    X = cert.x
    A = gram(X)
    per = permanent_ryser(A).value
    if per.im != 0:
        raise CertificateVerificationError("per_A.imag", 0, per.im)
    if str(per.re) != cert.per_a_decimal:
        raise CertificateVerificationError("per_A.decimal", cert.per_a_decimal, str(per.re))
    per_f = float(per.re)
    _check_close("per_A.double", cert.per_a, per_f)
    fa_float = laplace_matrix(A.to_complex(), workers=workers)
    lam = lambda_max_real_sym(fa_float.matrix).eigenvalue
    _check_close("lambda_max_real", cert.lambda_max_real, lam)
    _check_close("ratio", cert.ratio, lam / per_f)
    c4 = _make_report("C4", lam, per_f, "exact-ryser", content_digest(A))
    c3 = None
    if cert.lift is not None:
        c3 = check_conjecture3(A, cert.lift.B)
    return c4, c3


def attach_lift(cert: Certificate, fa: LaplaceMatrix | None = None,
                workers: int | None = None) -> Certificate:
    """Return a copy of the certificate with a real-mode lift attached
    (requires the certificate's ratio to exceed 1, i.e. a C4 violation)."""
    A = gram(cert.x)
    lift = lift_counterexample(A, mode="real", fa=fa, workers=workers)
    return Certificate(cert.x, cert.per_a_decimal, cert.per_a,
                       cert.lambda_max_real, cert.ratio,
                       cert.seed, cert.restart, cert.iteration, lift)
