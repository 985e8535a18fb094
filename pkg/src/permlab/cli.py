"""Command-line surface.

Every command prints a JSON report on stdout and human-readable diagnostics
on stderr (suppressed by --json).  Exit codes:

    0  computed successfully; for check commands the inequality holds
    1  computed successfully; the inequality is violated
    2  input or usage error
    3  numerical non-convergence (including: no violating epsilon found)
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import datasets
from .conjectures import (
    NoViolatingEpsilonError,
    check_conjecture1,
    check_conjecture2,
    check_conjecture3,
    check_conjecture4,
    lift_counterexample,
)
from .matrices import (
    ComplexMatrix,
    ExactMatrix,
    gram,
    hadamard,
    is_psd,
    load_matrix,
    matrix_to_obj,
    save_matrix,
)
from .permanent import laplace_matrix, permanent_ryser
from .spectra import (
    START_SEED,
    NonConvergenceError,
    lambda_max_hermitian,
    lambda_max_real_sym,
)
from .search import SearchConfig, hill_climb
from .matrices import matrix_from_obj

_CHECKERS = {
    "c1": (check_conjecture1, 2),
    "c2": (check_conjecture2, 1),
    "c3": (check_conjecture3, 2),
    "c4": (check_conjecture4, 1),
}


def _say(args, msg: str) -> None:
    if not args.json:
        print(msg, file=sys.stderr)


def _emit(args, obj: dict) -> None:
    if args.json:
        print(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def _load(path: str, backend: str):
    kind = {"auto": "auto", "exact": "exact", "float": "float"}[backend]
    return load_matrix(path, kind=kind)


def _per_obj(pv) -> dict:
    if pv.is_exact:
        return {"re": str(pv.value.re), "im": str(pv.value.im)}
    return {"re": pv.value.real, "im": pv.value.imag}


# ---------------------------------------------------------------------------
# commands


def cmd_per(args) -> int:
    t0 = time.perf_counter()
    A = _load(args.input, args.backend)
    pv = permanent_ryser(A)
    dt = time.perf_counter() - t0
    _emit(args, {"n": A.rows, "backend": pv.backend, "per": _per_obj(pv),
                 "per_double": {"re": pv.to_complex().real, "im": pv.to_complex().imag},
                 "seconds": dt})
    _say(args, f"per = {pv.to_complex().real:.6e} ({pv.backend}, {dt:.3f}s)")
    return 0


def cmd_fa(args) -> int:
    t0 = time.perf_counter()
    A = _load(args.input, args.backend)
    fa = laplace_matrix(A, workers=args.workers)
    dt = time.perf_counter() - t0
    report = {"n": A.rows, "backend": fa.source_permanent.backend,
              "source_permanent": _per_obj(fa.source_permanent), "seconds": dt}
    if args.out:
        save_matrix(fa.matrix, args.out)
        report["out"] = args.out
    else:
        report["matrix"] = matrix_to_obj(fa.matrix)
    _emit(args, report)
    _say(args, f"Laplace expansion matrix built in {dt:.3f}s; "
               f"per = {fa.source_permanent.real:.6e}")
    return 0


def cmd_spectrum(args) -> int:
    t0 = time.perf_counter()
    A = _load(args.input, args.backend)
    if isinstance(A, ExactMatrix):
        A = A.to_complex()
    fn = lambda_max_real_sym if args.real_sym else lambda_max_hermitian
    res = fn(A, seed=args.seed)
    dt = time.perf_counter() - t0
    _emit(args, {
        "eigenvalue": res.eigenvalue,
        "iterations": res.iterations,
        "residual": res.residual,
        "real_sym": bool(args.real_sym),
        "eigenvector": [[z.real, z.imag] for z in res.eigenvector.data],
        "seconds": dt,
    })
    _say(args, f"lambda = {res.eigenvalue:.12e} "
               f"({res.iterations} iterations, residual {res.residual:.2e})")
    return 0


def cmd_check(args) -> int:
    checker, arity = _CHECKERS[args.conjecture]
    A = _load(args.a, args.backend)
    if arity == 2:
        if not args.b:
            raise ValueError(f"check {args.conjecture} requires --b")
        B = _load(args.b, args.backend)
        report = checker(A, B)
    else:
        report = checker(A, workers=args.workers)
    _emit(args, report.to_obj())
    verdict = "holds" if report.holds else "VIOLATED"
    _say(args, f"{report.conjecture_id}: {verdict} "
               f"(lhs {report.lhs:.6e}, rhs {report.rhs:.6e}, margin {report.margin:.3e})")
    return 0 if report.holds else 1


def cmd_lift(args) -> int:
    A = _load(args.a, args.backend)
    result = lift_counterexample(A, mode=args.mode, workers=args.workers)
    obj = result.to_obj()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(obj, fh, sort_keys=True)
            fh.write("\n")
        _emit(args, {"epsilon_star": result.epsilon_star, "violation": result.violation,
                     "per_AB": result.per_AB, "per_A": result.per_A, "out": args.out})
    else:
        _emit(args, obj)
    _say(args, f"lift ({args.mode}): eps* = {result.epsilon_star}, "
               f"per(AoB) - per(A) = {result.violation:.6e}")
    return 0


def cmd_search(args) -> int:
    warm = None
    if args.warm_start:
        warm = load_matrix(args.warm_start, kind="exact")
    config = SearchConfig(n=args.n, seed=args.seed, max_iters=args.iters,
                          entry_bound=args.bound, restarts=args.restarts,
                          objective_threshold=args.threshold, warm_start=warm)
    t0 = time.perf_counter()
    count = 0
    best = None
    iters_total = config.restarts * config.max_iters
    with open(args.out, "a") as fh:
        for cert in hill_climb(config, workers=args.workers,
                               restart_workers=args.restart_workers):
            fh.write(cert.to_json_line() + "\n")
            fh.flush()
            count += 1
            best = cert.ratio
            _say(args, f"certificate: ratio {cert.ratio:.6f} "
                       f"(restart {cert.restart}, iteration {cert.iteration})")
    dt = time.perf_counter() - t0
    _emit(args, {"certificates": count, "best_ratio": best,
                 "iterations": iters_total, "restarts": config.restarts,
                 "out": args.out, "seconds": dt})
    _say(args, f"search done: {count} certificate(s), best ratio {best}, {dt:.1f}s")
    return 0


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    n = args.n
    kind = args.kind
    if kind == "identity":
        M = ExactMatrix.identity(n) if args.integer else ComplexMatrix.identity(n)
    elif kind == "ones":
        M = ExactMatrix.ones(n) if args.integer else ComplexMatrix.ones(n)
    elif kind in ("psd", "rank1", "nonneg"):
        k = 1 if kind == "rank1" else n
        if args.integer:
            b = args.bound
            if kind == "nonneg":
                re = rng.integers(0, b + 1, size=(k, n))
                im = np.zeros((k, n), dtype=np.int64)
            else:
                re = rng.integers(-b, b + 1, size=(k, n))
                im = rng.integers(-b, b + 1, size=(k, n))
            M = gram(ExactMatrix(re.tolist(), im.tolist()))
        else:
            if kind == "nonneg":
                X = ComplexMatrix(rng.random((k, n)))
            else:
                X = ComplexMatrix(rng.standard_normal((k, n))
                                  + 1j * rng.standard_normal((k, n)))
            M = gram(X)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    save_matrix(M, args.out)
    _emit(args, {"kind": kind, "n": n, "out": args.out,
                 "exact": isinstance(M, ExactMatrix)})
    _say(args, f"wrote {kind} matrix ({n} x {n}) to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# verify-paper: end-to-end reproduction from the embedded dataset


_PER_4DIGITS = "2.1978e+64"
_LAMBDA_4DIGITS = "2.2632e+64"
_RATIO_WINDOW = (1.0288, 1.0308)


def cmd_verify_paper(args) -> int:
    t0 = time.perf_counter()
    use_float = args.backend == "float"
    results = []

    def record(name: str, ok: bool, detail: str):
        results.append({"assertion": name, "pass": bool(ok), "detail": detail})
        tag = "PASS" if ok else "FAIL"
        _say(args, f"[{len(results)}/6] {tag}  {name}: {detail}")

    A = datasets.counterexample16_gram()
    work = A.to_complex() if use_float else A

    psd = is_psd(A)
    record("A is PSD", bool(psd), f"min eigenvalue {psd.min_eigenvalue!r}")

    fa = laplace_matrix(work, workers=args.workers)
    per = fa.source_permanent
    per_txt = format(per.real, ".4e")
    record("per(A) 4-digit rendering", per_txt == _PER_4DIGITS,
           f"{per_txt} (expected {_PER_4DIGITS}; "
           f"exact = {per.value if per.is_exact else per.to_complex()})")

    spectral = lambda_max_real_sym(fa.matrix.to_complex()
                                   if not use_float else fa.matrix)
    lam_txt = format(spectral.eigenvalue, ".4e")
    record("lambda_max_real 4-digit rendering", lam_txt == _LAMBDA_4DIGITS,
           f"{lam_txt} (expected {_LAMBDA_4DIGITS}, residual {spectral.residual:.2e})")

    ratio = spectral.eigenvalue / per.real
    lo, hi = _RATIO_WINDOW
    record("ratio window", lo <= ratio <= hi, f"{ratio:.6f} in [{lo}, {hi}]")

    lift_ok = False
    lift = None
    lift_detail = "lift not attempted"
    try:
        lift = lift_counterexample(work, mode="real", fa=fa)
        lift_ok = lift.violation > 0.0
        lift_detail = (f"eps* = {lift.epsilon_star}, violation {lift.violation:.4e}, "
                       f"B nonnegative")
    except (ValueError, NoViolatingEpsilonError) as exc:
        lift_detail = str(exc)
    record("real-mode lift violates C3", lift_ok, lift_detail)

    if lift is not None:
        c1 = check_conjecture1(A.to_complex(), lift.B)
        record("same pair violates C1", not c1.holds,
               f"margin {c1.margin:.4e}")
    else:
        record("same pair violates C1", False, "no lift available")

    dt = time.perf_counter() - t0
    all_pass = all(r["pass"] for r in results)
    _emit(args, {
        "assertions": results,
        "per_A": _per_obj(per),
        "lambda_max_real": spectral.eigenvalue,
        "ratio": ratio,
        "backend": "float" if use_float else "exact",
        "seconds": dt,
        "pass": all_pass,
    })
    _say(args, f"verify-paper: {'ALL PASS' if all_pass else 'FAILURES'} in {dt:.1f}s")
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="machine-readable output only (compact JSON, no stderr chat)")
    common.add_argument("--backend", choices=["auto", "exact", "float"], default="auto",
                        help="matrix load backend; auto picks exact for integer files")

    p = argparse.ArgumentParser(prog="permlab",
                                description="permanents of PSD matrices: exact/float "
                                            "engines, inequality checks, lifts, search")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("per", parents=[common], help="permanent of a matrix file")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_per)

    q = sub.add_parser("fa", parents=[common],
                       help="Laplace expansion matrix (entry-wise minor permanents)")
    q.add_argument("--input", required=True)
    q.add_argument("--out", help="write the matrix here instead of inlining it")
    q.add_argument("--workers", type=int, default=None)
    q.set_defaults(func=cmd_fa)

    q = sub.add_parser("spectrum", parents=[common],
                       help="dominant eigenpair by power iteration")
    q.add_argument("--input", required=True)
    q.add_argument("--real-sym", action="store_true",
                   help="use the entry-wise real part")
    q.add_argument("--seed", type=int, default=START_SEED,
                   help="start-vector seed")
    q.set_defaults(func=cmd_spectrum)

    q = sub.add_parser("check", parents=[common], help="run an inequality check")
    q.add_argument("conjecture", choices=sorted(_CHECKERS))
    q.add_argument("--a", required=True)
    q.add_argument("--b")
    q.add_argument("--workers", type=int, default=None)
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("lift", parents=[common],
                       help="lift a spectral violation to a Hadamard-product one")
    q.add_argument("--a", required=True)
    q.add_argument("--mode", choices=["complex", "real"], default="complex")
    q.add_argument("--out")
    q.add_argument("--workers", type=int, default=None)
    q.set_defaults(func=cmd_lift)

    q = sub.add_parser("search", parents=[common],
                       help="seeded hill-climb over 2 x n integer instances")
    q.add_argument("--n", type=int, default=16)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--iters", type=int, default=100)
    q.add_argument("--restarts", type=int, default=1)
    q.add_argument("--bound", type=int, default=64)
    q.add_argument("--threshold", type=float, default=1.0)
    q.add_argument("--warm-start", help="2 x n exact matrix file to start from")
    q.add_argument("--out", required=True, help="append certificates here (JSON Lines)")
    q.add_argument("--workers", type=int, default=None)
    q.add_argument("--restart-workers", type=int, default=1)
    q.set_defaults(func=cmd_search)

    q = sub.add_parser("verify-paper", parents=[common],
                       help="recompute the bundled 16x16 counterexample end to end")
    q.add_argument("--workers", type=int, default=None)
    q.set_defaults(func=cmd_verify_paper, backend="exact")

    q = sub.add_parser("gen", parents=[common], help="generate test matrices")
    q.add_argument("--kind", choices=["psd", "rank1", "nonneg", "identity", "ones"],
                   required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--bound", type=int, default=9,
                   help="component bound for --integer output")
    q.add_argument("--integer", action="store_true")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_gen)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergenceError, NoViolatingEpsilonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
