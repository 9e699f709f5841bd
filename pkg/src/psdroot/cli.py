"""Command-line front end.

Four subcommands:

- ``gen``: write a gallery matrix to a Matrix Market file
- ``solve``: run one solver on a matrix (spec string or file), print a summary
- ``bench``: run a suite of (matrix, method) pairs, write CSV or JSON rows
- ``report``: summarize a bench CSV and flag expected-ordering violations

Exit codes: 0 success, 1 usage/input error, 2 non-convergence (``solve``).
``PSDROOT_THREADS`` caps bench concurrency (default 1: sequential runs give
the cleanest timings; raise it to overlap independent runs).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ConvergenceFailureError,
    DivergenceError,
    DomainError,
    IndefiniteInputError,
    MatrixMarketError,
    NotPositiveDefiniteError,
    ParseError,
    SchemaError,
    SingularIterateError,
)
from .gallery import build_matrix, condition_report, parse_spec
from .matcore import SymMatrix, read_matrix_market, sqrt_eig, write_matrix_market
from .solvers import (
    SolverConfig,
    SolverResult,
    binomial,
    gradient_descent,
    lsgd,
    polar_newton,
    yamsr,
)

_INPUT_ERRORS = (
    ParseError,
    MatrixMarketError,
    DomainError,
    NotPositiveDefiniteError,
    IndefiniteInputError,
    OSError,
    ValueError,
)

_SOLVERS = {
    "yamsr": yamsr,
    "gd": gradient_descent,
    "lsgd": lsgd,
    "pn": polar_newton,
    "binomial": binomial,
}

CSV_COLUMNS = [
    "suite",
    "matrix",
    "n",
    "kappa",
    "method",
    "converged",
    "iterations",
    "final_residual",
    "seconds",
]

TRACE_COLUMNS = ["k", "seconds", "rel_residual", "delta_T", "objective"]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail(stage: str, exc: Exception) -> int:
    print(f"error in {stage}: {exc}", file=sys.stderr)
    return 1


def _parse_scale(text: str) -> Union[str, float]:
    if text in ("none", "auto"):
        return text
    try:
        return float(text)
    except ValueError:
        raise DomainError(
            f"--scale must be 'auto', 'none', or a positive float, got {text!r}"
        ) from None


def _load_matrix(args) -> Tuple[str, SymMatrix]:
    """Matrix from --matrix spec string or --in file; returns (label, matrix)."""
    if getattr(args, "matrix", None):
        return args.matrix, build_matrix(parse_spec(args.matrix))
    return args.infile, read_matrix_market(args.infile)


def _run_method(method: str, matrix: SymMatrix, cfg: SolverConfig,
                oracle: Optional[SymMatrix] = None) -> SolverResult:
    if method == "eig":
        root = sqrt_eig(matrix)
        resid = float(
            np.linalg.norm(root.array @ root.array - matrix.array)
        ) / max(float(np.linalg.norm(matrix.array)), 1e-300)
        return SolverResult(
            root=root, iterations=0, converged=True,
            final_residual=resid, trace=[],
        )
    return _SOLVERS[method](matrix, cfg, oracle=oracle)


def _write_trace(path: str, result: SolverResult) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for t in result.trace:
            w.writerow([
                t.k,
                "%.6f" % t.elapsed_seconds,
                "%.10e" % t.rel_residual,
                "%.10e" % t.delta_T,
                "%.10e" % t.objective,
            ])


def _kappa_field(matrix: SymMatrix) -> str:
    """kappa formatted for output, with a ``*`` marker when the eig oracle is
    saturated and the value is indicative only."""
    rep = condition_report(matrix)
    text = "%.6e" % rep.kappa
    return text + "*" if rep.saturated else text


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        spec = parse_spec(args.matrix)
        matrix = build_matrix(spec)
    except _INPUT_ERRORS as exc:
        return _fail("matrix generation", exc)
    try:
        write_matrix_market(args.out, matrix)
    except OSError as exc:
        return _fail("writing output file", exc)
    return 0


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    try:
        label, matrix = _load_matrix(args)
        scale = _parse_scale(args.scale)
        cfg = SolverConfig(
            tol=args.tol,
            max_iter=args.max_iter,
            scale_mode=scale,
            gd_step=args.step,
            record_trace=bool(args.trace),
        )
    except _INPUT_ERRORS as exc:
        return _fail("reading input", exc)

    oracle: Optional[SymMatrix] = None
    if args.trace and args.method != "eig":
        try:
            oracle = sqrt_eig(matrix)
        except (IndefiniteInputError, ConvergenceFailureError):
            oracle = None  # trace falls back to NaN distances

    t0 = time.perf_counter()
    try:
        result = _run_method(args.method, matrix, cfg, oracle=oracle)
    except _INPUT_ERRORS as exc:
        return _fail(f"method {args.method}", exc)
    except (DivergenceError, SingularIterateError, ConvergenceFailureError) as exc:
        print(f"method {args.method} failed to converge: {exc}", file=sys.stderr)
        return 2
    seconds = time.perf_counter() - t0

    print(
        f"method={args.method} n={matrix.n} kappa={_kappa_field(matrix)} "
        f"converged={'true' if result.converged else 'false'} "
        f"iters={result.iterations} resid={result.final_residual:.6e} "
        f"seconds={seconds:.6f}"
    )
    try:
        if args.trace:
            _write_trace(args.trace, result)
        if args.out:
            write_matrix_market(args.out, result.root)
    except OSError as exc:
        return _fail("writing output file", exc)
    if not result.converged:
        print(f"method {args.method} did not converge "
              f"(resid {result.final_residual:.3e} after {result.iterations} "
              f"iterations)", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


@dataclass
class BenchRun:
    """One (matrix, method) cell of a suite, plus its outcome."""

    suite: str
    matrix: str
    method: str
    cfg: SolverConfig
    converged: bool = False
    iterations: int = 0
    final_residual: float = math.nan
    seconds: float = 0.0
    error: Optional[str] = None
    result: Optional[SolverResult] = None


def _builtin_suites() -> Dict[str, dict]:
    """Built-in suite definitions (same schema a suite JSON file uses)."""
    return {
        # Desk-scale version of the benchmark comparison: small enough for
        # CI, large enough that the method ordering is visible.
        "paper-desk": {
            "defaults": {"tol": 1e-8, "max_iter": 25000, "scale": "auto"},
            "runs": [
                {"matrix": "spiked:50:5:63:21",
                 "methods": ["yamsr", "gd", "lsgd", "pn"]},
                {"matrix": "hilb:50", "methods": ["yamsr", "lsgd", "pn"]},
                {"matrix": "randcorr:100:2", "methods": ["yamsr", "lsgd", "pn"]},
                {"matrix": "lowrank:100:10:7", "methods": ["yamsr", "lsgd", "pn"]},
            ],
        },
        # Full-scale benchmark. Slow: the n=500 gradient runs alone can take
        # tens of minutes at this tolerance.
        "paper": {
            "defaults": {"tol": 1e-12, "max_iter": 5000, "scale": "auto"},
            "runs": [
                {"matrix": "spiked:50:5:63:21",
                 "methods": ["yamsr", "gd", "lsgd", "pn"]},
                {"matrix": "hilb:50", "methods": ["yamsr", "lsgd", "pn"]},
                {"matrix": "invhilb:100", "methods": ["yamsr", "lsgd", "pn"]},
                {"matrix": "randcorr:500:2", "methods": ["yamsr", "lsgd", "pn"]},
                {"matrix": "lowrank:500:50:7", "methods": ["yamsr", "lsgd", "pn"]},
            ],
        },
    }


def _load_suite(name_or_path: str) -> Tuple[str, dict]:
    builtins = _builtin_suites()
    if name_or_path in builtins:
        return name_or_path, builtins[name_or_path]
    if not os.path.exists(name_or_path):
        raise DomainError(
            f"unknown suite {name_or_path!r}: not a built-in "
            f"({', '.join(sorted(builtins))}) and not a file"
        )
    with open(name_or_path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"suite file {name_or_path!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or "runs" not in data:
        raise SchemaError(f"suite file {name_or_path!r} must be an object with a 'runs' list")
    name = data.get("name") or os.path.splitext(os.path.basename(name_or_path))[0]
    return name, data


def _suite_jobs(name: str, suite: dict) -> List[BenchRun]:
    defaults = suite.get("defaults", {})
    jobs: List[BenchRun] = []
    for run in suite["runs"]:
        spec_string = run["matrix"]
        parse_spec(spec_string)  # validate early; ParseError names the token
        merged = dict(defaults)
        merged.update({k: v for k, v in run.items() if k not in ("matrix", "methods")})
        cfg = SolverConfig(
            tol=float(merged.get("tol", 1e-12)),
            max_iter=int(merged.get("max_iter", 1000)),
            scale_mode=_parse_scale(str(merged.get("scale", "none"))),
            gd_step=merged.get("step"),
        )
        methods = run.get("methods", ["yamsr"])
        for method in methods:
            if method != "eig" and method not in _SOLVERS:
                raise DomainError(f"unknown method {method!r} in suite {name!r}")
            jobs.append(BenchRun(suite=name, matrix=spec_string, method=method, cfg=cfg))
    return jobs


def _execute_job(job: BenchRun, matrix: SymMatrix, oracle: Optional[SymMatrix]) -> None:
    t0 = time.perf_counter()
    try:
        result = _run_method(job.method, matrix, job.cfg, oracle=oracle)
        job.converged = result.converged
        job.iterations = result.iterations
        job.final_residual = result.final_residual
        job.result = result
    except (_INPUT_ERRORS + (DivergenceError, SingularIterateError,
                             ConvergenceFailureError)) as exc:
        job.converged = False
        job.error = f"{type(exc).__name__}: {exc}"
    job.seconds = time.perf_counter() - t0


def _trace_filename(job: BenchRun) -> str:
    return f"{job.matrix.replace(':', '-')}__{job.method}.csv"


def cmd_bench(args) -> int:
    try:
        name, suite = _load_suite(args.suite)
        jobs = _suite_jobs(name, suite)
    except (SchemaError, DomainError, ParseError, OSError) as exc:
        return _fail("loading suite", exc)

    want_traces = bool(args.traces)
    if want_traces:
        os.makedirs(args.traces, exist_ok=True)
        for job in jobs:
            job.cfg = SolverConfig(
                tol=job.cfg.tol, max_iter=job.cfg.max_iter,
                scale_mode=job.cfg.scale_mode, gd_step=job.cfg.gd_step,
                record_trace=True,
            )

    # build each distinct matrix once, up front
    matrices: Dict[str, SymMatrix] = {}
    kappas: Dict[str, str] = {}
    oracles: Dict[str, Optional[SymMatrix]] = {}
    try:
        for job in jobs:
            if job.matrix not in matrices:
                m = build_matrix(parse_spec(job.matrix))
                matrices[job.matrix] = m
                kappas[job.matrix] = _kappa_field(m)
                if want_traces:
                    try:
                        oracles[job.matrix] = sqrt_eig(m)
                    except (IndefiniteInputError, ConvergenceFailureError):
                        oracles[job.matrix] = None
                else:
                    oracles[job.matrix] = None
    except _INPUT_ERRORS as exc:
        return _fail("building suite matrices", exc)

    workers = 1
    env = os.environ.get("PSDROOT_THREADS")
    if env:
        try:
            workers = max(1, int(env))
        except ValueError:
            return _fail("reading PSDROOT_THREADS", ValueError(f"not an int: {env!r}"))

    if workers == 1:
        for job in jobs:
            _execute_job(job, matrices[job.matrix], oracles[job.matrix])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_execute_job, job, matrices[job.matrix], oracles[job.matrix])
                for job in jobs
            ]
            for fut in futures:
                fut.result()

    rows = []
    for job in jobs:
        rows.append({
            "suite": job.suite,
            "matrix": job.matrix,
            "n": matrices[job.matrix].n,
            "kappa": kappas[job.matrix],
            "method": job.method,
            "converged": "true" if job.converged else "false",
            "iterations": job.iterations,
            "final_residual": "%.6e" % job.final_residual,
            "seconds": "%.6f" % job.seconds,
        })

    try:
        if args.json:
            payload = []
            for job, row in zip(jobs, rows):
                rec = dict(row)
                rec["n"] = int(rec["n"])
                rec["converged"] = job.converged
                rec["iterations"] = job.iterations
                rec["final_residual"] = (
                    None if math.isnan(job.final_residual) else job.final_residual
                )
                rec["seconds"] = job.seconds
                if job.error:
                    rec["error"] = job.error
                payload.append(rec)
            with open(args.out, "w", encoding="ascii") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
        else:
            with open(args.out, "w", newline="", encoding="ascii") as fh:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
                w.writeheader()
                for row in rows:
                    w.writerow(row)
        if want_traces:
            for job in jobs:
                if job.result is not None and job.result.trace:
                    _write_trace(os.path.join(args.traces, _trace_filename(job)),
                                 job.result)
    except OSError as exc:
        return _fail("writing results", exc)
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

# expected time-to-tolerance ordering, fastest first
_EXPECTED_ORDER = ["pn", "yamsr", "lsgd", "gd"]


def _read_results(path: str) -> List[dict]:
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("results file is empty (no header)") from None
        if header != CSV_COLUMNS:
            for want, got in zip(CSV_COLUMNS, header + [""] * len(CSV_COLUMNS)):
                if want != got:
                    raise SchemaError(
                        f"bad column: expected {want!r}, found {got!r}"
                    )
            raise SchemaError(f"unexpected extra columns: {header[len(CSV_COLUMNS):]}")
        rows = []
        for line in reader:
            if not line:
                continue
            if len(line) != len(CSV_COLUMNS):
                raise SchemaError(f"row has {len(line)} fields, expected {len(CSV_COLUMNS)}")
            rows.append(dict(zip(CSV_COLUMNS, line)))
    return rows


def cmd_report(args) -> int:
    try:
        rows = _read_results(args.infile)
    except (SchemaError, OSError) as exc:
        return _fail("reading results CSV", exc)

    if not rows:
        print("no runs in results file")
        return 0

    # group by (suite, matrix) in file order
    groups: Dict[Tuple[str, str], List[dict]] = {}
    order: List[Tuple[str, str]] = []
    for row in rows:
        key = (row["suite"], row["matrix"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    suites = sorted({k[0] for k in order})
    print(f"report: {len(rows)} runs, {len(order)} matrices, "
          f"suite{'s' if len(suites) != 1 else ''} {', '.join(suites)}")
    violations = []
    for key in order:
        suite, matrix = key
        group = groups[key]
        n = group[0]["n"]
        kappa = group[0]["kappa"]
        print(f"\n{matrix}  (suite={suite} n={n} kappa={kappa})")
        converged = [r for r in group if r["converged"] == "true"]
        failed = [r for r in group if r["converged"] != "true"]
        by_time = sorted(converged, key=lambda r: float(r["seconds"]))
        if by_time:
            ranking = " | ".join(
                f"{r['method']} {float(r['seconds']):.3f}s" for r in by_time
            )
            print(f"  time-to-tolerance: {ranking}")
            best = min(converged, key=lambda r: float(r["final_residual"]))
            print(f"  best residual: {best['method']} {best['final_residual']}")
        if failed:
            print("  not converged: " + ", ".join(
                f"{r['method']} (resid {r['final_residual']} after "
                f"{r['iterations']} iters)" for r in failed
            ))
        # ordering check among converged methods with an expected position
        seen = {r["method"]: float(r["seconds"]) for r in converged}
        expected = [m for m in _EXPECTED_ORDER if m in seen]
        for earlier, later in zip(expected, expected[1:]):
            if seen[earlier] > seen[later]:
                violations.append(
                    f"{matrix}: {earlier} ({seen[earlier]:.3f}s) slower "
                    f"than {later} ({seen[later]:.3f}s)"
                )

    print()
    if violations:
        print("expected time ordering pn <= yamsr <= lsgd <= gd violated on:")
        for v in violations:
            print(f"  {v}")
    else:
        print("expected time ordering pn <= yamsr <= lsgd <= gd: no violations")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="psdroot", description="Dense SPD matrix square-root toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a gallery matrix to a Matrix Market file")
    g.add_argument("--matrix", required=True, metavar="SPEC",
                   help="matrix spec, e.g. hilb:12 or spiked:50:5:63:42")
    g.add_argument("--out", required=True, help="output .mtx path")

    s = sub.add_parser("solve", help="run one solver and print a summary line")
    s.add_argument("--method", required=True,
                   choices=["yamsr", "gd", "lsgd", "pn", "binomial", "eig"])
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="SPEC", help="matrix spec string")
    src.add_argument("--in", dest="infile", metavar="PATH",
                     help="read the matrix from a Matrix Market file")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--scale", default="none", metavar="auto|none|FLOAT",
                   help="scaling for the fixed-point solver (default none)")
    s.add_argument("--step", type=float, default=None,
                   help="fixed step for gd (default 1/(8||A||^2))")
    s.add_argument("--trace", metavar="PATH",
                   help="write a per-iteration CSV trace")
    s.add_argument("--out", metavar="PATH",
                   help="write the computed root in Matrix Market format")

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True,
                   help="built-in suite name (paper, paper-desk) or a JSON file")
    b.add_argument("--out", required=True, help="results path (CSV, or JSON with --json)")
    b.add_argument("--json", action="store_true",
                   help="write results as a JSON array instead of CSV")
    b.add_argument("--traces", metavar="DIR",
                   help="also write per-run iteration traces into DIR")

    r = sub.add_parser("report", help="summarize a bench results CSV")
    r.add_argument("--in", dest="infile", required=True, help="results CSV path")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "gen": cmd_gen,
        "solve": cmd_solve,
        "bench": cmd_bench,
        "report": cmd_report,
    }[args.command]
    return handler(args)


def run() -> None:
    sys.exit(main())
