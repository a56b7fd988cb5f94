"""Command-line front end: solve | check | bench | oracle.

Exit codes:
    0  tight solve (or: check passed, bench/oracle completed)
    1  solver failure (iteration cap, conditioning, certificate anomaly)
    2  certified-not-tight solve (valid outcome), or check did not confirm
    3  input error (parse error with line/column, bad shapes, missing file)
    4  problem unbounded below
    5  oracle asked beyond its dimension limit

All configuration is via flags; no environment variables are read.  Reports
are deterministic given (input file, seed, mode).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, core, oracle, pipeline, probfile, randgen, report
from .errors import (
    CqrError,
    InputError,
    NumericalError,
    OracleLimitError,
    ParseError,
    UnboundedBelowError,
)

__all__ = ["main"]

ORACLE_LIMIT = 50          # solve_1d is a desk-scale verification tool
_DUALITY_SAMPLES = 100
_DUALITY_SLACK = 1e-8


# ----------------------------------------------------------------- helpers

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_problem(path: str) -> tuple["core.CqrProblem", str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return probfile.loads(raw.decode("utf-8")), probfile.sha256_digest(raw)


def _read_point(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    vals: list[float] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for tok in line.split("#", 1)[0].split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(
                    f"expected a number in point file, got {tok!r}", lineno
                ) from None
    if not vals:
        raise InputError(f"point file {path} contains no values")
    return np.asarray(vals)


# ------------------------------------------------------------------- solve

def _local_descent(problem, s0, max_iters=500):
    """Plain gradient descent with backtracking; demonstration only.

    Deliberately certificate-free: it stalls in local minima/saddles exactly
    the way single-start local methods do, which is the point of showing it
    next to the certified answer.
    """
    s = np.asarray(s0, dtype=float).copy()
    val = core.evaluate(problem, s)
    for _ in range(max_iters):
        gr = core.gradient(problem, s)
        gn = float(np.linalg.norm(gr))
        if gn <= 1e-10 * (1.0 + abs(val)):
            break
        step = 1.0 / (1.0 + gn)
        for _bt in range(40):
            cand = s - step * gr
            cval = core.evaluate(problem, cand)
            if cval < val - 1e-4 * step * gn * gn:
                s, val = cand, cval
                break
            step *= 0.5
        else:
            break
    return s, val


def cmd_solve(args) -> int:
    problem, digest = _read_problem(args.problem)
    outcome = pipeline.solve(
        problem,
        tol_gap=args.tol_gap,
        tol_rank=args.tol_rank,
        mode=args.mode,
    )
    d = report.solve_report_dict(
        outcome, input_digest=digest, mode=args.mode, seed=args.seed
    )
    if args.format == "machine":
        text = report.machine_dumps(d)
    else:
        text = report.render_solve_text(d)
        if args.baseline:
            s0 = _read_point(args.baseline)
            if s0.shape != (problem.n,):
                raise InputError(
                    f"baseline point has {s0.shape[0]} entries, expected {problem.n}"
                )
            s_loc, v_loc = _local_descent(problem, s0)
            text += (
                "local descent (heuristic, no certificate):\n"
                f"  value           {v_loc:.15g}\n"
                f"  point           {report._fmt_point([float(x) for x in s_loc])}\n"
                f"  above certified {v_loc - d['gamma_star']:.6e}\n"
            )
    _emit(text, args.out)
    return 0 if d["tight"] else 2


# ------------------------------------------------------------------- check

def cmd_check(args) -> int:
    problem, digest = _read_problem(args.problem)
    point = _read_point(args.point)
    if point.shape != (problem.n,):
        raise InputError(
            f"point has {point.shape[0]} entries but the problem has n = {problem.n}"
        )
    ver = oracle.verify_global(problem, point)
    d = report.check_report_dict(
        ver, input_digest=digest, problem_id=problem.name, n=problem.n
    )
    text = (
        report.machine_dumps(d)
        if args.format == "machine"
        else report.render_check_text(d)
    )
    _emit(text, args.out)
    return 0 if ver.passed else 2


# ------------------------------------------------------------------ oracle

def cmd_oracle(args) -> int:
    problem, digest = _read_problem(args.problem)
    if problem.n > ORACLE_LIMIT:
        raise OracleLimitError(
            f"oracle supports n <= {ORACLE_LIMIT}, got n = {problem.n}"
        )
    res = oracle.solve_1d(problem)
    d = report.oracle_report_dict(
        res, input_digest=digest, problem_id=problem.name, n=problem.n
    )
    text = (
        report.machine_dumps(d)
        if args.format == "machine"
        else report.render_oracle_text(d)
    )
    _emit(text, args.out)
    return 0


# ------------------------------------------------------------------- bench

def _bench_instance(task: tuple) -> dict:
    """One bench solve; must stay a top-level function for worker pickling."""
    seed, n, beta, index, tol_gap, mode, oracle_limit = task
    problem = randgen.make_instance(seed, n, beta, index)
    row = {
        "n": n,
        "beta": beta,
        "index": index,
        "status": "fail",
        "gamma_star": None,
        "mu_ref": None,
        "err": None,
        "duality_ok": True,
        "wall_ms": 0.0,
        "message": "",
    }
    t0 = time.perf_counter()
    try:
        outcome = pipeline.solve(problem, tol_gap=tol_gap, mode=mode)
    except CqrError as exc:
        row["wall_ms"] = 1e3 * (time.perf_counter() - t0)
        row["message"] = f"{type(exc).__name__}: {exc}"
        return row
    row["wall_ms"] = 1e3 * (time.perf_counter() - t0)
    rep = outcome.report
    row["status"] = "tight" if rep.tight else "gap"
    row["gamma_star"] = float(rep.gamma_star)

    if n <= oracle_limit:
        ores = oracle.solve_1d(problem)
        row["mu_ref"] = float(ores.mu)
        row["duality_ok"] = rep.gamma_star <= ores.mu + _DUALITY_SLACK
        if rep.tight:
            row["err"] = abs(rep.gamma_star - ores.mu)
    else:
        rng = randgen.instance_rng(seed, n, beta, index, salt=1)
        spread = 1.0
        if rep.representative is not None:
            spread += float(np.linalg.norm(rep.representative))
        best = np.inf
        for _ in range(_DUALITY_SAMPLES):
            s = rng.standard_normal(n) * spread
            best = min(best, core.evaluate(problem, s))
        if rep.representative is not None:
            best = min(best, core.evaluate(problem, np.asarray(rep.representative)))
        row["mu_ref"] = float(best)
        row["duality_ok"] = rep.gamma_star <= best + _DUALITY_SLACK
        if rep.tight:
            row["err"] = float(rep.err_abs)
    return row


def cmd_bench(args) -> int:
    ns = _parse_int_list(args.n)
    betas = _parse_float_list(args.beta)
    if args.instances < 0:
        raise InputError("--instances must be >= 0")
    tasks = [
        (args.seed, n, beta, i, args.tol_gap, args.mode, args.oracle_limit)
        for n in ns
        for beta in betas
        for i in range(args.instances)
    ]
    if args.threads > 1 and tasks:
        # keep per-instance solves single-threaded in the workers; the env is
        # inherited at spawn so the children's numpy picks it up on import
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, "1")
        import multiprocessing as mp

        with ProcessPoolExecutor(
            max_workers=args.threads, mp_context=mp.get_context("spawn")
        ) as pool:
            results = list(pool.map(_bench_instance, tasks))
    else:
        results = [_bench_instance(t) for t in tasks]

    rows = []
    failures: list[str] = []
    if args.instances > 0:
        for n in ns:
            for beta in betas:
                cell = [r for r in results if r["n"] == n and r["beta"] == beta]
                errs = [r["err"] for r in cell if r["err"] is not None]
                for r in cell:
                    if r["status"] == "fail":
                        failures.append(
                            f"n={n} beta={beta:g} index={r['index']}: {r['message']}"
                        )
                rows.append(
                    {
                        "n": n,
                        "beta": beta,
                        "instances": len(cell),
                        "tight": sum(r["status"] == "tight" for r in cell),
                        "not_tight": sum(r["status"] == "gap" for r in cell),
                        "failures": sum(r["status"] == "fail" for r in cell),
                        "mean_ms": float(np.mean([r["wall_ms"] for r in cell])),
                        "max_err": max(errs) if errs else None,
                        "duality_ok": all(r["duality_ok"] for r in cell),
                    }
                )
    d = {
        "format": "cqrsdp-bench-report",
        "tool_version": __version__,
        "generator": randgen.GENERATOR_NAME,
        "seed": args.seed,
        "mode": args.mode,
        "tol_gap": args.tol_gap,
        "instances_per_cell": args.instances,
        "oracle_limit": args.oracle_limit,
        "rows": rows,
        "failed_instances": failures,
    }
    text = (
        report.machine_dumps(d)
        if args.format == "machine"
        else report.render_bench_text(d)
    )
    _emit(text, args.out)
    return 0


def _parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise InputError(f"dimensions must be positive integers, got {text!r}")
    return vals


def _parse_float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise InputError("at least one beta value is required")
    return vals


# -------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-gap", type=float, default=1e-9,
                        help="relative duality-gap tolerance (default 1e-9)")
    common.add_argument("--tol-rank", type=float, default=1e-7,
                        help="certificate rank threshold (default 1e-7)")
    common.add_argument("--mode", choices=("dense", "eigen"), default="dense",
                        help="interior-point kernel (eigen scales to large n)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for generated instances (recorded in reports)")
    common.add_argument("--out", metavar="PATH", default=None,
                        help="write the report to PATH instead of stdout")
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="report format (machine = canonical JSON)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for bench (solves stay single-threaded)")

    p = argparse.ArgumentParser(
        prog="cqrsdp",
        description="Certified global minimization of cubic-quartic regularized models.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", parents=[common],
                        help="solve a problem file, certify or refute tightness")
    ps.add_argument("problem", help="problem file (.cqr)")
    ps.add_argument("--baseline", metavar="POINT_FILE", default=None,
                    help="also run an uncertified local-descent baseline from this point")
    ps.set_defaults(func=cmd_solve)

    pc = sub.add_parser("check", parents=[common],
                        help="verify a candidate point against the closed-form optimality conditions")
    pc.add_argument("problem", help="problem file (.cqr)")
    pc.add_argument("point", help="whitespace-separated point file")
    pc.set_defaults(func=cmd_check)

    pb = sub.add_parser("bench", parents=[common],
                        help="seeded random-instance benchmark table")
    pb.add_argument("--n", default="10", help="comma-separated dimensions (default 10)")
    pb.add_argument("--beta", default="10,1,0,-1,-10,-100",
                    help="comma-separated cubic weights (default 10,1,0,-1,-10,-100)")
    pb.add_argument("--instances", type=int, default=5,
                    help="instances per (n, beta) cell (default 5)")
    pb.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT,
                    help=f"use the 1-D oracle up to this n (default {ORACLE_LIMIT})")
    pb.set_defaults(func=cmd_bench)

    po = sub.add_parser("oracle", parents=[common],
                        help="independent desk-scale ground-truth solve")
    po.add_argument("problem", help="problem file (.cqr)")
    po.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UnboundedBelowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OracleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except CqrError as exc:
        # solver-side failures: iteration caps, conditioning, rank anomalies,
        # certificate inconsistencies
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
