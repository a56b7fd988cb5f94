"""Report rendering: aligned text for humans, canonical JSON for machines.

The machine format is deliberately rigid so that reports are comparable and
round-trippable: fixed key order, floats always printed as 17-significant-
digit scientific notation (exact binary round trip with margin over the
required 15), containers serialized by a single canonical writer.  Parsing a
machine report with json.loads and re-serializing it with machine_dumps
reproduces the identical byte string.

Text reports show the same content with friendlier alignment; they are not
meant to be parsed.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import __version__
from .oracle import OracleResult, VerifyReport
from .pipeline import SolveOutcome

__all__ = [
    "machine_dumps",
    "solve_report_dict",
    "render_solve_text",
    "check_report_dict",
    "render_check_text",
    "oracle_report_dict",
    "render_oracle_text",
    "render_bench_text",
]


def _fmt_float(x: float) -> str:
    return f"{float(x):.16e}"


def machine_dumps(obj: Any) -> str:
    """Canonical serializer: insertion-ordered dicts, exact floats."""
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts) + "\n"


def _write(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_fmt_float(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(k)))
            parts.append(":")
            _write(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, v in enumerate(seq):
            if i:
                parts.append(",")
            _write(v, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _vec(v: np.ndarray | None) -> list[float] | None:
    return None if v is None else [float(x) for x in np.asarray(v)]


# ------------------------------------------------------------------- solve

def solve_report_dict(
    outcome: SolveOutcome,
    *,
    input_digest: str,
    mode: str,
    seed: int | None = None,
) -> dict:
    """The full solve outcome as an ordered plain dict (machine report)."""
    r = outcome.report
    ms = r.minimizers
    stats = outcome.solution.stats
    rep = outcome.representative_original
    particular = (
        None if ms.particular is None else outcome.to_original(ms.particular)
    )
    return {
        "format": "cqrsdp-solve-report",
        "tool_version": __version__,
        "input_digest": input_digest,
        "id": outcome.problem.name,
        "n": outcome.problem.n,
        "seed": seed,
        "tight": r.tight,
        "reason": r.reason,
        "rank_one": r.rank_one,
        "gamma_star": float(r.gamma_star),
        "theta_star": float(r.theta_star),
        "mu_upper": float(r.mu_upper),
        "err_abs": float(r.err_abs),
        "err_rel": None if r.err_rel is None else float(r.err_rel),
        "condition_value": (
            None if r.condition_value is None else float(r.condition_value)
        ),
        "z_star": None if ms.z_star is None else float(ms.z_star),
        "contains_zero": ms.contains_zero,
        "norm_free": ms.norm_free,
        "nullspace_dim": int(ms.nullity),
        "radius": None if ms.radius is None else float(ms.radius),
        "particular": _vec(particular),
        "representative": _vec(rep),
        "polished": outcome.polished,
        "diagnostics": list(r.diagnostics),
        "solver": {
            "iterations": int(stats.iterations),
            "rel_gap": float(stats.rel_gap),
            "primal_inf": float(stats.primal_inf),
            "dual_inf": float(stats.dual_inf),
            "wall_time": float(stats.wall_time),
            "mode": mode,
            "status": stats.status,
        },
    }


def _fmt_point(v: list[float] | None) -> str:
    if v is None:
        return "-"
    return "(" + ", ".join(f"{x:.12g}" for x in v) + ")"


def render_solve_text(d: dict) -> str:
    """Human-readable rendering of a solve report dict."""
    lines: list[str] = []
    name = d["id"] or "<unnamed>"
    lines.append(f"problem         {name}  (n = {d['n']})")
    lines.append(f"input digest    sha256:{d['input_digest']}")
    if d["seed"] is not None:
        lines.append(f"seed            {d['seed']}")
    verdict = "TIGHT (certified global optimum)" if d["tight"] else "NOT TIGHT (certified lower bound only)"
    lines.append(f"verdict         {verdict}")
    lines.append(f"reason          {d['reason']}")
    lines.append(f"gamma_star      {d['gamma_star']:.15g}")
    lines.append(f"theta_star      {d['theta_star']:.15g}")
    lines.append(f"mu_upper        {d['mu_upper']:.15g}")
    lines.append(f"err_abs         {d['err_abs']:.6e}")
    if d["err_rel"] is not None:
        lines.append(f"err_rel         {d['err_rel']:.6e}")
    if d["condition_value"] is not None:
        lines.append(f"condition value {d['condition_value']:.15g}")
    if d["tight"]:
        lines.append("minimizer set:")
        lines.append(f"  contains zero   {'yes' if d['contains_zero'] else 'no'}")
        if d["norm_free"]:
            lines.append("  norm-free affine family (no cubic/quartic term)")
        if d["z_star"] is not None:
            lines.append(f"  z_star          {d['z_star']:.15g}")
        lines.append(f"  nullspace dim   {d['nullspace_dim']}")
        if d["radius"] is not None:
            lines.append(f"  radius          {d['radius']:.15g}")
        if d["particular"] is not None:
            lines.append(f"  particular      {_fmt_point(d['particular'])}")
        if d["representative"] is not None:
            lines.append(f"  representative  {_fmt_point(d['representative'])}")
            lines.append(f"  polished        {'yes' if d['polished'] else 'no'}")
    s = d["solver"]
    lines.append(
        f"solver          {s['iterations']} iterations, rel gap {s['rel_gap']:.3e}, "
        f"infeas {s['primal_inf']:.3e}/{s['dual_inf']:.3e}"
    )
    lines.append(
        f"                {s['wall_time']:.3f} s, mode {s['mode']}, status {s['status']}"
    )
    for msg in d["diagnostics"]:
        lines.append(f"note            {msg}")
    lines.append(f"tool version    {d['tool_version']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- check

def check_report_dict(
    ver: VerifyReport,
    *,
    input_digest: str,
    problem_id: str,
    n: int,
) -> dict:
    return {
        "format": "cqrsdp-check-report",
        "tool_version": __version__,
        "input_digest": input_digest,
        "id": problem_id,
        "n": n,
        "point_norm": float(ver.norm),
        "stationarity_residual": float(ver.stationarity_residual),
        "stationarity_bound": float(ver.stationarity_bound),
        "stationary": ver.stationary,
        "min_eig_b": float(ver.min_eig_b),
        "psd_ok": ver.psd_ok,
        "condition_value": float(ver.condition_value),
        "condition_applicable": ver.condition_applicable,
        "condition_ok": ver.condition_ok,
        "b_positive_definite": ver.b_positive_definite,
        "uniqueness_clause": ver.uniqueness_clause,
        "passed": ver.passed,
    }


def render_check_text(d: dict) -> str:
    def mark(ok: bool) -> str:
        return "pass" if ok else "FAIL"

    lines = [
        f"problem         {d['id'] or '<unnamed>'}  (n = {d['n']})",
        f"input digest    sha256:{d['input_digest']}",
        f"point norm      {d['point_norm']:.15g}",
        f"(1) stationarity   {mark(d['stationary'])}   residual {d['stationarity_residual']:.6e} (bound {d['stationarity_bound']:.6e})",
        f"(2) curvature      {mark(d['psd_ok'])}   min eig B = {d['min_eig_b']:.6e}",
    ]
    if d["condition_applicable"]:
        lines.append(
            f"(3) norm condition {mark(d['condition_ok'])}   beta + 3 sigma ||s|| = {d['condition_value']:.6e}"
        )
    else:
        lines.append("(3) norm condition not applicable at ||s|| = 0")
    unique = "yes" if d["uniqueness_clause"] else "not established"
    lines.append(f"uniqueness clause  {unique}")
    lines.append(f"overall            {'PASSED' if d['passed'] else 'NOT CONFIRMED'}")
    lines.append(f"tool version       {d['tool_version']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ oracle

def oracle_report_dict(
    res: OracleResult,
    *,
    input_digest: str,
    problem_id: str,
    n: int,
) -> dict:
    return {
        "format": "cqrsdp-oracle-report",
        "tool_version": __version__,
        "input_digest": input_digest,
        "id": problem_id,
        "n": n,
        "mu_star": float(res.mu),
        "r_star": [float(r) for r in res.radii],
        "minimizers": [_vec(s) for s in res.minimizers],
        "hard_case": [bool(h) for h in res.hard_case],
        "method": res.method,
    }


def render_oracle_text(d: dict) -> str:
    lines = [
        f"problem         {d['id'] or '<unnamed>'}  (n = {d['n']})",
        f"input digest    sha256:{d['input_digest']}",
        f"mu_star         {d['mu_star']:.15g}",
        f"r_star          {', '.join(f'{r:.15g}' for r in d['r_star'])}",
        f"method          {d['method']}",
    ]
    for i, (s, h) in enumerate(zip(d["minimizers"], d["hard_case"])):
        tag = "  (hard case: one point of a degenerate family)" if h else ""
        lines.append(f"minimizer [{i}]   {_fmt_point(s)}{tag}")
    lines.append(f"tool version    {d['tool_version']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- bench

_BENCH_COLUMNS = (
    ("n", 5),
    ("beta", 9),
    ("inst", 5),
    ("tight", 6),
    ("gap", 4),
    ("fail", 5),
    ("mean_ms", 9),
    ("max_err", 11),
    ("duality", 8),
)


def render_bench_text(d: dict) -> str:
    """Aligned table over the per-(n, beta) cells of a bench report dict."""
    lines = [
        f"generator {d['generator']}   seed {d['seed']}   mode {d['mode']}"
    ]
    header = "  ".join(name.rjust(width) for name, width in _BENCH_COLUMNS)
    lines.append(header)
    lines.append("-" * len(header))
    for row in d["rows"]:
        err = "-" if row["max_err"] is None else f"{row['max_err']:.3e}"
        cells = (
            str(row["n"]),
            f"{row['beta']:g}",
            str(row["instances"]),
            str(row["tight"]),
            str(row["not_tight"]),
            str(row["failures"]),
            f"{row['mean_ms']:.2f}",
            err,
            "ok" if row["duality_ok"] else "VIOL",
        )
        lines.append(
            "  ".join(c.rjust(w) for c, (_, w) in zip(cells, _BENCH_COLUMNS))
        )
    lines.append(f"tool version {d['tool_version']}")
    return "\n".join(lines) + "\n"
