"""End-to-end solve: gate, relax, certify, polish, refine.

Order of operations:

1. coercivity gate -- unbounded-below inputs are rejected up front;
2. weight transform -- problems with a weight matrix are rewritten in
   coordinates where the weighted norm is Euclidean (everything downstream
   then lives in those coordinates; minimizer points map back through the
   returned transform, while norms, radii and condition values are already
   the weighted ones and need no mapping);
3. interior-point solve of the relaxation;
4. certificate factorization and minimizer extraction (``extract.certify``);
5. Newton polish of the extracted representative, verified against the
   closed-form global-optimality conditions;
6. value refinement: when the verdict is tight, the polished point passes the
   stationarity and curvature checks, and the norm condition holds at its
   norm, the polished point is a certified global minimizer and the
   relaxation value equals the model value there -- so gamma_star is replaced
   by that (far more accurate) number.  mu_upper keeps the *unpolished*
   extracted representative's value, so err_abs continues to measure what
   extraction alone achieved rather than congratulating the polish.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import core, extract
from .core import CqrProblem
from .errors import (
    IllConditionedError,
    MaxIterationsError,
    UnboundedBelowError,
)
from .extract import Certificate, TightnessReport
from .oracle import VerifyReport, verify_global
from .sdp import solve_sdp
from .sdp.ipm import SdpSolution

__all__ = ["SolveOutcome", "solve", "polish_newton"]


@dataclass(frozen=True)
class SolveOutcome:
    """Everything the front end needs from one solve.

    `report` (and the certificate, solution blocks, and minimizer set inside
    it) lives in the weight-normalized coordinates; `transform` maps points
    back to the caller's coordinates (identity when no weight was given).
    Norms and condition values are weighted quantities and are identical in
    both views.
    """

    problem: CqrProblem
    solution: SdpSolution
    certificate: Certificate
    report: TightnessReport
    verification: VerifyReport | None
    polished: bool
    transform: np.ndarray

    def to_original(self, point: np.ndarray) -> np.ndarray:
        """Map a point from solve coordinates back to input coordinates."""
        return self.transform @ np.asarray(point, dtype=float)

    @property
    def representative_original(self) -> np.ndarray | None:
        rep = self.report.representative
        return None if rep is None else self.to_original(rep)


def polish_newton(
    problem: CqrProblem,
    s0: np.ndarray,
    max_steps: int = 25,
    grad_tol: float = 1e-13,
) -> np.ndarray:
    """Damped Newton descent on the model from s0; returns the best point.

    The Hessian is shifted just enough to factor when it is indefinite, and
    each step is backtracked until the model value decreases.  Intended for
    points already close to a minimizer (extraction output), where this
    converges in a handful of steps; it never moves to a worse point.
    """
    s = np.asarray(s0, dtype=float).copy()
    gscale = 1.0 + float(np.linalg.norm(problem.g))
    best_s, best_val = s.copy(), core.evaluate(problem, s)
    for _ in range(max_steps):
        gr = core.gradient(problem, s)
        if float(np.linalg.norm(gr)) <= grad_tol * gscale:
            break
        if problem.beta != 0.0 and float(np.linalg.norm(s)) < 1e-14:
            break  # second derivative undefined at the origin
        he = core.hessian(problem, s)
        shift = 0.0
        base = 1e-12 * (1.0 + float(np.abs(np.diag(he)).max(initial=0.0)))
        eye = np.eye(problem.n)
        for _attempt in range(60):
            try:
                ch = np.linalg.cholesky(he + shift * eye)
                break
            except np.linalg.LinAlgError:
                shift = base if shift == 0.0 else 10.0 * shift
        else:  # pragma: no cover - 10^60 x shift always factors
            break
        d = np.linalg.solve(ch.T, np.linalg.solve(ch, -gr))
        step, improved = 1.0, False
        for _bt in range(30):
            cand = s + step * d
            val = core.evaluate(problem, cand)
            if val < best_val:
                s, best_s, best_val, improved = cand, cand.copy(), val, True
                break
            step *= 0.5
        if not improved:
            break
    return best_s


def _salvageable(sol: SdpSolution | None, tol_gap: float, tol_feas: float) -> bool:
    """Whether an early-stopped iterate is still good enough to extract from.

    The extraction tolerances sit around 1e-6..1e-5, so an iterate within a
    few orders of the requested solver tolerance still supports a verdict;
    anything worse must surface as a failure.
    """
    if sol is None:
        return False
    st = sol.stats
    return (
        st.rel_gap <= max(1e4 * tol_gap, 1e-6)
        and st.primal_inf <= max(1e4 * tol_feas, 1e-6)
        and st.dual_inf <= max(1e4 * tol_feas, 1e-6)
    )


def solve(
    problem: CqrProblem,
    *,
    tol_gap: float = 1e-9,
    tol_feas: float = 1e-9,
    tol_rank: float = 1e-7,
    tol_root: float = 1e-6,
    mode: str = "dense",
    max_iters: int = 200,
    polish: bool = True,
) -> SolveOutcome:
    """Solve the model globally and certify or refute tightness.

    Raises UnboundedBelowError when the model has no finite infimum, and
    re-raises solver failures (max iterations / ill-conditioning) unless the
    best iterate is close enough to the requested tolerance to certify from,
    in which case the outcome carries a diagnostic and the solver's honest
    status instead.
    """
    if not core.bounded_below(problem):
        raise UnboundedBelowError(
            "model is unbounded below (sigma = 0 and the remaining terms "
            "do not control the decrease)"
        )
    plain, tmap = core.apply_w_transform(problem)
    diags: list[str] = []
    try:
        sol = solve_sdp(
            plain,
            tol_gap=tol_gap,
            tol_feas=tol_feas,
            max_iters=max_iters,
            mode=mode,
        )
    except (MaxIterationsError, IllConditionedError) as err:
        if not _salvageable(err.result, tol_gap, tol_feas):
            raise
        sol = err.result
        diags.append(
            f"solver stopped early (status {sol.stats.status!r}, relative gap "
            f"{sol.stats.rel_gap:.3e}); certifying from the best iterate"
        )

    cert, report = extract.certify(
        plain, sol, tol_rank=tol_rank, tol_root=tol_root
    )

    verification: VerifyReport | None = None
    polished = False
    rep = report.representative
    if rep is not None:
        rep_p = rep
        if polish and (problem.beta == 0.0 or float(np.linalg.norm(rep)) > 1e-12):
            rep_p = polish_newton(plain, rep)
        verification = verify_global(plain, rep_p)
        z_pol = float(np.linalg.norm(rep_p))
        cond_ok = core.condition_holds(
            plain, z_pol, tol=1e-9 * (1.0 + abs(plain.beta) + 3.0 * plain.sigma * z_pol)
        )
        if (
            report.tight
            and verification.stationary
            and verification.psd_ok
            and cond_ok
        ):
            # rep_p passes the closed-form global-optimality checks, so the
            # model value there *is* the global minimum and (condition held)
            # the relaxation attains it: replace the solver's gamma by it.
            gamma_ref = core.evaluate(plain, rep_p)
            err_abs = abs(report.mu_upper - gamma_ref)
            err_rel = None if report.mu_upper == 0.0 else err_abs / abs(report.mu_upper)
            report = dataclasses.replace(
                report,
                gamma_star=gamma_ref,
                err_abs=err_abs,
                err_rel=err_rel,
                condition_value=z_pol * core.condition_value(plain, z_pol),
                representative=rep_p,
                diagnostics=tuple(list(report.diagnostics) + diags),
            )
            polished = True
        elif polish:
            diags.append(
                "polish did not confirm global optimality at the extracted "
                f"point (stationarity residual {verification.stationarity_residual:.3e}, "
                f"min curvature eig {verification.min_eig_b:.3e}); "
                "keeping raw solver values"
            )
            report = dataclasses.replace(
                report, diagnostics=tuple(list(report.diagnostics) + diags)
            )
    elif diags:
        report = dataclasses.replace(
            report, diagnostics=tuple(list(report.diagnostics) + diags)
        )

    return SolveOutcome(
        problem=problem,
        solution=sol,
        certificate=cert,
        report=report,
        verification=verification,
        polished=polished,
        transform=tmap,
    )
