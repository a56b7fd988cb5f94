"""Primal-dual interior-point method specialized to the five-block relaxation.

A standard infeasible-start HKM predictor-corrector, but with the linear
algebra specialized to this problem's shape: the constraint functionals touch
only (Y_00, tr Y_tail) and the two tiny norm-moment blocks, so the Schur
complement is a fixed 7x7 matrix whose assembly costs O(n^2) given S^{-1}.

Two kernels drive the big block:

* dense  -- general GEMM/Cholesky on the (n+1)-block, O(n^3) per iteration.
* eigen  -- the problem is first rotated by H's eigenbasis, which makes the
            big cost block an arrowhead (diagonal plus first row/column).
            The dual slack block then *stays* an arrowhead for the whole run
            (constraint adjoints only add diagonals), its inverse is an
            explicit diagonal-plus-rank-one, and every product with it costs
            O(n^2).  The one remaining O(n^3) step per iteration is the
            primal step-to-boundary factorization.

Both modes solve the same problem to the same tolerances; agreement of their
optimal values is one of the package's standing properties.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..core import CqrProblem
from ..errors import IllConditionedError, MaxIterationsError
from .data import (
    Blocks,
    a_adjoint,
    a_apply,
    assemble,
    bdot,
    blincomb,
    bnorm,
)

__all__ = ["SolveStats", "SdpSolution", "solve_sdp"]

_STEP_FRACTION = 0.98
_STALL_LIMIT = 3
_NBHD_GAMMA = 1e-3        # centrality floor: lambda_min >= gamma * mu / ||other||
_NO_PROGRESS_WINDOW = 20  # stop when the best iterate stops improving


@dataclass
class SolveStats:
    iterations: int
    rel_gap: float
    primal_inf: float
    dual_inf: float
    mu: float
    wall_time: float
    mode: str
    dropped_constraint: int
    status: str = "optimal"
    best_iteration: int = 0


@dataclass
class SdpSolution:
    gamma: float
    theta: float
    x: Blocks          # optimal moment blocks (original coordinates)
    s: Blocks          # optimal dual slacks = the optimality certificate
    y: np.ndarray      # all 8 multipliers (dropped index carried as 0)
    stats: SolveStats


# ---------------------------------------------------------------- step sizes

def _maxstep_dense(m: np.ndarray, d: np.ndarray, chol: np.ndarray | None = None) -> float:
    """sup { t >= 0 : m + t d PSD } for PD m, via eigenvalues of L^-1 d L^-T."""
    if chol is None:
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            return 0.0
    a = scipy.linalg.solve_triangular(chol, d, lower=True, check_finite=False)
    a = scipy.linalg.solve_triangular(chol, a.T, lower=True, check_finite=False)
    w = float(np.linalg.eigvalsh(0.5 * (a + a.T))[0])
    if w >= -1e-18:
        return np.inf
    return 1.0 / (-w)


def _maxstep_arrow(a, w, d, da, dw, dd) -> float:
    """Step to the PSD boundary for an arrowhead pair, in O(n) per probe.

    det(S + tD) = prod(d + t dd) * schur(t) and each rational term of
    schur(t) = (a + t da) - sum (w + t dw)^2/(d + t dd) is convex where the
    tail stays positive, so schur is concave there: its positive region is an
    interval and bisection on the first root is safe.
    """
    neg = dd < 0
    t_tail = float(np.min(d[neg] / -dd[neg])) if np.any(neg) else np.inf
    hi = min(t_tail * (1.0 - 1e-12), 1e16)

    def schur(t: float) -> float:
        dt = d + t * dd
        wt = w + t * dw
        return (a + t * da) - float(np.sum(wt * wt / dt))

    if hi <= 0.0:
        return 0.0
    if schur(hi) > 0.0:
        return t_tail
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if schur(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * (1.0 + hi):
            break
    return lo


# ------------------------------------------------------------------- kernels

class _DenseKernel:
    """GEMM-based operations on the big block."""

    mode = "dense"

    def factor(self, sy: np.ndarray) -> bool:
        try:
            self._chol = np.linalg.cholesky(sy)
        except np.linalg.LinAlgError:
            return False
        self._inv = scipy.linalg.cho_solve(
            (self._chol, True), np.eye(sy.shape[0]), check_finite=False
        )
        return True

    def sinv_dense(self) -> np.ndarray:
        return self._inv

    def xu(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return x @ u

    def mul_sinv(self, m: np.ndarray) -> np.ndarray:
        return m @ self._inv

    def maxstep_s(self, sy: np.ndarray, dy: np.ndarray) -> float:
        return _maxstep_dense(sy, dy, chol=self._chol)


class _ArrowKernel:
    """Arrowhead operations; valid only when the dual block is an arrowhead,
    which the eigen-rotated problem guarantees throughout the iteration."""

    mode = "eigen"

    def factor(self, sy: np.ndarray) -> bool:
        a = float(sy[0, 0])
        w = sy[1:, 0].copy()
        d = np.diagonal(sy)[1:].copy()
        if np.any(d <= 0.0):
            return False
        dinv = 1.0 / d
        schur = a - float(np.sum(w * w * dinv))
        if schur <= 0.0:
            return False
        self._a, self._w, self._d = a, w, d
        self._u = np.concatenate([[1.0], -w * dinv])
        self._alpha = 1.0 / schur
        self._dv = np.concatenate([[0.0], dinv])
        return True

    def sinv_dense(self) -> np.ndarray:
        out = self._alpha * np.outer(self._u, self._u)
        idx = np.arange(1, len(self._dv))
        out[idx, idx] += self._dv[1:]
        return out

    def xu(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        # x dense, u arrowhead: O(n^2)
        ua = u[0, 0]
        uw = u[1:, 0]
        ud = np.diagonal(u)[1:]
        out = np.empty_like(x)
        out[:, 0] = x[:, 0] * ua + x[:, 1:] @ uw
        out[:, 1:] = np.outer(x[:, 0], uw) + x[:, 1:] * ud[None, :]
        return out

    def mul_sinv(self, m: np.ndarray) -> np.ndarray:
        return m * self._dv[None, :] + self._alpha * np.outer(m @ self._u, self._u)

    def maxstep_s(self, sy: np.ndarray, dy: np.ndarray) -> float:
        return _maxstep_arrow(
            self._a,
            self._w,
            self._d,
            float(dy[0, 0]),
            dy[1:, 0],
            np.diagonal(dy)[1:],
        )


# ------------------------------------------------------------------ the IPM

def _small_chol(m: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None


def _small_inv(chol: np.ndarray) -> np.ndarray:
    return scipy.linalg.cho_solve((chol, True), np.eye(chol.shape[0]), check_finite=False)


def _w_small(x: np.ndarray, u: np.ndarray, sinv: np.ndarray) -> np.ndarray:
    t = x @ u @ sinv
    return 0.5 * (t + t.T)


def _maxstep_blocks(x: Blocks, d: Blocks, kernel_step) -> float:
    return min(
        kernel_step(x.y, d.y),
        _maxstep_dense(x.z1, d.z1),
        _maxstep_dense(x.z2, d.z2),
    )


@dataclass
class _Iterate:
    x: Blocks
    s: Blocks
    y8: np.ndarray
    gamma: float
    theta: float
    rel_gap: float
    pinf: float
    dinf: float
    mu: float
    iteration: int
    score: float = field(init=False)

    def __post_init__(self):
        self.score = max(self.rel_gap, self.pinf, self.dinf)


def solve_sdp(
    problem: CqrProblem,
    tol_gap: float = 1e-9,
    tol_feas: float = 1e-9,
    max_iters: int = 200,
    mode: str = "dense",
) -> SdpSolution:
    """Solve the relaxation; returns optimum, moments, and the certificate.

    Raises MaxIterationsError / IllConditionedError when tolerances are not
    reached; both carry the best iterate found (`.result`) plus diagnostics.
    """
    t0 = time.perf_counter()
    data = assemble(problem, mode=mode)
    n = data.n
    c = data.c
    kept = np.array(data.kept)
    b7 = data.b[kept]
    total = data.total_dim
    kernel = _ArrowKernel() if mode == "eigen" else _DenseKernel()

    # constraint pieces used by the Schur assembly
    y_dvecs: dict[int, np.ndarray] = {}
    az1: list[np.ndarray] = []
    az2: list[np.ndarray] = []
    for i in range(8):
        e = np.zeros(8)
        e[i] = 1.0
        blk = a_adjoint(e, n)
        az1.append(blk.z1)
        az2.append(blk.z2)
        dv = np.diagonal(blk.y).copy()
        if np.any(dv != 0.0):
            y_dvecs[i] = dv
    gamma_pos = int(np.where(kept == 0)[0][0])

    # Exactly feasible, well-interior primal start: the moment blocks of any
    # radial measure satisfy all eight functionals identically, so take the
    # three-point measure on radii {0, rb/2, rb} at the problem's natural
    # radius scale.  That puts X at the size of the eventual optimum instead
    # of growing it from a unit guess over many iterations.
    rb = data.radius_bound
    m = np.array([(0.5 * rb) ** k + rb**k for k in range(1, 5)]) / 3.0
    xy = np.eye(n + 1)
    idx = np.arange(1, n + 1)
    xy[idx, idx] = m[1] / n
    xz1 = np.array(
        [
            [1.0, m[0], m[1]],
            [m[0], m[1], m[2]],
            [m[1], m[2], m[3]],
        ]
    )
    xz2 = np.array([[m[0], m[1]], [m[1], m[2]]])
    x = Blocks(xy, xz1, xz2)
    # Dual start at the scale of the optimal value: the slack's (0,0) entry
    # converges to f0 - gamma*, which value_bound caps.
    rho_d = 1.0 + data.cost_norm + data.value_bound
    s = Blocks(rho_d * np.eye(n + 1), rho_d * np.eye(3), rho_d * np.eye(2))
    y7 = np.zeros(len(kept))
    y7[gamma_pos] = -rho_d

    def embed(yv7: np.ndarray) -> np.ndarray:
        y8 = np.zeros(8)
        y8[kept] = yv7
        return y8

    best: _Iterate | None = None
    status = "max-iters"
    stall = 0
    it = 0

    for it in range(max_iters + 1):
        y8 = embed(y7)
        gamma = float(y8[0])
        theta = bdot(c, x)
        adj = a_adjoint(y8, n)
        rd = Blocks(c.y - adj.y - s.y, c.z1 - adj.z1 - s.z1, c.z2 - adj.z2 - s.z2)
        rp = b7 - a_apply(x)[kept]
        mu = bdot(x, s) / total
        rel_gap = abs(theta - gamma) / (1.0 + abs(theta) + abs(gamma))
        pinf = float(np.linalg.norm(rp)) / 2.0
        dinf = bnorm(rd) / (1.0 + data.cost_norm)
        cur = _Iterate(
            x.copy(), s.copy(), y8.copy(), gamma, theta, rel_gap, pinf, dinf, mu, it
        )
        if best is None or cur.score < best.score:
            best = cur
        if rel_gap <= tol_gap and pinf <= tol_feas and dinf <= tol_feas:
            status = "optimal"
            break
        if it == max_iters:
            status = "max-iters"
            break
        if it - best.iteration >= _NO_PROGRESS_WINDOW:
            status = "stalled"
            break

        ok_y = kernel.factor(s.y)
        c1 = _small_chol(s.z1)
        c2 = _small_chol(s.z2)
        if not ok_y or c1 is None or c2 is None:
            status = "factorization"
            break
        sinv = Blocks(kernel.sinv_dense(), _small_inv(c1), _small_inv(c2))

        # Schur matrix: m[i,j] = tr(A_i W(A_j)) assembled per block
        t_full = np.zeros((8, 8))
        p_y = x.y * sinv.y.T
        u_cols = {j: p_y @ dv for j, dv in y_dvecs.items()}
        for i, dvi in y_dvecs.items():
            for j, uj in u_cols.items():
                t_full[i, j] += float(dvi @ uj)
        for j in range(8):
            g1 = x.z1 @ az1[j] @ sinv.z1
            g2 = x.z2 @ az2[j] @ sinv.z2
            for i in range(8):
                t_full[i, j] += float(np.sum(az1[i] * g1)) + float(np.sum(az2[i] * g2))
        m7 = 0.5 * (t_full + t_full.T)[np.ix_(kept, kept)]

        try:
            m_chol = np.linalg.cholesky(m7)
        except np.linalg.LinAlgError:
            jitter = 1e-13 * (1.0 + float(np.trace(m7)) / len(kept))
            m_chol = None
            for _ in range(3):
                try:
                    m_chol = np.linalg.cholesky(m7 + jitter * np.eye(len(kept)))
                    break
                except np.linalg.LinAlgError:
                    jitter *= 100.0
            if m_chol is None:
                status = "factorization"
                break

        def schur_solve(rhs: np.ndarray) -> np.ndarray:
            dy = scipy.linalg.cho_solve((m_chol, True), rhs, check_finite=False)
            # one pass of iterative refinement on the 7x7 system
            dy += scipy.linalg.cho_solve((m_chol, True), rhs - m7 @ dy, check_finite=False)
            return dy

        def w_apply(u: Blocks) -> Blocks:
            ty = kernel.mul_sinv(kernel.xu(x.y, u.y))
            return Blocks(
                0.5 * (ty + ty.T),
                _w_small(x.z1, u.z1, sinv.z1),
                _w_small(x.z2, u.z2, sinv.z2),
            )

        a_sinv = a_apply(sinv)[kept]
        w_rd = w_apply(rd)
        a_w_rd = a_apply(w_rd)[kept]

        # predictor (affine scaling)
        dy7_a = schur_solve(b7 + a_w_rd)
        adj_a = a_adjoint(embed(dy7_a), n)
        ds_a = Blocks(rd.y - adj_a.y, rd.z1 - adj_a.z1, rd.z2 - adj_a.z2)
        w_ds_a = w_apply(ds_a)
        dx_a = Blocks(
            -x.y - w_ds_a.y, -x.z1 - w_ds_a.z1, -x.z2 - w_ds_a.z2
        ).symmetrize()

        ap_a = min(1.0, _maxstep_blocks(x, dx_a, lambda m, d: _maxstep_dense(m, d)))
        ad_a = min(1.0, _maxstep_blocks(s, ds_a, kernel.maxstep_s))
        mu_aff = (
            bdot(
                Blocks(x.y + ap_a * dx_a.y, x.z1 + ap_a * dx_a.z1, x.z2 + ap_a * dx_a.z2),
                Blocks(s.y + ad_a * ds_a.y, s.z1 + ad_a * ds_a.z1, s.z2 + ad_a * ds_a.z2),
            )
            / total
        )
        sig = (max(mu_aff, 0.0) / mu) ** 3 if mu > 0 else 0.0
        sig = min(max(sig, 1e-12), 1.0 - 1e-12)

        # corrector
        ky = kernel.mul_sinv(kernel.xu(dx_a.y, ds_a.y))
        kk = Blocks(
            0.5 * (ky + ky.T),
            _w_small(dx_a.z1, ds_a.z1, sinv.z1),
            _w_small(dx_a.z2, ds_a.z2, sinv.z2),
        )
        rhs = b7 - sig * mu * a_sinv + a_w_rd + a_apply(kk)[kept]
        dy7 = schur_solve(rhs)
        adj_c = a_adjoint(embed(dy7), n)
        ds = Blocks(rd.y - adj_c.y, rd.z1 - adj_c.z1, rd.z2 - adj_c.z2).symmetrize()
        w_ds = w_apply(ds)
        smu = sig * mu
        dx = Blocks(
            smu * sinv.y - x.y - w_ds.y - kk.y,
            smu * sinv.z1 - x.z1 - w_ds.z1 - kk.z1,
            smu * sinv.z2 - x.z2 - w_ds.z2 - kk.z2,
        ).symmetrize()

        # The Schur route only restores A(X + dX) = b up to noise that grows
        # with ||S^-1||; near the optimum that floor crosses the tolerance.
        # A is tiny and fixed, so project the direction back onto exact
        # linear feasibility with a precomputed right inverse, steered along
        # null(A) so the repair leaves <dX, S> (hence mu) alone.
        dx = blincomb(1.0, dx, 1.0, data.feas_correction(rp - a_apply(dx)[kept], s))

        ap = min(1.0, _STEP_FRACTION * _maxstep_blocks(x, dx, lambda m, d: _maxstep_dense(m, d)))
        ad = min(1.0, _STEP_FRACTION * _maxstep_blocks(s, ds, kernel.maxstep_s))

        # Neighborhood safeguard.  Near a rank-deficient optimum the Mehrotra
        # steps ride the PSD boundary; once the small eigenvalues fall far
        # below the centered level mu/||other side|| the Schur system turns
        # numerically singular while the gap is still open.  Measure
        # centrality as lambda_min * ||other side|| / mu (scale-free, O(1)
        # on the central path) and backtrack any step that would degrade it
        # below half its current value -- an absolute floor would freeze
        # iterates that are already off-center instead of letting them heal.
        cx_now = x.min_eig() * bnorm(s) / mu if mu > 0 else np.inf
        cs_now = s.min_eig() * bnorm(x) / mu if mu > 0 else np.inf
        floor_x = min(cx_now, max(_NBHD_GAMMA, 0.5 * cx_now))
        floor_s = min(cs_now, max(_NBHD_GAMMA, 0.5 * cs_now))
        for _ in range(12):
            xp = blincomb(1.0, x, ap, dx)
            sp = blincomb(1.0, s, ad, ds)
            mu_p = bdot(xp, sp) / total
            if not np.isfinite(mu_p) or mu_p <= 0.0:
                break
            shrink_x = ap > 1e-13 and xp.min_eig() * bnorm(sp) / mu_p < floor_x
            shrink_s = ad > 1e-13 and sp.min_eig() * bnorm(xp) / mu_p < floor_s
            if not (shrink_x or shrink_s):
                break
            if shrink_x:
                ap *= 0.5
            if shrink_s:
                ad *= 0.5

        if ap < 1e-10 and ad < 1e-10:
            stall += 1
            if stall >= _STALL_LIMIT:
                status = "stalled"
                break
        else:
            stall = 0

        x = Blocks(
            x.y + ap * dx.y, x.z1 + ap * dx.z1, x.z2 + ap * dx.z2
        ).symmetrize()
        s = Blocks(
            s.y + ad * ds.y, s.z1 + ad * ds.z1, s.z2 + ad * ds.z2
        ).symmetrize()
        y7 = y7 + ad * dy7

    chosen = best if status != "optimal" else _Iterate(
        x, s, embed(y7), float(embed(y7)[0]), bdot(c, x),
        0.0, 0.0, 0.0, bdot(x, s) / total, it,
    )
    if status == "optimal":
        # recompute honest residuals for the stats of the converged iterate
        y8 = chosen.y8
        adj = a_adjoint(y8, n)
        rd = Blocks(c.y - adj.y - chosen.s.y, c.z1 - adj.z1 - chosen.s.z1, c.z2 - adj.z2 - chosen.s.z2)
        chosen.rel_gap = abs(chosen.theta - chosen.gamma) / (
            1.0 + abs(chosen.theta) + abs(chosen.gamma)
        )
        chosen.pinf = float(np.linalg.norm(b7 - a_apply(chosen.x)[kept])) / 2.0
        chosen.dinf = bnorm(rd) / (1.0 + data.cost_norm)
        chosen.score = max(chosen.rel_gap, chosen.pinf, chosen.dinf)

    stats = SolveStats(
        iterations=it,
        rel_gap=chosen.rel_gap,
        primal_inf=chosen.pinf,
        dual_inf=chosen.dinf,
        mu=chosen.mu,
        wall_time=time.perf_counter() - t0,
        mode=mode,
        dropped_constraint=data.dropped,
        status=status,
        best_iteration=chosen.iteration,
    )

    xb, sb = chosen.x, chosen.s
    if data.rot is not None:
        qb = np.zeros((n + 1, n + 1))
        qb[0, 0] = 1.0
        qb[1:, 1:] = data.rot
        xb = Blocks(qb @ xb.y @ qb.T, xb.z1, xb.z2).symmetrize()
        sb = Blocks(qb @ sb.y @ qb.T, sb.z1, sb.z2).symmetrize()
    solution = SdpSolution(
        gamma=chosen.gamma,
        theta=chosen.theta,
        x=xb,
        s=sb,
        y=chosen.y8,
        stats=stats,
    )

    if status == "optimal":
        return solution
    if status == "max-iters":
        raise MaxIterationsError(
            f"interior-point method hit the {max_iters}-iteration cap "
            f"(best score {chosen.score:.3e} at iteration {chosen.iteration})",
            result=solution,
        )
    raise IllConditionedError(
        f"interior-point method broke down ({status}) at iteration {it} "
        f"(best score {chosen.score:.3e})",
        diagnostics={
            "status": status,
            "iteration": it,
            "best_score": chosen.score,
            "mu": chosen.mu,
        },
        result=solution,
    )
