"""Data layer for the moment relaxation of the cubic-quartic model.

The relaxation lives on three PSD blocks:

    Y  in S^{n+1}   -- moments of (1, s): Y = [[1, s'],[s, ss']] on rank one
    Z1 in S^3       -- moments of (1, z, z^2) for the norm variable z
    Z2 in S^2       -- moments of sqrt(z) (1, z): carries the odd powers z, z^3

linked by eight linear functionals (one normalization plus seven moment
matching/consistency couplings).  The objective is

    <C_Y, Y> + (beta/6) (Z2)_{11} + (sigma/4) (Z1)_{22},
    C_Y = [[f0, g'/2], [g/2, H/2]],

whose value on the rank-one lift of any point s equals M(s), so the optimum
is a lower bound on the global minimum.  Exactly one of the eight functionals
is linearly dependent on the rest; `assemble` keeps all eight for residual
bookkeeping but selects a maximal independent subset of seven (by pivoted QR)
for the interior-point method's normal equations, reporting which index was
dropped.

`residuals` re-derives both feasibility measures from scratch (the dual one
through the polynomial-identity form rather than multipliers), so tests can
audit a solution without trusting the solver's own accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..core import CqrProblem
from ..errors import InputError
from ..linalg import min_psd_eig, sym_eigen

__all__ = [
    "Blocks",
    "SdpData",
    "assemble",
    "a_apply",
    "a_adjoint",
    "rank_one_lift",
    "residuals",
]

N_CONSTRAINTS = 8


@dataclass
class Blocks:
    """One element of the product cone S^{n+1} x S^3 x S^2."""

    y: np.ndarray
    z1: np.ndarray
    z2: np.ndarray

    def copy(self) -> "Blocks":
        return Blocks(self.y.copy(), self.z1.copy(), self.z2.copy())

    def symmetrize(self) -> "Blocks":
        self.y = 0.5 * (self.y + self.y.T)
        self.z1 = 0.5 * (self.z1 + self.z1.T)
        self.z2 = 0.5 * (self.z2 + self.z2.T)
        return self

    def scaled_identity(self, rho: float) -> "Blocks":
        n1 = self.y.shape[0]
        return Blocks(rho * np.eye(n1), rho * np.eye(3), rho * np.eye(2))

    def min_eig(self) -> float:
        return min(min_psd_eig(self.y), min_psd_eig(self.z1), min_psd_eig(self.z2))


def bdot(a: Blocks, b: Blocks) -> float:
    return float(
        np.tensordot(a.y, b.y) + np.tensordot(a.z1, b.z1) + np.tensordot(a.z2, b.z2)
    )


def bnorm(a: Blocks) -> float:
    return float(np.sqrt(bdot(a, a)))


def blincomb(ca: float, a: Blocks, cb: float, b: Blocks) -> Blocks:
    return Blocks(
        ca * a.y + cb * b.y, ca * a.z1 + cb * b.z1, ca * a.z2 + cb * b.z2
    )


def a_apply(x: Blocks) -> np.ndarray:
    """The eight linear functionals of a block element (fixed order)."""
    y, z1, z2 = x.y, x.z1, x.z2
    tr_tail = float(np.trace(y)) - y[0, 0]
    return np.array(
        [
            y[0, 0],
            z1[0, 0] - y[0, 0],
            z1[0, 1] - z2[0, 0],
            z1[1, 1] - z2[0, 1],
            z1[0, 2] - z2[0, 1],
            z1[1, 2] - z2[1, 1],
            z1[0, 2] - tr_tail,
            z1[1, 1] - tr_tail,
        ]
    )


def a_adjoint(yv: np.ndarray, n: int) -> Blocks:
    """Adjoint of `a_apply`: sum_i yv[i] A_i as a block element."""
    y0, y1, y2, y3, y4, y5, y6, y7 = (float(v) for v in yv)
    ay = np.zeros((n + 1, n + 1))
    ay[0, 0] = y0 - y1
    idx = np.arange(1, n + 1)
    ay[idx, idx] = -(y6 + y7)
    az1 = np.array(
        [
            [y1, 0.5 * y2, 0.5 * (y4 + y6)],
            [0.5 * y2, y3 + y7, 0.5 * y5],
            [0.5 * (y4 + y6), 0.5 * y5, 0.0],
        ]
    )
    az2 = np.array(
        [
            [-y2, -0.5 * (y3 + y4)],
            [-0.5 * (y3 + y4), -y5],
        ]
    )
    return Blocks(ay, az1, az2)


def constraint_rhs() -> np.ndarray:
    b = np.zeros(N_CONSTRAINTS)
    b[0] = 1.0
    return b


_ROOT2 = np.sqrt(2.0)
_Z1_PAIRS = [(0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)]
_Z2_PAIRS = [(0, 0), (0, 1), (1, 1)]


def _functional_rows(n: int) -> np.ndarray:
    """Coefficient matrix of the 8 functionals in an 11-dim coordinatization.

    Coordinates: (Y_00, tr Y_tail), svec(Z1), svec(Z2).  The functionals only
    ever touch Y through these two numbers, which is why the representation
    is exact and dimension-independent.
    """
    rows = np.zeros((N_CONSTRAINTS, 2 + 6 + 3))
    for i in range(N_CONSTRAINTS):
        e = np.zeros(N_CONSTRAINTS)
        e[i] = 1.0
        blk = a_adjoint(e, n)
        rows[i, 0] = blk.y[0, 0]
        rows[i, 1] = blk.y[1, 1]  # per-unit-of-trace coefficient
        k = 2
        for (p, q) in _Z1_PAIRS:
            rows[i, k] = blk.z1[p, q] * (1.0 if p == q else _ROOT2)
            k += 1
        for (p, q) in _Z2_PAIRS:
            rows[i, k] = blk.z2[p, q] * (1.0 if p == q else _ROOT2)
            k += 1
    return rows


def _independent_subset(rows: np.ndarray) -> tuple[list[int], int]:
    """Pivoted-QR choice of 7 independent functionals out of the 8."""
    _, r, piv = scipy.linalg.qr(rows.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > 1e-12 * diag[0]))
    if rank != N_CONSTRAINTS - 1:
        raise InputError(f"internal: functional rank {rank}, expected 7")
    kept = sorted(int(p) for p in piv[:rank])
    dropped = int(piv[rank])
    return kept, dropped


def _unsvec3(v: np.ndarray) -> np.ndarray:
    m = np.zeros((3, 3))
    for k, (p, q) in enumerate(_Z1_PAIRS):
        val = v[k] if p == q else v[k] / _ROOT2
        m[p, q] = m[q, p] = val
    return m


def _unsvec2(v: np.ndarray) -> np.ndarray:
    m = np.zeros((2, 2))
    for k, (p, q) in enumerate(_Z2_PAIRS):
        val = v[k] if p == q else v[k] / _ROOT2
        m[p, q] = m[q, p] = val
    return m


@dataclass
class SdpData:
    """Assembled relaxation, possibly in H's eigenbasis (eigen mode)."""

    n: int
    c: Blocks                 # objective coefficients per block
    b: np.ndarray             # full 8-vector rhs
    kept: list[int]           # independent functional indices used by the IPM
    dropped: int              # the redundant functional (reported, still checked)
    rot: np.ndarray | None    # H = rot diag(eigs) rot' when eigen-rotated
    eigs: np.ndarray | None
    cost_norm: float
    data_norm: float          # 1 + ||g|| + ||H||_F, used for starting point
    corr_map: np.ndarray      # 11x7 right inverse of the kept functionals
    null_map: np.ndarray      # 11x4 orthonormal null basis of the same rows
    radius_bound: float       # coercivity estimate of the minimizer radius
    value_bound: float        # bound on |M| within that radius

    @property
    def total_dim(self) -> int:
        return (self.n + 1) + 3 + 2

    def feas_correction(self, delta: np.ndarray, slack: Blocks | None = None) -> Blocks:
        """Minimum-norm block element eta with A(eta)[kept] = delta.

        Used by the IPM to pin search directions to exact linear feasibility;
        accurate to roundoff on delta itself, independent of conditioning.
        When the current dual slack is supplied, a null-space component is
        mixed in so that <eta, slack> = 0: the repair then restores
        feasibility without perturbing the complementarity measure mu (which
        otherwise stalls the endgame on badly scaled instances).
        """
        xc = self.corr_map @ delta
        if slack is not None:
            q = self._pairing(slack)
            nu = self.null_map @ (self.null_map.T @ q)
            w = float(nu @ q)  # == ||nu||^2 >= 0
            if w > (1e-8 * float(np.linalg.norm(q))) ** 2:
                xc -= (float(q @ xc) / w) * nu
        n = self.n
        y = np.zeros((n + 1, n + 1))
        y[0, 0] = xc[0]
        idx = np.arange(1, n + 1)
        y[idx, idx] = xc[1] / n
        return Blocks(y, _unsvec3(xc[2:8]), _unsvec2(xc[8:11]))

    def _pairing(self, v: Blocks) -> np.ndarray:
        """Vector q with <block(xc), v> = q @ xc for the embedding above."""
        q = np.empty(2 + 6 + 3)
        q[0] = v.y[0, 0]
        q[1] = (float(np.trace(v.y)) - v.y[0, 0]) / self.n
        for k, (p, r) in enumerate(_Z1_PAIRS):
            q[2 + k] = v.z1[p, r] * (1.0 if p == r else _ROOT2)
        for k, (p, r) in enumerate(_Z2_PAIRS):
            q[8 + k] = v.z2[p, r] * (1.0 if p == r else _ROOT2)
        return q


def assemble(problem: CqrProblem, mode: str = "dense") -> SdpData:
    """Build the relaxation data for a plain (unweighted) problem.

    In eigen mode the coordinates are rotated by H's eigenbasis so the big
    cost block becomes an arrowhead matrix; the constraints are invariant
    under this rotation, which is what the fast kernel exploits.
    """
    if problem.W is not None:
        raise InputError(
            "assemble expects a plain problem; apply the weight transform first"
        )
    n = problem.n
    if mode not in ("dense", "eigen"):
        raise InputError(f"unknown mode {mode!r}")
    rot = None
    eigs = None
    g = problem.g
    h = problem.H
    if mode == "eigen":
        eig = sym_eigen(problem.H)
        rot, eigs = eig.vectors, eig.values
        g = rot.T @ problem.g
        h = np.diag(eigs)
    cy = np.zeros((n + 1, n + 1))
    cy[0, 0] = problem.f0
    cy[0, 1:] = 0.5 * g
    cy[1:, 0] = 0.5 * g
    cy[1:, 1:] = 0.5 * h
    cz1 = np.zeros((3, 3))
    cz1[2, 2] = 0.25 * problem.sigma
    cz2 = np.zeros((2, 2))
    cz2[1, 1] = problem.beta / 6.0
    c = Blocks(cy, cz1, cz2)
    rows = _functional_rows(n)
    kept, dropped = _independent_subset(rows)
    gn = float(np.linalg.norm(g))
    hn = float(np.linalg.norm(h))
    lam_lo = float(eigs[0]) if eigs is not None else float(np.linalg.eigvalsh(h)[0])
    # Radius scale of any minimizer, from the radial coercivity polynomial
    # psi'(r) >= (sigma/4) r^3 + (beta/6) r^2 + (lam_min/2) r - ||g||; its
    # largest positive root bounds where descent can end.  Only a scale
    # estimate is needed here (it sizes the starting point), so fall back to
    # 1 when the polynomial has no positive root.
    roots = np.roots([0.25 * problem.sigma, problem.beta / 6.0, 0.5 * lam_lo, -(gn + 1.0)])
    pos = [float(r.real) for r in roots if abs(r.imag) <= 1e-9 * (1.0 + abs(r)) and r.real > 0]
    rb = max(pos, default=1.0)
    rb = max(rb, 1.0)
    vb = (
        abs(problem.f0)
        + gn * rb
        + 0.5 * hn * rb**2
        + abs(problem.beta) / 6.0 * rb**3
        + 0.25 * problem.sigma * rb**4
    )
    return SdpData(
        n=n,
        c=c,
        b=constraint_rhs(),
        kept=kept,
        dropped=dropped,
        rot=rot,
        eigs=eigs,
        cost_norm=bnorm(c),
        data_norm=1.0 + float(np.linalg.norm(problem.g)) + float(np.linalg.norm(problem.H)),
        corr_map=np.linalg.pinv(rows[kept]),
        null_map=scipy.linalg.null_space(rows[kept]),
        radius_bound=rb,
        value_bound=vb,
    )


def rank_one_lift(s, f0_weight: float = 1.0) -> Blocks:
    """Feasible moment blocks generated by a single point s.

    The objective value of the lift equals M(s), which is how weak duality
    is exercised in tests: every lift is primal feasible, so the relaxation
    optimum can never exceed min_s M(s).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    z = float(np.linalg.norm(s))
    v = np.concatenate([[1.0], s])
    y = np.outer(v, v) * f0_weight
    m1 = np.array([1.0, z, z * z])
    z1 = np.outer(m1, m1)
    m2 = np.array([1.0, z])
    z2 = z * np.outer(m2, m2)
    return Blocks(y, z1, z2)


def residuals(problem: CqrProblem, x: Blocks | None, s: Blocks | None, gamma: float) -> dict:
    """From-scratch feasibility audit of a primal/dual pair.

    Dual feasibility is checked through the polynomial identity the slack
    blocks must satisfy -- matching M(s) - gamma coefficient by coefficient
    in the basis {1, s_i, s_i s_j, z, z^3, z^4} -- rather than through the
    solver's multipliers, so it is an independent route.
    """
    if problem.W is not None:
        raise InputError("residuals expects a plain problem")
    n = problem.n
    out: dict = {"gamma": float(gamma)}
    if x is not None:
        ax = a_apply(x)
        out["primal_residual"] = float(np.linalg.norm(ax - constraint_rhs()))
        out["primal_rel"] = out["primal_residual"] / 2.0
        out["primal_min_eig"] = x.min_eig()
        cy = np.zeros((n + 1, n + 1))
        cy[0, 0] = problem.f0
        cy[0, 1:] = 0.5 * problem.g
        cy[1:, 0] = 0.5 * problem.g
        cy[1:, 1:] = 0.5 * problem.H
        theta = float(np.tensordot(cy, x.y)) + (problem.beta / 6.0) * x.z2[1, 1] + (
            0.25 * problem.sigma
        ) * x.z1[2, 2]
        out["theta"] = theta
        out["rel_gap"] = abs(theta - gamma) / (1.0 + abs(theta) + abs(gamma))
    if s is not None:
        x0, x1, x2 = s.y, s.z1, s.z2
        d_const = x0[0, 0] + x1[0, 0] - (problem.f0 - gamma)
        d_lin = 2.0 * x0[0, 1:] - problem.g
        d_z1 = 2.0 * x1[0, 1] + x2[0, 0]
        shift = x1[1, 1] + 2.0 * x1[0, 2] + 2.0 * x2[0, 1]
        d_quad = x0[1:, 1:] + shift * np.eye(n) - 0.5 * problem.H
        d_z3 = 2.0 * x1[1, 2] + x2[1, 1] - problem.beta / 6.0
        d_z4 = x1[2, 2] - 0.25 * problem.sigma
        vec = np.concatenate(
            [[d_const], d_lin, [d_z1], d_quad.ravel(), [d_z3], [d_z4]]
        )
        cost_norm = 1.0 + abs(problem.f0) + float(
            np.linalg.norm(problem.g)
        ) + float(np.linalg.norm(problem.H)) + abs(problem.beta) + problem.sigma
        out["dual_residual"] = float(np.linalg.norm(vec))
        out["dual_rel"] = out["dual_residual"] / cost_norm
        out["dual_min_eig"] = s.min_eig()
    return out
