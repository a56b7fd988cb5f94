"""Turn a solved relaxation into explicit global minimizers and a verdict.

The dual slack blocks of a converged solve encode a sum-of-squares identity

    M(s) - gamma* = ||R [s]_1||^2 + p1(z)^2 + p2(z)^2 + z (q1(z)^2 + q2(z)^2)

with z = ||s|| and [s]_1 = (1, s): factor the big block as R'R and the two
norm blocks as a1 a1' + a2 a2' and b1 b1' + b2 b2', and the a_i / b_j are the
coefficient vectors of the p_i / q_j.  A point attains the lower bound
gamma* exactly when every term vanishes, so the set of global minimizers --
whenever the relaxation is tight -- is cut out by

    R [s]_1 = 0                 (affine system in s)
    p1(z) = p2(z) = 0           (admissible norms z, finitely many)
    z q1(z) = z q2(z) = 0

and is either empty, {0}, a single point, or a sphere inside an affine
subspace (possibly together with {0}).  `certify` runs the whole chain;
`classify` renders the tightness verdict, recording which test decided it.

Verdict tags are fixed strings shared with the report format:
"empty-system", "condition-1.4-holds", "corollary-4.2", "rank-one-recovery".
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import core
from .core import CqrProblem
from .errors import CertificateInconsistencyError, InputError, RankAnomalyError
from .linalg import min_norm_solve, min_psd_eig, nullspace, sym_eigen
from .sdp.data import Blocks, residuals
from .sdp.ipm import SdpSolution

__all__ = [
    "Certificate",
    "MinimizerSet",
    "TightnessReport",
    "factor_dual",
    "certificate_value",
    "common_roots",
    "zero_membership",
    "solve_sphere_affine",
    "rank_one_candidate",
    "classify",
    "certify",
    "REASON_EMPTY_SYSTEM",
    "REASON_NORM_CONDITION",
    "REASON_SPECTRUM",
    "REASON_RANK_ONE",
]

REASON_EMPTY_SYSTEM = "empty-system"
REASON_NORM_CONDITION = "condition-1.4-holds"
REASON_SPECTRUM = "corollary-4.2"
REASON_RANK_ONE = "rank-one-recovery"

_COEFF_TINY = 1e-12  # relative cutoff for "this coefficient is present"


def _polyval(coeffs: np.ndarray, z: float) -> float:
    return float(npoly.polyval(z, coeffs))


# ------------------------------------------------------------- certificate

@dataclass(frozen=True)
class Certificate:
    """Square-root factors of the dual slack blocks.

    R has shape (rank, n + 1) and R'R reproduces the big slack block to the
    rank cutoff; polynomial coefficients ascend in degree (p: 1, z, z^2;
    q: 1, z) and each leading nonzero coefficient is nonnegative.  A factor
    dropped by the rank decision is an exact zero vector, which the root
    intersection treats as "no constraint".
    """

    R: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    rank: int
    rank1: int
    rank2: int

    @property
    def n(self) -> int:
        return self.R.shape[1] - 1

    def polynomials(self) -> list[np.ndarray]:
        return [self.p1, self.p2, self.q1, self.q2]


def _psd_factor(m: np.ndarray, tol_rank: float) -> tuple[np.ndarray, int]:
    """Rows sqrt(lam_k) v_k' for eigenvalues above tol_rank * max(1, lam_max),
    strongest first, so that rows' rows reproduces m up to the cut."""
    eig = sym_eigen(m)
    lam_max = float(eig.values[-1])
    thr = tol_rank * max(1.0, lam_max)
    keep = np.flatnonzero(eig.values > thr)[::-1]
    rows = np.sqrt(eig.values[keep])[:, None] * eig.vectors[:, keep].T
    return rows, len(keep)


def _lead_nonneg(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    scale = float(np.linalg.norm(c))
    if scale == 0.0:
        return c
    nz = np.flatnonzero(np.abs(c) > _COEFF_TINY * scale)
    if nz.size and c[nz[-1]] < 0:
        return -c
    return c


def factor_dual(dual: Blocks, tol_rank: float = 1e-7) -> Certificate:
    """Factor the dual slack blocks into certificate form.

    Ranks are decided per block by eigenvalue > tol_rank * max(1, lam_max).
    The 3x3 norm block can have rank at most 2 at any true optimum (its
    product with the positive-trace primal moment block must vanish), so
    numerical rank 3 means the solve cannot be trusted and is raised as a
    rank anomaly rather than silently truncated.  The 2x2 block satisfies
    its bound of 2 by shape.
    """
    big, rank = _psd_factor(dual.y, tol_rank)
    f1, rank1 = _psd_factor(dual.z1, tol_rank)
    f2, rank2 = _psd_factor(dual.z2, tol_rank)
    if rank1 > 2:
        raise RankAnomalyError(
            f"even norm-moment slack block has numerical rank {rank1} > 2 at "
            f"tol_rank={tol_rank:g}; the solve is not accurate enough to factor"
        )
    zero3 = np.zeros(3)
    zero2 = np.zeros(2)
    return Certificate(
        R=big,
        p1=_lead_nonneg(f1[0]) if rank1 >= 1 else zero3,
        p2=_lead_nonneg(f1[1]) if rank1 >= 2 else zero3,
        q1=_lead_nonneg(f2[0]) if rank2 >= 1 else zero2,
        q2=_lead_nonneg(f2[1]) if rank2 >= 2 else zero2,
        rank=rank,
        rank1=rank1,
        rank2=rank2,
    )


def _energy(cert: Certificate) -> float:
    """1 + total squared mass of the certificate, the natural value scale:
    the decomposition's terms are bounded by this times powers of (1 + z)."""
    return 1.0 + float(
        np.sum(cert.R * cert.R) + sum(float(c @ c) for c in cert.polynomials())
    )


def certificate_value(cert: Certificate, s) -> float:
    """Right-hand side of the decomposition at s; equals M(s) - gamma* when
    the certificate is exact, which is the identity tests audit."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    z = float(np.linalg.norm(s))
    lift = np.concatenate([[1.0], s])
    total = float(np.sum((cert.R @ lift) ** 2))
    total += _polyval(cert.p1, z) ** 2 + _polyval(cert.p2, z) ** 2
    total += z * (_polyval(cert.q1, z) ** 2 + _polyval(cert.q2, z) ** 2)
    return total


# ---------------------------------------------------------- the root system

def _closed_form_roots(coeffs: np.ndarray, tol_root: float) -> list[float]:
    """Real roots of a linear/quadratic given ascending coefficients.

    A conjugate pair whose imaginary part is below sqrt(tol_root) relative
    collapses to its real part: such a pair leaves |poly| ~ tol_root there,
    which is as much as the intersection test downstream can distinguish,
    and near-double roots routinely land a hair complex in floating point.
    """
    c = np.asarray(coeffs, dtype=float)
    scale = float(np.linalg.norm(c))
    if scale == 0.0:
        return []
    if c.shape[0] >= 3 and abs(c[2]) > _COEFF_TINY * scale:
        a, b, c0 = c[2], c[1], c[0]
        disc = b * b - 4.0 * a * c0
        if disc >= 0.0:
            sq = float(np.sqrt(disc))
            qv = -0.5 * (b + sq) if b >= 0.0 else -0.5 * (b - sq)
            if qv == 0.0:  # b = disc = 0: double root at the origin
                return [0.0, 0.0]
            return [float(qv / a), float(c0 / qv)]
        re = -0.5 * b / a
        im = 0.5 * float(np.sqrt(-disc)) / abs(a)
        if im <= np.sqrt(tol_root) * (1.0 + abs(re)):
            return [float(re)]
        return []
    if abs(c[1]) > _COEFF_TINY * scale:
        return [float(-c[0] / c[1])]
    return []  # nonzero constant: no roots


def common_roots(cert: Certificate, tol_root: float = 1e-6) -> list[float] | None:
    """Nonnegative z at which every nonzero certificate polynomial vanishes.

    Candidates are the closed-form roots of each polynomial; one survives if
    poly(z)^2 <= tol_root * energy * (1 + |z|)^2 for every nonzero polynomial,
    where energy is the certificate's total squared mass.  The scale is the
    certificate's, not each polynomial's own norm: a factor whose block sits
    at the solver's complementarity floor has coefficients that are pure
    noise, yet the decomposition still pins its *value* near zero at any true
    minimizer norm, so that is the quantity worth testing.  Measured against
    its own tiny norm such a factor would veto every candidate.

    Tiny negative candidates are clamped to zero, genuinely negative ones
    dropped (z is a norm), and survivors within sqrt(tol_root) * (1 + |z|)
    of each other are merged -- a double root split by coefficient noise eps
    lands its two copies ~sqrt(eps) apart.  Identically-zero polynomials
    constrain nothing; if all four are zero there is no norm constraint at
    all and None is returned (every z >= 0 qualifies -- the degenerate
    family with no cubic/quartic term).
    """
    polys = [c for c in cert.polynomials() if float(np.linalg.norm(c)) > 0.0]
    if not polys:
        return None
    scale = _energy(cert)
    cands: list[float] = []
    for c in polys:
        cands.extend(_closed_form_roots(c, tol_root))
    accepted: list[float] = []
    for z in cands:
        if z < -tol_root:
            continue
        z = max(z, 0.0)
        if all(
            _polyval(c, z) ** 2 <= tol_root * scale * (1.0 + abs(z)) ** 2
            for c in polys
        ):
            accepted.append(z)
    cluster = float(np.sqrt(tol_root))
    out: list[float] = []
    for z in sorted(accepted):
        if out and abs(z - out[-1]) <= cluster * (1.0 + abs(z)):
            continue
        out.append(z)
    return out


def zero_membership(cert: Certificate, tol: float = 1e-6) -> bool:
    """Whether the origin solves the certificate system.

    The decomposition gives M(0) - gamma* = ||R e_0||^2 + p1(0)^2 + p2(0)^2
    (the q terms carry a factor ||s|| and vanish at 0 on their own), so the
    origin is a global minimizer exactly when all three squares vanish.
    Each is tested against tol times the certificate's total energy.
    """
    r0 = cert.R[:, 0]
    scale = _energy(cert)
    return (
        float(r0 @ r0) <= tol * scale
        and _polyval(cert.p1, 0.0) ** 2 <= tol * scale
        and _polyval(cert.p2, 0.0) ** 2 <= tol * scale
    )


# ----------------------------------------------------------- minimizer sets

@dataclass(frozen=True)
class MinimizerSet:
    """The complete set of global minimizers, in closed form.

    Possible shapes: empty; {0}; a single point; a sphere of radius `radius`
    centered at `particular` inside the affine flat particular + span(basis);
    or, for the degenerate family with no norm terms at all, that whole flat
    (norm_free).  The origin travels separately in contains_zero and may
    coexist with a sphere component.

    `particular` is the minimum-norm solution of the affine system, hence
    orthogonal to every basis column, and for sphere components
    ||particular||^2 + radius^2 = z_star^2 with every nonzero member sharing
    norm z_star.
    """

    dim: int
    contains_zero: bool
    z_star: float | None = None
    particular: np.ndarray | None = None
    basis: np.ndarray | None = None
    radius: float | None = None
    norm_free: bool = False

    @property
    def is_empty(self) -> bool:
        return not self.contains_zero and self.particular is None

    @property
    def nullity(self) -> int:
        """Number of free affine directions (0 for a singleton)."""
        return 0 if self.basis is None else self.basis.shape[1]

    def finite_members(self) -> list[np.ndarray] | None:
        """All members, when finitely many; None for continuum components."""
        out: list[np.ndarray] = []
        if self.contains_zero:
            out.append(np.zeros(self.dim))
        if self.particular is not None:
            rho = self.radius if self.radius is not None else 0.0
            if self.norm_free and self.nullity > 0:
                return None
            if rho == 0.0 or self.nullity == 0:
                out.append(self.particular.copy())
            elif self.nullity == 1:
                d = self.basis[:, 0]
                out.append(self.particular - rho * d)
                out.append(self.particular + rho * d)
            else:
                return None
        return out

    def sample(self, count: int = 100, seed: int = 0) -> np.ndarray:
        """Deterministic (count, dim) member sample; finite sets come whole."""
        if self.is_empty:
            return np.zeros((0, self.dim))
        fin = self.finite_members()
        if fin is not None:
            return np.array(fin[:count])
        pts: list[np.ndarray] = []
        if self.contains_zero:
            pts.append(np.zeros(self.dim))
        rng = np.random.default_rng(seed)
        coeff = rng.standard_normal((max(count - len(pts), 1), self.nullity))
        if self.norm_free:
            coeff *= 1.0 + float(np.linalg.norm(self.particular))
        else:
            norms = np.linalg.norm(coeff, axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            coeff *= self.radius / norms
        pts.extend(self.particular + coeff @ self.basis.T)
        return np.array(pts[:count])

    def distance_to(self, point) -> float:
        """Euclidean distance from `point` to the nearest member (inf if empty)."""
        x = np.atleast_1d(np.asarray(point, dtype=float))
        if x.shape != (self.dim,):
            raise InputError(f"point has shape {x.shape}, expected ({self.dim},)")
        best = np.inf
        if self.contains_zero:
            best = float(np.linalg.norm(x))
        if self.particular is not None:
            v = x - self.particular
            if self.nullity:
                cvec = self.basis.T @ v
                within = float(np.linalg.norm(cvec))
                orth2 = max(0.0, float(v @ v) - within * within)
            else:
                within, orth2 = 0.0, float(v @ v)
            if self.norm_free:
                d2 = orth2
            elif self.radius is None or self.radius == 0.0 or self.nullity == 0:
                d2 = float(v @ v)
            else:
                d2 = orth2 + (within - self.radius) ** 2
            best = min(best, float(np.sqrt(d2)))
        return best


def solve_sphere_affine(
    cert: Certificate, z_star: float, tol: float = 1e-6
) -> MinimizerSet | None:
    """Solve { s : R [s]_1 = 0, ||s|| = z_star } in closed form.

    The affine system splits as r0 + Rs s = 0 with r0 the first column of R;
    its solutions form particular + span(basis) with `particular` the
    minimum-norm one, and the sphere cuts that flat in the sub-sphere of
    radius sqrt(z_star^2 - ||particular||^2) in basis coordinates.  Returns
    None when the system is infeasible (inconsistent affine part, or norm
    defect beyond tol); contains_zero is left False for the caller to merge.
    """
    n = cert.n
    rs = cert.R[:, 1:]
    shat = min_norm_solve(rs, -cert.R[:, 0])
    if shat is None:
        return None
    base = nullspace(rs).basis
    z_star = float(z_star)
    if base.shape[1] == 0:
        if abs(float(np.linalg.norm(shat)) - z_star) > tol * (1.0 + z_star):
            return None
        # Snap the reported norm to the achieved one: the affine system alone
        # pins the point, the root only had to match it within tol.
        return MinimizerSet(
            dim=n,
            contains_zero=False,
            z_star=float(np.linalg.norm(shat)),
            particular=shat,
            basis=base,
            radius=0.0,
        )
    gap = z_star * z_star - float(shat @ shat)
    if gap < -tol * (1.0 + z_star * z_star):
        return None
    if gap <= 0.0:
        return MinimizerSet(
            dim=n,
            contains_zero=False,
            z_star=float(np.linalg.norm(shat)),
            particular=shat,
            basis=base,
            radius=0.0,
        )
    return MinimizerSet(
        dim=n,
        contains_zero=False,
        z_star=z_star,
        particular=shat,
        basis=base,
        radius=float(np.sqrt(gap)),
    )


def _component_rep(ms: MinimizerSet) -> np.ndarray:
    """One concrete member of the nonzero component."""
    rho = ms.radius if ms.radius is not None else 0.0
    if rho > 0.0 and ms.nullity:
        return ms.particular + rho * ms.basis[:, 0]
    return ms.particular


# ----------------------------------------------------------- classification

@dataclass(frozen=True)
class TightnessReport:
    """Verdict and accuracy metrics for one solve.

    mu_upper is the model value at the best concrete candidate (a minimizer
    when tight, the origin as a fallback bound otherwise), so
    err_abs = |mu_upper - gamma_star| is meaningful in both verdicts.
    err_rel is err_abs / |mu_upper|, or None when mu_upper = 0.
    condition_value is z (beta + 3 sigma z) at the minimizer norm z, only
    reported when a minimizer exists.  rank_one records whether the rank-one
    recovery path fired (independently of which test decided the verdict).
    """

    gamma_star: float
    theta_star: float
    mu_upper: float
    err_abs: float
    err_rel: float | None
    tight: bool
    reason: str
    condition_value: float | None
    minimizers: MinimizerSet
    representative: np.ndarray | None
    rank_one: bool
    diagnostics: tuple[str, ...] = ()


def rank_one_candidate(primal: Blocks, tol_rank: float = 1e-7) -> np.ndarray | None:
    """The lifted point, when all three moment blocks are numerically rank one.

    Rank-one moments are exactly the lift of a single point, whose
    coordinates sit in the first column of the big block (normalized by its
    (0,0) entry); if any block has another eigenvalue above
    tol_rank * max(1, lam_max), returns None.
    """
    for blk in (primal.y, primal.z1, primal.z2):
        w = np.linalg.eigvalsh(blk)
        if int(np.sum(w > tol_rank * max(1.0, float(w[-1])))) != 1:
            return None
    y00 = float(primal.y[0, 0])
    if y00 <= 0.0:
        return None
    return primal.y[1:, 0] / y00


def classify(
    problem: CqrProblem,
    solution: SdpSolution,
    cert: Certificate,
    mset: MinimizerSet,
    tol_rank: float = 1e-7,
    diagnostics: tuple[str, ...] = (),
) -> TightnessReport:
    """Render the tightness verdict for one solve.

    The deciding tests run in a fixed order and `reason` names the first
    that fires:

      1. spectrum test (beta >= 0, or H has a nonpositive eigenvalue):
         provably tight before any numerics -> "corollary-4.2";
      2. rank-one moments: the primal optimum is the lift of a single point,
         emitted directly -> "rank-one-recovery";
      3. the certificate system has solutions (mset nonempty): tight, with
         the norm condition z (beta + 3 sigma z) >= 0 -> "condition-1.4-holds";
      4. otherwise not tight -> "empty-system".

    Whenever test 1 guarantees tightness, an extracted set is mandatory: an
    empty one means the solve was not accurate enough to certify, and a
    CertificateInconsistencyError (carrying an independent residual audit)
    is raised instead of a verdict.
    """
    diags = list(diagnostics)
    gamma = float(solution.gamma)
    theta = float(solution.theta)
    apriori = problem.beta >= 0.0 or min_psd_eig(problem.H) <= 0.0
    r1pt = rank_one_candidate(solution.x, tol_rank)
    if r1pt is not None:
        # Only trust the lifted point if it actually sits on the certified
        # level: a spurious numerically-rank-one optimum in a case with a
        # real relaxation gap must not manufacture a tight verdict.
        v = core.evaluate(problem, r1pt)
        if abs(v - gamma) > 1e-5 * (1.0 + abs(v) + abs(gamma)):
            r1pt = None
    if r1pt is not None and mset.is_empty:
        # Root intersection can miss right at tolerance boundaries while the
        # moments still identify the point; emit it as a singleton.
        mset = MinimizerSet(
            dim=problem.n,
            contains_zero=False,
            z_star=float(np.linalg.norm(r1pt)),
            particular=r1pt,
            basis=np.zeros((problem.n, 0)),
            radius=0.0,
        )
        diags.append("minimizer set recovered from rank-one moments alone")
    if apriori and mset.is_empty:
        audit = residuals(problem, solution.x, solution.s, gamma)
        audit["solver_status"] = solution.stats.status
        audit["solver_rel_gap"] = solution.stats.rel_gap
        raise CertificateInconsistencyError(
            "the relaxation is provably tight for this input (beta >= 0 or "
            "H has a nonpositive eigenvalue) but no minimizer was extracted; "
            "the solve is not accurate enough to certify",
            diagnostics=audit,
        )
    tight = not mset.is_empty
    if not tight:
        reason = REASON_EMPTY_SYSTEM
    elif apriori:
        reason = REASON_SPECTRUM
    elif r1pt is not None:
        reason = REASON_RANK_ONE
    else:
        reason = REASON_NORM_CONDITION

    cands: list[np.ndarray] = []
    if mset.contains_zero:
        cands.append(np.zeros(problem.n))
    if mset.particular is not None:
        rho = mset.radius if mset.radius is not None else 0.0
        if rho > 0.0 and mset.nullity:
            cands.append(mset.particular + rho * mset.basis[:, 0])
            if mset.nullity == 1:
                cands.append(mset.particular - rho * mset.basis[:, 0])
        else:
            cands.append(mset.particular)
    if r1pt is not None:
        cands.append(r1pt)
    representative: np.ndarray | None = None
    if cands:
        vals = [core.evaluate(problem, s) for s in cands]
        k = int(np.argmin(vals))
        mu_upper = float(vals[k])
        representative = cands[k]
    else:
        mu_upper = core.evaluate(problem, np.zeros(problem.n))

    condition_value = None
    if tight:
        z = mset.z_star if mset.z_star is not None else float(
            np.linalg.norm(representative)
        )
        condition_value = z * (problem.beta + 3.0 * problem.sigma * z)
        if condition_value < -1e-7 * (1.0 + z * z):
            diags.append(
                "solver-accuracy: tight verdict but the norm condition value "
                f"is {condition_value:.3e} at z = {z:.6g}"
            )
    if not tight:
        representative = None

    err_abs = abs(mu_upper - gamma)
    err_rel = err_abs / abs(mu_upper) if mu_upper != 0.0 else None
    return TightnessReport(
        gamma_star=gamma,
        theta_star=theta,
        mu_upper=mu_upper,
        err_abs=err_abs,
        err_rel=err_rel,
        tight=tight,
        reason=reason,
        condition_value=condition_value,
        minimizers=mset,
        representative=representative,
        rank_one=r1pt is not None,
        diagnostics=tuple(diags),
    )


# ------------------------------------------------------------ orchestration

def certify(
    problem: CqrProblem,
    solution: SdpSolution,
    tol_rank: float = 1e-7,
    tol_root: float = 1e-6,
    tol_membership: float = 1e-6,
    tol_value: float = 1e-5,
) -> tuple[Certificate, TightnessReport]:
    """Full extraction chain: factor the dual, solve the root system, classify.

    Every candidate component must also pass the value test
    |M(s) - gamma| <= tol_value * (1 + |M(s)| + |gamma|) at a concrete
    member: the root intersection works in coefficient space, where
    conditioning is poor, while the value test is exact arithmetic on the
    model itself, so components failing it are discarded as spurious rather
    than reported as minimizers.
    """
    if problem.W is not None:
        raise InputError(
            "certify expects a plain problem; apply the weight transform first"
        )
    cert = factor_dual(solution.s, tol_rank)
    gamma = float(solution.gamma)
    diags: list[str] = []

    def on_level(s: np.ndarray) -> bool:
        v = core.evaluate(problem, s)
        return abs(v - gamma) <= tol_value * (1.0 + abs(v) + abs(gamma))

    zero_in = zero_membership(cert, tol_membership)
    if zero_in and not on_level(np.zeros(problem.n)):
        diags.append(
            "origin passed the certificate test but not the value test; dropped"
        )
        zero_in = False

    roots = common_roots(cert, tol_root)
    components: list[MinimizerSet] = []
    if roots is None:
        # No norm constraint at all: the minimizers are the whole affine
        # solution set of the big factor.
        rs = cert.R[:, 1:]
        shat = min_norm_solve(rs, -cert.R[:, 0])
        if shat is not None and on_level(shat):
            components.append(
                MinimizerSet(
                    dim=problem.n,
                    contains_zero=zero_in,
                    particular=shat,
                    basis=nullspace(rs).basis,
                    norm_free=True,
                )
            )
    else:
        for z in roots:
            if z <= tol_root:
                continue  # the origin branch belongs to zero_membership
            # sqrt scale: the root and the affine solution each sit ~sqrt(gap)
            # off in degenerate directions, so demanding agreement at the raw
            # tolerance would reject genuine singletons; on_level still gates.
            sol = solve_sphere_affine(cert, z, float(np.sqrt(tol_root)))
            if sol is not None and on_level(_component_rep(sol)):
                components.append(sol)
        if len(components) > 1:
            diags.append(
                "ambiguous z*: several common roots admit solutions ("
                + ", ".join(f"{c.z_star:.6g}" for c in components)
                + "); keeping the best value"
            )
            components.sort(
                key=lambda c: core.evaluate(problem, _component_rep(c))
            )
            components = components[:1]
    if components:
        mset = replace(components[0], contains_zero=zero_in)
    else:
        mset = MinimizerSet(dim=problem.n, contains_zero=zero_in)
    report = classify(
        problem, solution, cert, mset, tol_rank=tol_rank, diagnostics=tuple(diags)
    )
    return cert, report
