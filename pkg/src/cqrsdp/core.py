"""Problem container and closed-form calculus for the cubic-quartic model.

The model function is

    M(s) = f0 + g's + (1/2) s'Hs + (beta/6) ||s||_W^3 + (sigma/4) ||s||_W^4

with ||s||_W = sqrt(s'Ws) and W = I unless an explicit symmetric positive
definite weight is attached.  sigma must be >= 0; beta and the spectrum of H
are unrestricted, which is what makes the global problem interesting.

Everything here is exact closed-form algebra: evaluation, gradient, Hessian,
the shifted matrix B(s) whose PSD-ness certifies global optimality, the
W -> I change of variables, and the scaling that normalizes sigma to 4.
The only non-smooth point is the origin: the cubic term is C^1 there but not
C^2 when beta != 0, so `hessian` refuses that input instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, InputError

__all__ = [
    "CqrProblem",
    "EvalBundle",
    "evaluate",
    "gradient",
    "hessian",
    "b_matrix",
    "eval_bundle",
    "norm_w",
    "bounded_below",
    "apply_w_transform",
    "normalize_sigma",
    "condition_value",
    "condition_holds",
]

def _as_sym(a, name: str) -> np.ndarray:
    # Only the symmetric part enters the model, so symmetrize on ingest
    # rather than rejecting near-symmetric data.
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be a square matrix, got shape {m.shape}")
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class CqrProblem:
    """Immutable problem data (f0, g, H, beta, sigma, optional W)."""

    f0: float
    g: np.ndarray
    H: np.ndarray
    beta: float
    sigma: float
    W: np.ndarray | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if g.ndim != 1:
            raise InputError(f"g must be a vector, got shape {g.shape}")
        if g.shape[0] == 0:
            raise InputError("problem dimension must be at least 1")
        H = _as_sym(self.H, "H")
        if H.shape[0] != g.shape[0]:
            raise InputError(
                f"dimension mismatch: g has n={g.shape[0]} but H is {H.shape}"
            )
        if not np.isfinite(g).all() or not np.isfinite(H).all():
            raise InputError("g and H must be finite")
        f0 = float(self.f0)
        beta = float(self.beta)
        sigma = float(self.sigma)
        if not (np.isfinite(f0) and np.isfinite(beta) and np.isfinite(sigma)):
            raise InputError("f0, beta, sigma must be finite")
        if sigma < 0:
            raise InputError(f"sigma must be >= 0, got {sigma}")
        W = self.W
        if W is not None:
            W = _as_sym(W, "W")
            if W.shape != H.shape:
                raise InputError(f"W has shape {W.shape}, expected {H.shape}")
            # Positive definiteness is required for the norm to be a norm.
            try:
                np.linalg.cholesky(W)
            except np.linalg.LinAlgError:
                raise InputError("W must be positive definite") from None
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def has_weight(self) -> bool:
        return self.W is not None

    def with_name(self, name: str) -> "CqrProblem":
        return replace(self, name=name)


def _check_point(problem: CqrProblem, s) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.shape != (problem.n,):
        raise InputError(f"point has shape {s.shape}, expected ({problem.n},)")
    return s


def norm_w(problem: CqrProblem, s) -> float:
    """||s||_W (plain Euclidean norm when no weight is attached)."""
    s = _check_point(problem, s)
    if problem.W is None:
        return float(np.linalg.norm(s))
    return float(np.sqrt(max(0.0, s @ problem.W @ s)))


def evaluate(problem: CqrProblem, s) -> float:
    s = _check_point(problem, s)
    r = norm_w(problem, s)
    quad = problem.f0 + problem.g @ s + 0.5 * (s @ problem.H @ s)
    return float(quad + (problem.beta / 6.0) * r**3 + (problem.sigma / 4.0) * r**4)


def b_matrix(problem: CqrProblem, r) -> np.ndarray:
    """B(r) = H + ((beta/2) r + sigma r^2) W for a candidate norm r = ||s||_W.

    The stationarity system is B(||s||_W) s = -g, and global minimizers are
    exactly the stationary points where B is positive semidefinite.
    """
    r = float(r)
    if r < 0.0:
        raise InputError(f"b_matrix needs a nonnegative radius, got {r}")
    shift = 0.5 * problem.beta * r + problem.sigma * r * r
    W = problem.W if problem.W is not None else np.eye(problem.n)
    return problem.H + shift * W


def gradient(problem: CqrProblem, s) -> np.ndarray:
    """grad M(s) = g + B(||s||_W) s; continuous at 0 with value g."""
    s = _check_point(problem, s)
    return problem.g + b_matrix(problem, norm_w(problem, s)) @ s


def hessian(problem: CqrProblem, s) -> np.ndarray:
    """Exact Hessian away from the origin.

    hess M(s) = B(||s||_W) + (beta/(2||s||_W) + 2 sigma) (Ws)(Ws)'.
    At s = 0 the cubic term is not twice differentiable unless beta = 0.
    """
    s = _check_point(problem, s)
    r = norm_w(problem, s)
    if r == 0.0:
        if problem.beta != 0.0:
            raise DomainError(
                "Hessian is undefined at the origin when beta != 0 "
                "(the cubic term is only C^1 there)"
            )
        return problem.H.copy()
    ws = problem.W @ s if problem.W is not None else s
    coef = 0.5 * problem.beta / r + 2.0 * problem.sigma
    return b_matrix(problem, r) + coef * np.outer(ws, ws)


@dataclass(frozen=True)
class EvalBundle:
    value: float
    grad: np.ndarray
    norm: float
    b: np.ndarray


def eval_bundle(problem: CqrProblem, s) -> EvalBundle:
    """Value, gradient, W-norm and B(s) with the norm computed once."""
    s = _check_point(problem, s)
    r = norm_w(problem, s)
    quad = problem.f0 + problem.g @ s + 0.5 * (s @ problem.H @ s)
    value = float(quad + (problem.beta / 6.0) * r**3 + (problem.sigma / 4.0) * r**4)
    shift = 0.5 * problem.beta * r + problem.sigma * r * r
    W = problem.W if problem.W is not None else np.eye(problem.n)
    b = problem.H + shift * W
    return EvalBundle(value=value, grad=problem.g + b @ s, norm=r, b=b)


def bounded_below(problem: CqrProblem) -> bool:
    """Whether inf M > -inf.

    True iff sigma > 0, or sigma = 0 and beta > 0, or sigma = beta = 0 and
    H is positive definite (pure strictly-convex quadratic).
    """
    if problem.sigma > 0:
        return True
    if problem.beta > 0:
        return True
    if problem.beta < 0:
        return False
    # Pure quadratic: bounded iff H is PSD and g is orthogonal to ker H.
    w, v = np.linalg.eigh(problem.H)
    tol = 1e-12 * max(1.0, float(np.abs(w).max(initial=0.0)))
    if w[0] < -tol:
        return False
    ker = v[:, np.abs(w) <= tol]
    return bool(
        np.linalg.norm(ker.T @ problem.g) <= 1e-12 * (1 + np.linalg.norm(problem.g))
    )


def apply_w_transform(problem: CqrProblem) -> tuple[CqrProblem, np.ndarray]:
    """Change variables s = T s~ with T = W^{-1/2} so the weight becomes I.

    Returns (plain problem, T).  Model values are preserved pointwise:
    M~(s~) = M(T s~), and minimizers map back through s = T s~.
    """
    if problem.W is None:
        return problem, np.eye(problem.n)
    w, v = np.linalg.eigh(problem.W)
    if w[0] <= 0:
        raise InputError("W must be positive definite")
    t = (v / np.sqrt(w)) @ v.T  # W^{-1/2}, symmetric
    plain = CqrProblem(
        f0=problem.f0,
        g=t @ problem.g,
        H=t @ problem.H @ t,
        beta=problem.beta,
        sigma=problem.sigma,
        W=None,
        name=problem.name,
    )
    return plain, t


def normalize_sigma(
    problem: CqrProblem, target: float = 4.0
) -> tuple[CqrProblem, float, bool]:
    """Rescale variables s = alpha s~ so the quartic coefficient becomes `target`.

    Returns (scaled problem, alpha, applied) with alpha = (target/sigma)^(1/4);
    model values are preserved pointwise and minimizers map back via
    s = alpha s~.  With sigma = 0 the rescaling does not apply: the problem is
    returned unchanged with alpha = 1 and applied = False.  Negative sigma is
    rejected, as is a weighted problem (reduce W to the identity first).
    """
    if problem.sigma < 0:
        raise InputError("normalize_sigma requires sigma >= 0")
    if problem.W is not None:
        raise InputError("normalize_sigma expects a plain (W = I) problem")
    if problem.sigma == 0.0:
        return problem, 1.0, False
    if problem.sigma == target:
        return problem, 1.0, True
    alpha = float((target / problem.sigma) ** 0.25)
    scaled = CqrProblem(
        f0=problem.f0,
        g=alpha * problem.g,
        H=(alpha * alpha) * problem.H,
        beta=(alpha**3) * problem.beta,
        sigma=target,
        W=None,
        name=problem.name,
    )
    return scaled, alpha, True


def condition_value(problem: CqrProblem, r: float) -> float:
    """beta + 3 sigma r for a candidate norm r >= 0.

    The relaxation solved by this package is tight exactly when some global
    minimizer s* has r (beta + 3 sigma r) >= 0 at r = ||s*||_W, i.e. when
    r = 0 or this value is nonnegative.
    """
    return problem.beta + 3.0 * problem.sigma * float(r)


def condition_holds(problem: CqrProblem, r: float, tol: float = 0.0) -> bool:
    """Tightness condition at candidate norm r: r = 0 or beta + 3 sigma r >= -tol."""
    r = float(r)
    return r == 0.0 or condition_value(problem, r) >= -tol
