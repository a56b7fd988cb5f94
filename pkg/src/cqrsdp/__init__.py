"""cqrsdp: certified global minimization of cubic-quartic regularized models.

Minimizes  M(s) = f0 + g's + (1/2) s'Hs + (beta/6)||s||_W^3 + (sigma/4)||s||_W^4
over R^n by solving a tight semidefinite relaxation with a built-in
structure-exploiting interior-point method, then extracting the full set of
global minimizers from the optimal certificate (or refuting tightness).

Entry points:
    solve()            -- full pipeline on a CqrProblem
    CqrProblem         -- problem container (core)
    load_problem()     -- problem-file parser (probfile)
    command line       -- `cqrsdp solve|check|bench|oracle ...`
"""

from .core import (
    CqrProblem,
    b_matrix,
    bounded_below,
    condition_value,
    evaluate,
    eval_bundle,
    gradient,
    hessian,
    norm_w,
)
from .errors import (
    CertificateInconsistencyError,
    CqrError,
    DomainError,
    IllConditionedError,
    InputError,
    MaxIterationsError,
    NumericalError,
    OracleLimitError,
    ParseError,
    RankAnomalyError,
    UnboundedBelowError,
)
__version__ = "0.1.0"

_LAZY = {
    "solve": ("pipeline", "solve"),
    "SolveOutcome": ("pipeline", "SolveOutcome"),
    "load_problem": ("probfile", "load"),
    "loads_problem": ("probfile", "loads"),
}


def __getattr__(name):
    # High-level API is imported lazily to keep `import cqrsdp` light and
    # to let the submodules import each other without cycles.
    if name in _LAZY:
        import importlib

        mod, attr = _LAZY[name]
        return getattr(importlib.import_module(f".{mod}", __name__), attr)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "CqrProblem",
    "SolveOutcome",
    "solve",
    "load_problem",
    "loads_problem",
    "evaluate",
    "gradient",
    "hessian",
    "b_matrix",
    "eval_bundle",
    "norm_w",
    "bounded_below",
    "condition_value",
    "CqrError",
    "InputError",
    "ParseError",
    "DomainError",
    "UnboundedBelowError",
    "NumericalError",
    "MaxIterationsError",
    "IllConditionedError",
    "RankAnomalyError",
    "CertificateInconsistencyError",
    "OracleLimitError",
    "__version__",
]
