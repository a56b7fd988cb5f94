"""Shared fixtures: the frozen reference problems and cached solves.

The eight reference problems mirror the bundled problem files exactly (see
test_probfile.test_bundled_files_match_builders) but are built from literals
here so the module tests do not depend on the parser.

Solving the relaxation is the expensive step, so module tests share one
pipeline solve per problem through the session-scoped `solved` fixture.  The
acceptance tests do their own fresh solves because they also time them.
"""

from __future__ import annotations

import numpy as np
import pytest

from cqrsdp import core, pipeline

# --------------------------------------------------------------- problems


def gap_scalar() -> core.CqrProblem:
    # (1 - s)^4 expanded for s >= 0: unique minimizer 1, value 0, but the
    # relaxation bound is -1 (not tight).
    return core.CqrProblem(
        f0=1.0, g=np.array([-4.0]), H=np.array([[12.0]]), beta=-24.0, sigma=4.0,
        name="gap-scalar",
    )


def gap_two_minima() -> core.CqrProblem:
    # (s - 1)^2 (s - 2)^2 for s >= 0: two minimizers with distinct nonzero
    # norms, hence a relaxation gap; bound is -5.
    return core.CqrProblem(
        f0=4.0, g=np.array([-12.0]), H=np.array([[26.0]]), beta=-36.0, sigma=4.0,
        name="gap-two-minima",
    )


def origin_only() -> core.CqrProblem:
    # Radial model r^4 - r^3 + r^2: origin is the unique global minimizer.
    return core.CqrProblem(
        f0=0.0, g=np.zeros(3), H=2.0 * np.eye(3), beta=-6.0, sigma=4.0,
        name="origin-only",
    )


def origin_plus_sphere() -> core.CqrProblem:
    # Radial double well r^4 - 4 r^3 + 4 r^2 = r^2 (r - 2)^2: minimizers are
    # the origin plus the whole sphere of radius 2, both at value 0.
    return core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=8.0 * np.eye(2), beta=-24.0, sigma=4.0,
        name="origin-plus-sphere",
    )


def two_point_n10() -> core.CqrProblem:
    # Indefinite quadratic with zero cubic term: exactly two antipodal
    # minimizers +-(1/sqrt(10)) (-1, 1, ..., -1, 1) of norm 1; the
    # certificate's big factor has corank 1.
    n = 10
    h = np.zeros((n, n))
    h[0, 0] = 14.0
    w = np.array([2.0 * (-1.0) ** (k + 1) for k in range(1, n)])  # 2, -2, ...
    h[0, 1:] = w
    h[1:, 0] = w
    h[1:, 1:] = -2.0 * np.eye(n - 1)
    return core.CqrProblem(
        f0=0.0, g=np.zeros(n), H=h, beta=0.0, sigma=4.0,
        name="two-point-set-n10",
    )


def sphere_nullity4_n5() -> core.CqrProblem:
    # All-ones coupling minus 6I: a 4-dimensional sphere of minimizers.
    h = np.ones((5, 5)) - 6.0 * np.eye(5)
    return core.CqrProblem(
        f0=0.0, g=np.zeros(5), H=h, beta=-6.0, sigma=4.0,
        name="sphere-nullity4-n5",
    )


def unique_point_n3() -> core.CqrProblem:
    # Strongly negative cubic weight; unique minimizer found by the
    # rank-one moment shortcut.
    h = np.array([[-5.0, 1.0, 0.0], [1.0, -4.0, 2.0], [0.0, 2.0, -6.0]])
    return core.CqrProblem(
        f0=0.0, g=np.array([1.0, 2.0, 3.0]), H=h, beta=-60.0, sigma=4.0,
        name="unique-point-n3",
    )


def negative_beta_n5() -> core.CqrProblem:
    h = np.array(
        [
            [-4.0, -2.0, -1.0, -3.0, 0.0],
            [-2.0, 0.0, 1.0, -2.0, -1.0],
            [-1.0, 1.0, -2.0, 0.0, -2.0],
            [-3.0, -2.0, 0.0, -3.0, -1.0],
            [0.0, -1.0, -2.0, -1.0, -1.0],
        ]
    )
    return core.CqrProblem(
        f0=0.0, g=2.0 * np.ones(5), H=h, beta=-30.0, sigma=4.0,
        name="negative-beta-n5",
    )


BUILDERS = {
    "gap-scalar": gap_scalar,
    "gap-two-minima": gap_two_minima,
    "origin-only": origin_only,
    "origin-plus-sphere": origin_plus_sphere,
    "two-point-set-n10": two_point_n10,
    "sphere-nullity4-n5": sphere_nullity4_n5,
    "unique-point-n3": unique_point_n3,
    "negative-beta-n5": negative_beta_n5,
}


def random_problem(rng: np.random.Generator, n: int, beta: float,
                   sigma: float = 4.0, f0: float = 0.0) -> core.CqrProblem:
    """Standard-normal g and symmetrized H, like the benchmark generator."""
    h1 = rng.standard_normal((n, n))
    return core.CqrProblem(
        f0=f0, g=rng.standard_normal(n), H=0.5 * (h1 + h1.T),
        beta=beta, sigma=sigma,
    )


# --------------------------------------------------------------- fixtures


@pytest.fixture(scope="session")
def solved():
    """Cached pipeline solves, keyed by reference-problem name."""
    cache: dict = {}

    def get(name: str, **kw) -> pipeline.SolveOutcome:
        key = (name, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = pipeline.solve(BUILDERS[name](), **kw)
        return cache[key]

    return get


# ------------------------------------------------------ numerical helpers


def fd_gradient(problem: core.CqrProblem, s: np.ndarray) -> np.ndarray:
    """Central finite differences of evaluate, step 1e-5 * (1 + ||s||)."""
    s = np.asarray(s, dtype=float)
    h = 1e-5 * (1.0 + float(np.linalg.norm(s)))
    out = np.zeros_like(s)
    for i in range(s.size):
        e = np.zeros_like(s)
        e[i] = h
        out[i] = (core.evaluate(problem, s + e) - core.evaluate(problem, s - e)) / (2 * h)
    return out


def fd_hessian(problem: core.CqrProblem, s: np.ndarray) -> np.ndarray:
    """Central finite differences of the gradient."""
    s = np.asarray(s, dtype=float)
    h = 1e-6 * (1.0 + float(np.linalg.norm(s)))
    cols = []
    for i in range(s.size):
        e = np.zeros_like(s)
        e[i] = h
        cols.append((core.gradient(problem, s + e) - core.gradient(problem, s - e)) / (2 * h))
    m = np.column_stack(cols)
    return 0.5 * (m + m.T)


def rel_err(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    return float(np.linalg.norm(a - b)) / scale
