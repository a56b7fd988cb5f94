"""Model calculus: evaluation, derivatives, B-matrix, reductions."""

import numpy as np
import pytest

from conftest import fd_gradient, fd_hessian, gap_scalar, random_problem
from cqrsdp import core, oracle
from cqrsdp.errors import DomainError, InputError

# ------------------------------------------------------------ construction


def test_problem_validation():
    with pytest.raises(InputError):
        core.CqrProblem(f0=0.0, g=np.zeros(2), H=np.eye(3), beta=0.0, sigma=4.0)
    with pytest.raises(InputError):
        core.CqrProblem(f0=0.0, g=np.zeros(2), H=np.eye(2), beta=0.0, sigma=-1.0)
    with pytest.raises(InputError):
        core.CqrProblem(f0=np.nan, g=np.zeros(2), H=np.eye(2), beta=0.0, sigma=4.0)
    with pytest.raises(InputError):  # W must be positive definite
        core.CqrProblem(
            f0=0.0, g=np.zeros(2), H=np.eye(2), beta=0.0, sigma=4.0,
            W=np.array([[1.0, 2.0], [2.0, 1.0]]),
        )
    with pytest.raises(InputError):  # empty problem
        core.CqrProblem(f0=0.0, g=np.zeros(0), H=np.zeros((0, 0)), beta=0.0, sigma=4.0)


def test_problem_symmetrizes_h():
    p = core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=np.array([[1.0, 2.0], [0.0, 1.0]]),
        beta=0.0, sigma=4.0,
    )
    assert np.allclose(p.H, [[1.0, 1.0], [1.0, 1.0]])


# ---------------------------------------------------------------- evaluate


def test_evaluate_scalar_quartic_at_minimizer():
    assert core.evaluate(gap_scalar(), [1.0]) == pytest.approx(0.0, abs=1e-14)


def test_evaluate_at_origin_is_f0():
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = random_problem(rng, 3, beta=rng.standard_normal())
        p = core.CqrProblem(
            f0=float(rng.standard_normal()), g=p.g, H=p.H, beta=p.beta, sigma=p.sigma
        )
        assert core.evaluate(p, np.zeros(3)) == p.f0


def test_evaluate_hand_value():
    # 0 + 1 + 2 + (3/6)(2 sqrt 2) + 4 = 7 + sqrt 2
    p = core.CqrProblem(
        f0=0.0, g=np.array([1.0, 0.0]), H=2.0 * np.eye(2), beta=3.0, sigma=4.0
    )
    assert core.evaluate(p, [1.0, 1.0]) == pytest.approx(7.0 + np.sqrt(2.0), rel=1e-14)


def test_evaluate_dimension_mismatch():
    with pytest.raises(InputError):
        core.evaluate(gap_scalar(), [1.0, 2.0])


# ---------------------------------------------------------------- gradient


def test_gradient_zero_at_minimizer():
    assert core.gradient(gap_scalar(), [1.0])[0] == pytest.approx(0.0, abs=1e-13)


def test_gradient_at_origin_is_g():
    rng = np.random.default_rng(4)
    p = random_problem(rng, 4, beta=-2.0)
    assert np.array_equal(core.gradient(p, np.zeros(4)), p.g)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    p = random_problem(rng, 4, beta=1.5)
    s = rng.standard_normal(4)
    grad = core.gradient(p, s)
    approx = fd_gradient(p, s)
    assert np.linalg.norm(grad - approx) <= 1e-6 * (1.0 + np.linalg.norm(grad))


# ----------------------------------------------------------------- hessian


def test_hessian_direct_substitution():
    # beta = 0, sigma = 4, H = 2I, s = e1: 2I + 4(I + 2 e1 e1') = diag(14, 6)
    p = core.CqrProblem(f0=0.0, g=np.zeros(2), H=2.0 * np.eye(2), beta=0.0, sigma=4.0)
    assert np.allclose(core.hessian(p, [1.0, 0.0]), np.diag([14.0, 6.0]))


def test_hessian_zero_at_quartic_minimizer():
    # the scalar model is (s-1)^4 on s >= 0, so curvature vanishes at 1
    assert core.hessian(gap_scalar(), [1.0])[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_hessian_matches_finite_differences():
    rng = np.random.default_rng(6)
    p = random_problem(rng, 3, beta=-1.0)
    s = rng.standard_normal(3)
    s *= max(1.0, 0.3 / np.linalg.norm(s))  # keep away from the origin
    hess = core.hessian(p, s)
    approx = fd_hessian(p, s)
    assert np.abs(hess - approx).max() <= 1e-5 * (1.0 + np.abs(hess).max())


def test_hessian_refuses_origin_with_cubic_term():
    with pytest.raises(DomainError):
        core.hessian(gap_scalar(), [0.0])


def test_hessian_at_origin_without_cubic_term():
    p = core.CqrProblem(f0=0.0, g=np.zeros(2), H=2.0 * np.eye(2), beta=0.0, sigma=4.0)
    assert np.allclose(core.hessian(p, np.zeros(2)), p.H)


# ---------------------------------------------------------------- b_matrix


def test_b_matrix_at_zero_radius_is_h():
    rng = np.random.default_rng(7)
    p = random_problem(rng, 3, beta=5.0)
    assert np.array_equal(core.b_matrix(p, 0.0), p.H)


def test_b_matrix_scalar_stationarity():
    # H + ((beta/2) + sigma) = 12 - 12 + 4 = 4, and B(1) s* = -g at s* = 1.
    p = gap_scalar()
    b = core.b_matrix(p, 1.0)
    assert b[0, 0] == pytest.approx(4.0, abs=1e-14)
    assert np.allclose(b @ [1.0], -p.g)


def test_b_matrix_hand_value():
    p = core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=np.diag([-1.0, 2.0]), beta=4.0, sigma=0.0
    )
    assert np.allclose(core.b_matrix(p, 1.0), np.diag([1.0, 4.0]))


def test_b_matrix_rejects_negative_radius():
    with pytest.raises(InputError):
        core.b_matrix(gap_scalar(), -1.0)


def test_gradient_equals_g_plus_b_times_s():
    rng = np.random.default_rng(8)
    for _ in range(10):
        p = random_problem(rng, 4, beta=float(rng.standard_normal()))
        s = rng.standard_normal(4)
        expect = p.g + core.b_matrix(p, np.linalg.norm(s)) @ s
        assert np.allclose(core.gradient(p, s), expect, atol=1e-12)


# ------------------------------------------------------------------- norms


def test_norm_w_weighted():
    p = core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=np.eye(2), beta=0.0, sigma=4.0,
        W=np.diag([1.0, 4.0]),
    )
    assert core.norm_w(p, [3.0, 2.0]) == pytest.approx(5.0)
    assert core.norm_w(gap_scalar(), [-2.0]) == pytest.approx(2.0)


def test_orthogonal_invariance_of_evaluate():
    rng = np.random.default_rng(9)
    p = random_problem(rng, 4, beta=-3.0)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    rotated = core.CqrProblem(
        f0=p.f0, g=q @ p.g, H=q @ p.H @ q.T, beta=p.beta, sigma=p.sigma
    )
    for _ in range(10):
        s = rng.standard_normal(4)
        assert core.evaluate(rotated, q @ s) == pytest.approx(
            core.evaluate(p, s), rel=1e-12, abs=1e-12
        )


# ------------------------------------------------------------- w transform


def test_apply_w_transform_identity():
    p = gap_scalar()
    plain, t = core.apply_w_transform(p)
    assert plain is p and np.array_equal(t, np.eye(1))
    p_eye = core.CqrProblem(
        f0=0.0, g=np.ones(2), H=np.eye(2), beta=1.0, sigma=4.0, W=np.eye(2)
    )
    plain, t = core.apply_w_transform(p_eye)
    assert np.allclose(plain.g, p_eye.g) and np.allclose(plain.H, p_eye.H)
    assert np.allclose(t, np.eye(2))


def test_apply_w_transform_scalar():
    p = core.CqrProblem(
        f0=0.5, g=np.array([2.0]), H=np.array([[4.0]]), beta=3.0, sigma=4.0,
        W=np.array([[4.0]]),
    )
    plain, t = core.apply_w_transform(p)
    assert plain.g[0] == pytest.approx(1.0)
    assert plain.H[0, 0] == pytest.approx(1.0)
    assert t[0, 0] == pytest.approx(0.5)
    # weighted norm of a point equals the plain norm of its preimage
    s_t = np.array([3.0])
    assert core.norm_w(p, t @ s_t) == pytest.approx(np.linalg.norm(s_t))


def test_apply_w_transform_round_trip():
    rng = np.random.default_rng(10)
    a = rng.standard_normal((3, 3))
    w = a @ a.T + 3.0 * np.eye(3)
    p = core.CqrProblem(
        f0=1.0, g=rng.standard_normal(3), H=rng.standard_normal((3, 3)),
        beta=-2.0, sigma=4.0, W=w,
    )
    plain, t = core.apply_w_transform(p)
    assert plain.W is None
    for _ in range(10):
        s_t = rng.standard_normal(3)
        v1 = core.evaluate(plain, s_t)
        v2 = core.evaluate(p, t @ s_t)
        assert abs(v1 - v2) <= 1e-10 * (1.0 + abs(v1))


# --------------------------------------------------------- sigma rescaling


def test_normalize_sigma_identity():
    p = gap_scalar()
    scaled, alpha, applied = core.normalize_sigma(p)
    assert scaled is p and alpha == 1.0 and applied


def test_normalize_sigma_hand_scaling():
    p = core.CqrProblem(
        f0=2.0, g=np.array([1.0]), H=np.array([[8.0]]), beta=16.0, sigma=64.0
    )
    scaled, alpha, applied = core.normalize_sigma(p)
    assert applied and alpha == pytest.approx(0.5)
    assert scaled.sigma == 4.0
    assert scaled.f0 == p.f0
    assert scaled.g[0] == pytest.approx(0.5)      # g / 2
    assert scaled.H[0, 0] == pytest.approx(2.0)   # H / 4
    assert scaled.beta == pytest.approx(2.0)      # beta / 8


def test_normalize_sigma_zero_flag():
    p = core.CqrProblem(f0=0.0, g=np.zeros(2), H=np.eye(2), beta=3.0, sigma=0.0)
    scaled, alpha, applied = core.normalize_sigma(p)
    assert scaled is p and alpha == 1.0 and not applied


def test_normalize_sigma_round_trip_values():
    rng = np.random.default_rng(11)
    p = random_problem(rng, 3, beta=-1.0, sigma=1.0)
    scaled, alpha, applied = core.normalize_sigma(p)
    assert applied
    for _ in range(10):
        s_t = rng.standard_normal(3)
        v1 = core.evaluate(scaled, s_t)
        v2 = core.evaluate(p, alpha * s_t)
        assert abs(v1 - v2) <= 1e-10 * (1.0 + abs(v1))


def test_normalize_sigma_preserves_oracle_minimum():
    rng = np.random.default_rng(12)
    p = random_problem(rng, 3, beta=-2.0, sigma=1.0)
    scaled, _, _ = core.normalize_sigma(p)
    mu1 = oracle.solve_1d(p).mu
    mu2 = oracle.solve_1d(scaled).mu
    assert mu1 == pytest.approx(mu2, abs=1e-8)


# ------------------------------------------------------------- boundedness


@pytest.mark.parametrize(
    "beta,sigma,hdiag,expected",
    [
        (-100.0, 4.0, [1.0, 1.0], True),    # quartic dominates
        (2.0, 0.0, [-1.0, -1.0], True),     # positive cubic dominates
        (-1.0, 0.0, [5.0, 5.0], False),     # negative cubic dominates
        (0.0, 0.0, [1.0, 2.0], True),       # strictly convex quadratic
        (0.0, 0.0, [-1.0, 1.0], False),     # indefinite quadratic
    ],
)
def test_bounded_below_cases(beta, sigma, hdiag, expected):
    p = core.CqrProblem(
        f0=0.0, g=np.ones(2), H=np.diag(hdiag), beta=beta, sigma=sigma
    )
    assert core.bounded_below(p) is expected


def test_bounded_below_singular_quadratic_needs_orthogonal_g():
    h = np.diag([1.0, 0.0])
    ok = core.CqrProblem(f0=0.0, g=np.array([1.0, 0.0]), H=h, beta=0.0, sigma=0.0)
    bad = core.CqrProblem(f0=0.0, g=np.array([0.0, 1.0]), H=h, beta=0.0, sigma=0.0)
    assert core.bounded_below(ok)
    assert not core.bounded_below(bad)


# --------------------------------------------------------- norm condition


def test_condition_value_and_holds():
    p = gap_scalar()  # beta = -24, sigma = 4
    assert core.condition_value(p, 1.0) == pytest.approx(-12.0)
    assert core.condition_value(p, 2.0) == pytest.approx(0.0)
    assert not core.condition_holds(p, 1.0)
    assert core.condition_holds(p, 2.0, tol=1e-12)
    assert core.condition_holds(p, 0.0)  # the origin is always allowed
