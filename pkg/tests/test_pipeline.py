"""End-to-end solve pipeline: gating, weighting, polish, refinement, salvage."""

import numpy as np
import pytest

from conftest import BUILDERS, random_problem

from cqrsdp import core, oracle, pipeline
from cqrsdp.errors import MaxIterationsError, UnboundedBelowError


# ------------------------------------------------------------------ gating

def test_unbounded_below_is_rejected_up_front():
    p = core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=-np.eye(2), beta=0.0, sigma=0.0
    )
    with pytest.raises(UnboundedBelowError):
        pipeline.solve(p)


def test_non_salvageable_failure_reraises():
    p = BUILDERS["unique-point-n3"]()
    with pytest.raises(MaxIterationsError):
        pipeline.solve(p, max_iters=4)


def test_salvage_from_stalled_solver():
    # an unreachable gap tolerance stalls the solver essentially at the
    # optimum; the pipeline certifies from the best iterate and says so
    p = BUILDERS["unique-point-n3"]()
    out = pipeline.solve(p, tol_gap=1e-16, tol_feas=1e-16)
    assert out.solution.stats.status != "optimal"
    assert any(d.startswith("solver stopped early") for d in out.report.diagnostics)
    assert out.report.tight
    assert out.report.gamma_star == pytest.approx(-1281.59, abs=2.0)


# ------------------------------------------------------------------ polish

def test_polish_newton_reaches_stationarity():
    # value-guarded descent: accuracy bottoms out where the model value's
    # floating-point noise (~eps * |f0| here) drowns further improvement
    p = BUILDERS["gap-two-minima"]()
    s = pipeline.polish_newton(p, np.array([1.003]))
    assert np.linalg.norm(core.gradient(p, s)) < 1e-7
    assert s[0] == pytest.approx(1.0, abs=1e-7)


def test_polish_newton_never_moves_uphill():
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = random_problem(rng, 4, beta=-5.0)
        s0 = rng.standard_normal(4)
        s = pipeline.polish_newton(p, s0)
        assert core.evaluate(p, s) <= core.evaluate(p, s0) + 1e-12


def test_polish_handles_singular_curvature_direction():
    # at a norm-degenerate minimizer B(r*) s* = 0, so the Newton matrix is
    # singular along s* before the quartic rank-one term restores it
    p = BUILDERS["two-point-set-n10"]()
    out = pipeline.solve(p)
    rep = out.report.representative
    v = np.array([(-1.0) ** (k + 1) for k in range(10)]) / np.sqrt(10.0)
    assert min(np.linalg.norm(rep - v), np.linalg.norm(rep + v)) < 1e-8


def test_polish_false_keeps_raw_solver_values(solved):
    out = solved("unique-point-n3", polish=False)
    assert not out.polished
    assert out.report.gamma_star == out.solution.gamma
    assert out.verification is not None  # still audited, just not moved


# -------------------------------------------------------------- refinement

def test_refinement_replaces_gamma_with_model_value(solved):
    out = solved("unique-point-n3")
    assert out.polished
    rep = out.report.representative
    # the refined gamma IS the model value at the verified minimizer
    assert out.report.gamma_star == core.evaluate(out.problem, rep)
    assert out.verification.passed
    # and agrees with the independent global oracle far beyond solver accuracy
    mu = oracle.solve_1d(out.problem).mu
    assert out.report.gamma_star == pytest.approx(mu, abs=1e-7)


def test_err_abs_measures_extraction_not_polish(solved):
    out = solved("unique-point-n3")
    r = out.report
    assert r.err_abs == abs(r.mu_upper - r.gamma_star)
    assert r.err_abs < 1e-4 * (1.0 + abs(r.mu_upper))


def test_origin_minimizer_is_refined_exactly(solved):
    out = solved("origin-only")
    assert out.polished
    assert out.report.gamma_star == 0.0  # M(0) = f0 exactly
    assert out.verification.passed
    assert np.all(out.report.representative == 0.0)


def test_not_tight_outcome_has_no_representative(solved):
    out = solved("gap-scalar")
    assert not out.report.tight
    assert out.report.representative is None
    assert out.representative_original is None
    assert out.verification is None
    assert not out.polished


# ----------------------------------------------------------------- weights

def test_identity_transform_without_weight(solved):
    out = solved("unique-point-n3")
    assert np.array_equal(out.transform, np.eye(3))
    x = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(out.to_original(x), x)


def test_weighted_problem_maps_back_to_input_coordinates():
    # H = 8 W makes the weight-normalized problem exactly the plain
    # origin-plus-sphere instance: minimizers are 0 and the W'-norm-2 sphere
    W = np.array([[4.0, 0.0], [0.0, 1.0]])
    pw = core.CqrProblem(
        f0=0.0, g=np.zeros(2), H=8.0 * W, beta=-24.0, sigma=4.0, W=W
    )
    out = pipeline.solve(pw)
    r = out.report
    assert r.tight
    ms = r.minimizers
    assert ms.contains_zero
    assert ms.z_star == pytest.approx(2.0, abs=1e-3)
    assert np.allclose(out.transform, np.diag([0.5, 1.0]))
    # a sphere member, mapped back, has weighted norm z_star (not Euclidean)
    member = ms.particular + ms.radius * ms.basis[:, 0]
    back = out.to_original(member)
    assert core.norm_w(pw, back) == pytest.approx(ms.z_star, abs=1e-9)


def test_weighted_solve_matches_hand_transformed_plain():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((3, 3))
    W = a @ a.T + 3.0 * np.eye(3)
    p = random_problem(rng, 3, beta=-6.0)
    pw = core.CqrProblem(f0=p.f0, g=p.g, H=p.H, beta=p.beta, sigma=p.sigma, W=W)
    plain, tmap = core.apply_w_transform(pw)
    out_w = pipeline.solve(pw)
    out_p = pipeline.solve(plain)
    assert out_w.report.gamma_star == pytest.approx(
        out_p.report.gamma_star, abs=1e-8
    )
    assert out_w.report.tight == out_p.report.tight
    if out_w.report.tight:
        rep_w = out_w.representative_original
        # mapped representative is a stationary point of the weighted model
        assert np.linalg.norm(core.gradient(pw, rep_w)) < 1e-6 * (
            1.0 + np.linalg.norm(pw.g)
        )


# --------------------------------------------------------- degenerate family

def test_norm_free_affine_family():
    # no cubic/quartic term and a singular PSD quadratic: the minimizers are
    # a whole affine line and the set must say so
    p = core.CqrProblem(
        f0=0.0, g=np.array([-2.0, 0.0]), H=np.diag([2.0, 0.0]),
        beta=0.0, sigma=0.0,
    )
    out = pipeline.solve(p)
    r = out.report
    assert r.tight
    ms = r.minimizers
    assert ms.norm_free
    assert ms.nullity == 1
    assert np.allclose(ms.particular, [1.0, 0.0], atol=1e-6)
    assert r.gamma_star == pytest.approx(-1.0, abs=1e-8)
    assert ms.finite_members() is None
    # every sampled member attains the optimum
    for s in ms.sample(20):
        assert core.evaluate(p, s) == pytest.approx(-1.0, abs=1e-7)


# ------------------------------------------------------------------- modes

def test_modes_agree_through_pipeline():
    rng = np.random.default_rng(21)
    p = random_problem(rng, 20, beta=-3.0)
    dense = pipeline.solve(p, mode="dense")
    eigen = pipeline.solve(p, mode="eigen")
    assert dense.report.gamma_star == pytest.approx(
        eigen.report.gamma_star, abs=1e-7 * (1.0 + abs(dense.report.gamma_star))
    )
    assert dense.report.tight == eigen.report.tight
