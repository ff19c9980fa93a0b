import numpy as np
import pytest

from fdopt import lipschitz, problems
from fdopt.lipschitz import (AdaptiveState, MWParams, adaptive_maybe_reestimate,
                             directional_curvature, estimate_component_lipschitz,
                             estimate_scheme, idealized_residual_lipschitz,
                             mw_estimate, scheme_directional_curvature,
                             second_difference, third_derivative_estimate)
from fdopt.noise import NoiseModel, NoisyOracle
from fdopt.problems import CapabilityError, ResidualProblem, SmoothProblem


def make_smooth(name, n, value, grad=None, quad=None):
    return SmoothProblem(name, n, np.zeros(n), value, grad, quad, None)


def sep_quad(a):
    a = np.asarray(a, dtype=float)

    def value(x):
        return 0.5 * float(a @ (x * x))

    def grad(x):
        return a * x

    def quad(x, p):
        return float(a @ (p * p))

    return SmoothProblem("SEPQ", a.size, np.zeros(a.size), value, grad, quad, 0.0)


def oracle_for(problem, sigma=0.0, seed=0):
    model = NoiseModel("uniform" if sigma > 0 else "none", sigma, seed)
    return NoisyOracle(problem, model)


# ---------------------------------------------------------------------------
# second differences and the probe-width search
# ---------------------------------------------------------------------------

def test_second_difference_quadratic_identity():
    oracle = oracle_for(sep_quad([4.0, 4.0]))
    p = np.array([1.0, 0.0])
    for t in (1e-3, 0.1, 1.0):
        delta = second_difference(oracle, np.zeros(2), p, t)
        assert delta / t ** 2 == pytest.approx(4.0, rel=1e-9)


def test_second_difference_cubic():
    prob = make_smooth("CUBE1", 1, lambda x: float(x[0] ** 3))
    oracle = oracle_for(prob)
    for t in (0.01, 0.5):
        delta = second_difference(oracle, np.array([1.0]), np.array([1.0]), t)
        assert delta == pytest.approx(6.0 * t ** 2, rel=1e-7)


def test_second_difference_affine_and_errors():
    prob = make_smooth("AFF", 2, lambda x: 3.0 * x[0] - x[1] + 2.0)
    oracle = oracle_for(prob)
    p = np.array([1.0, 0.0])
    assert second_difference(oracle, np.zeros(2), p, 0.5) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        second_difference(oracle, np.zeros(2), p, 0.0)
    with pytest.raises(ValueError):
        second_difference(oracle, np.zeros(2), 2.0 * p, 0.5)


def test_second_difference_eval_accounting():
    oracle = oracle_for(sep_quad([1.0]))
    before = oracle.eval_count
    second_difference(oracle, np.zeros(1), np.array([1.0]), 0.1)
    assert oracle.eval_count - before == 3
    before = oracle.eval_count
    second_difference(oracle, np.zeros(1), np.array([1.0]), 0.1, f0=0.0)
    assert oracle.eval_count - before == 2


def test_mw_estimate_recovers_quadratic_curvature():
    # probed away from the minimizer: the similarity guard compares function
    # changes against the function's own size, so it needs |f(x)| >> 0
    sigma = 1e-5
    oracle = oracle_for(sep_quad([4.0]), sigma=sigma, seed=3)
    out = mw_estimate(oracle, np.ones(1), np.array([1.0]), sigma)
    assert out.success
    assert out.value == pytest.approx(4.0, rel=0.10)
    # the recorded probe satisfies both guards exactly as stated
    params = MWParams()
    eps_f = sigma
    assert abs(out.delta) >= params.tau1 * eps_f
    assert abs(out.f_plus - out.f0) <= params.tau2 * max(abs(out.f0), abs(out.f_plus))
    assert abs(out.f_minus - out.f0) <= params.tau2 * max(abs(out.f0), abs(out.f_minus))
    assert out.value == max(0.1, abs(out.delta) / out.t ** 2)


def test_mw_estimate_fails_on_affine():
    # the second difference of an affine function is pure noise, so the
    # noise-dominance guard can never be met while the balance guard holds
    prob = make_smooth("AFF1", 1, lambda x: 2.0 * x[0] + 5.0)
    oracle = oracle_for(prob, sigma=1e-5, seed=1)
    out = mw_estimate(oracle, np.zeros(1), np.array([1.0]), 1e-5)
    assert not out.success
    assert out.value is None


def test_mw_failure_consumer_stores_floor():
    prob = make_smooth("AFF2", 2, lambda x: float(x[0] + x[1]))
    oracle = oracle_for(prob, sigma=1e-5, seed=2)
    est = estimate_component_lipschitz(oracle, np.zeros(2), 1e-5)
    assert np.all(est.values == 0.1)
    assert np.all(est.floor_applied)


def test_component_estimates_on_separable_quadratic():
    a = np.array([0.5, 2.0, 7.5])
    sigma = 1e-7
    oracle = oracle_for(sep_quad(a), sigma=sigma, seed=4)
    est = estimate_component_lipschitz(oracle, np.ones(3), sigma)
    for ai, vi in zip(a, est.values):
        assert vi == pytest.approx(max(0.1, ai), rel=0.10)
    assert est.evals_spent <= 3 * (2 * MWParams().max_iters + 1)
    assert est.evals_spent == oracle.eval_count


def test_component_estimate_quadratic_consistency():
    # high success rate over seeded repetitions
    a = np.array([0.2, 1.0, 5.0])
    sigma = 1e-5 * float(np.min(a))
    hits = 0
    for seed in range(100):
        oracle = oracle_for(sep_quad(a), sigma=sigma, seed=seed)
        est = estimate_component_lipschitz(oracle, np.ones(3), sigma)
        if np.all(np.abs(est.values - a) <= 0.10 * a):
            hits += 1
    assert hits >= 95


def test_floor_invariant_everywhere():
    rng = np.random.default_rng(0)
    for seed in range(5):
        a = 10.0 ** rng.uniform(-4, 2, size=3)
        oracle = oracle_for(sep_quad(a), sigma=1e-4, seed=seed)
        est = estimate_component_lipschitz(oracle, np.zeros(3), 1e-4)
        assert np.all(est.values >= 0.1)


def test_directional_curvature():
    est = lipschitz.LipschitzEstimate(np.array([3.0, 3.0]), "second", "t", 0, None)
    assert directional_curvature(est) == pytest.approx(3.0)
    est = lipschitz.LipschitzEstimate(np.array([3.0, 4.0]), "second", "t", 0, None)
    assert directional_curvature(est) == pytest.approx(5.0 / np.sqrt(2.0))
    est = lipschitz.LipschitzEstimate(np.array([7.0]), "second", "t", 0, None)
    assert directional_curvature(est) == pytest.approx(7.0)


def test_adaptive_reestimation_trigger():
    sigma = 1e-6
    oracle = oracle_for(sep_quad([2.0, 2.0]), sigma=sigma, seed=5)
    est = estimate_component_lipschitz(oracle, np.zeros(2), sigma)
    state = AdaptiveState(est, last_alpha=1.0)
    same = adaptive_maybe_reestimate(state, oracle, np.zeros(2), sigma)
    assert same.current is est

    state = AdaptiveState(est, last_alpha=0.5)
    same = adaptive_maybe_reestimate(state, oracle, np.zeros(2), sigma)
    assert same.current is est  # strict inequality at the threshold

    before = oracle.eval_count
    state = AdaptiveState(est, last_alpha=0.25)
    fresh = adaptive_maybe_reestimate(state, oracle, np.ones(2), sigma)
    assert fresh.current is not est
    assert oracle.eval_count > before
    assert fresh.current.evals_spent > est.evals_spent


# ---------------------------------------------------------------------------
# idealized schemes
# ---------------------------------------------------------------------------

def test_scheme_identity_hessian():
    prob = sep_quad(np.ones(3))
    for k in range(2, 10):
        est = estimate_scheme(k, prob, prob.x0)
        assert np.allclose(est.values, 1.0), k


def test_scheme_values_on_diagonal_hessian():
    prob = sep_quad([1.0, 2.0, 2.0])
    assert np.allclose(estimate_scheme(3, prob, prob.x0).values, 5.0 / 3.0)
    assert np.allclose(estimate_scheme(4, prob, prob.x0).values, np.sqrt(3.0))
    assert np.allclose(estimate_scheme(5, prob, prob.x0).values, [1.0, 2.0, 2.0])
    assert np.allclose(estimate_scheme(2, prob, prob.x0).values, 2.0)


def test_scheme_one_needs_nothing():
    prob = make_smooth("BARE", 4, lambda x: float(x @ x))
    est = estimate_scheme(1, prob, prob.x0)
    assert np.all(est.values == 1.0)
    with pytest.raises(CapabilityError):
        estimate_scheme(2, prob, prob.x0)


def test_scheme_mean_rms_max_ordering():
    rng = np.random.default_rng(9)
    for _ in range(20):
        diag = rng.uniform(-5, 5, size=6)
        prob = sep_quad(diag)
        mean_v = float(np.mean(np.abs(diag)))
        rms_v = float(np.sqrt(np.mean(diag ** 2)))
        max_v = float(np.max(np.abs(diag)))
        assert mean_v <= rms_v + 1e-12
        assert rms_v <= max_v + 1e-12
        # floored scheme outputs preserve the ordering
        s3 = estimate_scheme(3, prob, prob.x0).values[0]
        s4 = estimate_scheme(4, prob, prob.x0).values[0]
        s5 = np.max(estimate_scheme(5, prob, prob.x0).values)
        assert s3 <= s4 + 1e-12 <= s5 + 2e-12


def test_scheme_directional_variants():
    prob = sep_quad([1.0, 4.0])
    est5 = estimate_scheme(5, prob, prob.x0)
    assert scheme_directional_curvature(5, prob, prob.x0, np.array([1.0, 0.0]),
                                        est5) == pytest.approx(
        np.sqrt(17.0) / np.sqrt(2.0))
    est9 = estimate_scheme(9, prob, prob.x0)
    p = np.array([1.0, 1.0])
    assert scheme_directional_curvature(9, prob, prob.x0, p, est9) == \
        pytest.approx(5.0 / 2.0)
    assert scheme_directional_curvature(1, prob, prob.x0, p, None) == 1.0


def test_spectral_norm_estimate_nondiagonal():
    # symmetric 2x2 with eigenvalues 3 and 1
    def quad(x, p):
        return float(2.0 * p[0] ** 2 + 2.0 * p[0] * p[1] + 2.0 * p[1] ** 2)

    prob = make_smooth("SYM", 2, lambda x: 0.0, None, quad)
    assert lipschitz.spectral_norm_estimate(prob, np.zeros(2)) == pytest.approx(
        3.0, rel=1e-6)


def test_third_derivative_estimate():
    quadratic = sep_quad([5.0, 5.0])
    assert third_derivative_estimate(quadratic, np.zeros(2),
                                     np.array([1.0, 0.0])) == 0.1

    cubic = make_smooth("CUBIC", 1, lambda x: float(x[0] ** 3), None,
                        lambda x, p: float(6.0 * x[0] * p[0] ** 2))
    m = third_derivative_estimate(cubic, np.array([1.0]), np.array([2.0]))
    assert m == pytest.approx(6.0, rel=1e-6)

    expo = make_smooth("EXP", 1, lambda x: float(np.exp(x[0])), None,
                       lambda x, p: float(np.exp(x[0]) * p[0] ** 2))
    m = third_derivative_estimate(expo, np.zeros(1), np.array([1.0]))
    assert m == pytest.approx(1.0, rel=1e-6)

    with pytest.raises(CapabilityError):
        third_derivative_estimate(make_smooth("B", 1, lambda x: 0.0),
                                  np.zeros(1), np.ones(1))


def test_idealized_residual_lipschitz():
    affine = ResidualProblem("AFFR", 2, 2, np.zeros(2),
                             lambda x, i: float(x[i] + 1.0), None, None)
    L = idealized_residual_lipschitz(affine, np.zeros(2))
    assert np.allclose(L, 0.0, atol=1e-4)
    assert np.all(np.maximum(L, 0.1) == 0.1)

    square = ResidualProblem("SQR", 1, 1, np.zeros(1),
                             lambda x, i: float(x[0] ** 2), None, None)
    L = idealized_residual_lipschitz(square, np.zeros(1))
    assert L[0, 0] == pytest.approx(2.0, abs=1e-4)

    cube = ResidualProblem("CUBR", 1, 1, np.ones(1),
                           lambda x, i: float(x[0] ** 3), None, None)
    L = idealized_residual_lipschitz(cube, np.ones(1))
    assert L[0, 0] == pytest.approx(6.0, rel=1e-3)
