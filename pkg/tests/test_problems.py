import numpy as np
import pytest

from fdopt import problems
from fdopt.problems import evaluate, residual_objective

EPS = 2.0 ** -52

REQUIRED_SMOOTH = ["ROSENBR", "CUBE", "DENSCHNE", "HELIX", "BARD", "BOX3D",
                   "POWELLSG", "FREUROTH", "TRIDIA", "DQRTIC", "ARWHEAD",
                   "NONDIA", "ENGVAL1", "SINEVAL", "BRKMCC"]
REQUIRED_RESIDUAL = ["ROSENBR", "HELIX", "BARD", "BOX3D", "POWELLSG",
                     "BROWNDEN", "KOWOSB", "BROWNAL"]


def test_catalog_contents():
    smooth = {p.name: p for p in problems.smooth_catalog()}
    residual = {p.name: p for p in problems.residual_catalog()}
    assert len(smooth) >= 15
    assert len(residual) >= 8
    for name in REQUIRED_SMOOTH:
        assert name in smooth
    for name in REQUIRED_RESIDUAL:
        assert name in residual
    assert smooth["CUBE"].n == 2
    assert smooth["DENSCHNE"].n == 3
    assert smooth["FREUROTH"].n == 2
    assert smooth["TRIDIA"].n == 10
    assert smooth["DQRTIC"].n == 10
    assert smooth["ARWHEAD"].n == 100
    assert smooth["NONDIA"].n == 10
    assert smooth["ENGVAL1"].n == 2
    assert residual["BROWNAL"].n == 10


def test_lookup():
    entry = problems.find("DENSCHNE", "smooth")
    assert entry.problem.n == 3
    assert np.allclose(entry.problem.x0, [2.0, 3.0, -8.0])
    entry = problems.find("ROSENBR", "residual")
    assert (entry.problem.n, entry.problem.m) == (2, 2)
    assert problems.find("NO_SUCH_PROBLEM") is None


def test_evaluate_rosenbrock():
    p = problems.find("ROSENBR", "smooth").problem
    assert evaluate(p, [1.0, 1.0]) == 0.0
    assert evaluate(p, [-1.2, 1.0]) == pytest.approx(24.2, rel=1e-12)


def test_evaluate_dimension_mismatch():
    p = problems.find("ROSENBR", "smooth").problem
    with pytest.raises(ValueError):
        evaluate(p, [1.0, 1.0, 1.0])


def test_linear_full_rank_phi_star():
    # closed-form optimum recomputed by dense normal equations
    entry = problems.find("LINEAR_FR", "residual")
    p = entry.problem
    A = p.jacobian(np.zeros(p.n))
    b = -np.array([p.residual(np.zeros(p.n), i) for i in range(p.m)])
    x_star, *_ = np.linalg.lstsq(A, b, rcond=None)
    r = A @ x_star - b
    assert abs(residual_objective(p, x_star) - p.phi_star) < 1e-12
    assert abs(0.5 * float(r @ r) - p.phi_star) < 1e-12
    assert abs(residual_objective(p, entry.x_star) - p.phi_star) < 1e-12


def test_residual_objective_basics():
    ident = problems.ResidualProblem(
        "IDENT", 3, 3, np.zeros(3), lambda x, i: float(x[i]), None, 0.0)
    assert residual_objective(ident, np.zeros(3)) == 0.0
    two = problems.ResidualProblem(
        "R2", 2, 2, np.zeros(2),
        lambda x, i: float(x[0] - 1.0 if i == 0 else 10.0 * (x[1] - x[0] ** 2)),
        None, 0.0)
    assert residual_objective(two, np.zeros(2)) == pytest.approx(0.5)
    const = problems.ResidualProblem(
        "CONST", 1, 2, np.zeros(1),
        lambda x, i: 3.0 if i == 0 else 4.0, None, None)
    assert residual_objective(const, np.array([7.0])) == pytest.approx(12.5)
    with pytest.raises(ValueError):
        residual_objective(const, np.zeros(2))


def test_value_determinism():
    for entry in problems.catalog():
        p = entry.problem
        if entry.kind == "smooth":
            assert p.value(p.x0) == p.value(p.x0)
        else:
            assert p.residual(p.x0, 0) == p.residual(p.x0, 0)


def _test_points(p, count=5):
    rng = np.random.default_rng(hash(p.name) % 2 ** 32)
    pts = [p.x0.copy()]
    for _ in range(count):
        pts.append(p.x0 + 0.5 * rng.standard_normal(p.n))
    return pts


def test_smooth_gradients_match_central_differences():
    for entry in problems.catalog():
        if entry.kind != "smooth":
            continue
        p = entry.problem
        for x in _test_points(p):
            g = p.gradient(x)
            fd = np.empty(p.n)
            for i in range(p.n):
                h = max(1.0, abs(x[i])) * EPS ** (1.0 / 3.0)
                xp = x.copy()
                xp[i] += h
                xm = x.copy()
                xm[i] -= h
                fd[i] = (p.value(xp) - p.value(xm)) / (2.0 * h)
            tol = 1e-6 * (1.0 + np.max(np.abs(g)))
            assert np.max(np.abs(g - fd)) <= tol, (p.name, x)


def test_residual_jacobians_match_central_differences():
    for entry in problems.catalog():
        if entry.kind != "residual":
            continue
        p = entry.problem
        for x in _test_points(p, count=2):
            J = p.jacobian(x)
            fd = np.empty((p.m, p.n))
            for j in range(p.n):
                h = max(1.0, abs(x[j])) * EPS ** (1.0 / 3.0)
                xp = x.copy()
                xp[j] += h
                xm = x.copy()
                xm[j] -= h
                for i in range(p.m):
                    fd[i, j] = (p.residual(xp, i) - p.residual(xm, i)) / (2.0 * h)
            tol = 1e-6 * (1.0 + np.max(np.abs(J)))
            assert np.max(np.abs(J - fd)) <= tol, (p.name, x)


def test_hessian_quadforms_match_second_differences():
    rng = np.random.default_rng(7)
    for entry in problems.catalog():
        if entry.kind != "smooth":
            continue
        p = entry.problem
        for x in _test_points(p, count=2):
            d = rng.standard_normal(p.n)
            d /= np.linalg.norm(d)
            t = EPS ** 0.25 * max(1.0, float(np.linalg.norm(x)))
            num = (p.value(x + t * d) - 2.0 * p.value(x) + p.value(x - t * d)) / t ** 2
            q = p.hessian_quadform(x, d)
            assert abs(q - num) <= 1e-3 * (1.0 + abs(q)), (p.name, x)


def test_denschne_closed_form():
    p = problems.find("DENSCHNE", "smooth").problem
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = rng.uniform(-2.0, 2.0, size=3)
        expected = x[0] ** 2 + (x[1] + x[1] ** 2) ** 2 + (-1.0 + np.exp(x[2])) ** 2
        assert p.value(x) == pytest.approx(expected, rel=1e-12)


def test_phi_star_lower_bounds_at_catalog_points():
    for entry in problems.catalog():
        p = entry.problem
        if p.phi_star is None:
            continue
        points = [p.x0]
        if entry.x_star is not None:
            points.append(np.asarray(entry.x_star, dtype=float))
        for x in points:
            if entry.kind == "smooth":
                val = evaluate(p, x)
            else:
                val = residual_objective(p, x)
            assert val >= p.phi_star - 1e-12, (p.name, x)


def test_recorded_minimizers_are_nearly_stationary():
    for entry in problems.catalog():
        if entry.kind != "smooth" or entry.x_star is None:
            continue
        p = entry.problem
        g = p.gradient(np.asarray(entry.x_star, dtype=float))
        assert np.linalg.norm(g) < 1e-5 * (1.0 + abs(p.value(entry.x_star))), p.name
