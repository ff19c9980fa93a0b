"""Test problems with analytic reference derivatives.

Smooth problems expose value/gradient plus a Hessian quadratic-form probe
(x, p) -> p'H(x)p, so curvature can be queried without ever materializing a
matrix.  Residual problems expose individually evaluable components gamma_i
and an analytic Jacobian.  Each catalog entry records its starting point,
provenance, and (where known) the optimal objective value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Vector = np.ndarray


class CapabilityError(RuntimeError):
    """A problem lacks the hook required by the requested operation."""


@dataclass(frozen=True)
class SmoothProblem:
    name: str
    n: int
    x0: Vector
    value: Callable[[Vector], float]
    gradient: Optional[Callable[[Vector], Vector]] = None
    hessian_quadform: Optional[Callable[[Vector, Vector], float]] = None
    phi_star: Optional[float] = None


@dataclass(frozen=True)
class ResidualProblem:
    name: str
    n: int
    m: int
    x0: Vector
    residual: Callable[[Vector, int], float]
    jacobian: Optional[Callable[[Vector], Vector]] = None
    phi_star: Optional[float] = None


@dataclass(frozen=True)
class CatalogEntry:
    problem: object
    kind: str      # "smooth" | "residual"
    source: str
    x_star: Optional[Vector] = None


def evaluate(problem: SmoothProblem, x) -> float:
    """Exact, noise-free objective value; touches no counters."""
    x = _check_dim(x, problem.n)
    return float(problem.value(x))


def residual_objective(problem: ResidualProblem, x) -> float:
    """One half the sum of squared residual components."""
    x = _check_dim(x, problem.n)
    total = 0.0
    for i in range(problem.m):
        gi = problem.residual(x, i)
        total += gi * gi
    return 0.5 * total


def _check_dim(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a length-{n} vector, got shape {x.shape}")
    return x


# ---------------------------------------------------------------------------
# residual families (vector form, per-component form, Jacobian, and the
# per-component Hessian quadratic form used by the smooth compositions)
# ---------------------------------------------------------------------------

def _rosenbr_rvec(x):
    return np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]])


def _rosenbr_component(x, i):
    if i == 0:
        return 10.0 * (x[1] - x[0] ** 2)
    return 1.0 - x[0]


def _rosenbr_jac(x):
    return np.array([[-20.0 * x[0], 10.0], [-1.0, 0.0]])


def _rosenbr_rquad(x, p):
    return np.array([-20.0 * p[0] ** 2, 0.0])


def _cube_rvec(x):
    return np.array([x[0] - 1.0, 10.0 * (x[1] - x[0] ** 3)])


def _cube_jac(x):
    return np.array([[1.0, 0.0], [-30.0 * x[0] ** 2, 10.0]])


def _cube_rquad(x, p):
    return np.array([0.0, -60.0 * x[0] * p[0] ** 2])


_TWO_PI = 2.0 * np.pi


def _helix_theta(x):
    if x[0] > 0.0:
        return np.arctan(x[1] / x[0]) / _TWO_PI
    if x[0] < 0.0:
        return np.arctan(x[1] / x[0]) / _TWO_PI + 0.5
    return 0.25 if x[1] >= 0.0 else -0.25


def _helix_rvec(x):
    r = np.hypot(x[0], x[1])
    return np.array([10.0 * (x[2] - 10.0 * _helix_theta(x)),
                     10.0 * (r - 1.0),
                     x[2]])


def _helix_component(x, i):
    if i == 0:
        return 10.0 * (x[2] - 10.0 * _helix_theta(x))
    if i == 1:
        return 10.0 * (np.hypot(x[0], x[1]) - 1.0)
    return x[2]


def _helix_jac(x):
    r2 = x[0] ** 2 + x[1] ** 2
    r = np.sqrt(r2)
    dth = np.array([-x[1], x[0], 0.0]) / (_TWO_PI * r2)
    row0 = -100.0 * dth
    row0[2] += 10.0
    row1 = np.array([10.0 * x[0] / r, 10.0 * x[1] / r, 0.0])
    row2 = np.array([0.0, 0.0, 1.0])
    return np.vstack([row0, row1, row2])


def _helix_rquad(x, p):
    r2 = x[0] ** 2 + x[1] ** 2
    r = np.sqrt(r2)
    # p' (d2 theta) p, with the 2x2 block [[2ab, b^2-a^2], [b^2-a^2, -2ab]] / (2 pi r^4)
    a, b = x[0], x[1]
    qtheta = (2.0 * a * b * p[0] ** 2 + 2.0 * (b * b - a * a) * p[0] * p[1]
              - 2.0 * a * b * p[1] ** 2) / (_TWO_PI * r2 * r2)
    up = (a * p[0] + b * p[1]) / r
    qr = (p[0] ** 2 + p[1] ** 2 - up * up) / r
    return np.array([-100.0 * qtheta, 10.0 * qr, 0.0])


_BARD_Y = np.array([0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
                    0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39])


def _bard_uvw(i):
    u = float(i + 1)
    v = float(15 - i)
    return u, v, min(u, v)


def _bard_component(x, i):
    u, v, w = _bard_uvw(i)
    return _BARD_Y[i] - (x[0] + u / (v * x[1] + w * x[2]))


def _bard_rvec(x):
    return np.array([_bard_component(x, i) for i in range(15)])


def _bard_jac(x):
    rows = []
    for i in range(15):
        u, v, w = _bard_uvw(i)
        d = v * x[1] + w * x[2]
        rows.append([-1.0, u * v / d ** 2, u * w / d ** 2])
    return np.array(rows)


def _bard_rquad(x, p):
    out = np.empty(15)
    for i in range(15):
        u, v, w = _bard_uvw(i)
        d = v * x[1] + w * x[2]
        out[i] = -2.0 * u * (v * p[1] + w * p[2]) ** 2 / d ** 3
    return out


def _box3d_component(x, i):
    t = 0.1 * (i + 1)
    return np.exp(-t * x[0]) - np.exp(-t * x[1]) - x[2] * (np.exp(-t) - np.exp(-10.0 * t))


def _box3d_rvec(x):
    return np.array([_box3d_component(x, i) for i in range(10)])


def _box3d_jac(x):
    rows = []
    for i in range(10):
        t = 0.1 * (i + 1)
        rows.append([-t * np.exp(-t * x[0]), t * np.exp(-t * x[1]),
                     -(np.exp(-t) - np.exp(-10.0 * t))])
    return np.array(rows)


def _box3d_rquad(x, p):
    out = np.empty(10)
    for i in range(10):
        t = 0.1 * (i + 1)
        out[i] = t * t * (np.exp(-t * x[0]) * p[0] ** 2 - np.exp(-t * x[1]) * p[1] ** 2)
    return out


_SQRT5 = np.sqrt(5.0)
_SQRT10 = np.sqrt(10.0)


def _powellsg_component(x, i):
    if i == 0:
        return x[0] + 10.0 * x[1]
    if i == 1:
        return _SQRT5 * (x[2] - x[3])
    if i == 2:
        return (x[1] - 2.0 * x[2]) ** 2
    return _SQRT10 * (x[0] - x[3]) ** 2


def _powellsg_rvec(x):
    return np.array([_powellsg_component(x, i) for i in range(4)])


def _powellsg_jac(x):
    return np.array([
        [1.0, 10.0, 0.0, 0.0],
        [0.0, 0.0, _SQRT5, -_SQRT5],
        [0.0, 2.0 * (x[1] - 2.0 * x[2]), -4.0 * (x[1] - 2.0 * x[2]), 0.0],
        [2.0 * _SQRT10 * (x[0] - x[3]), 0.0, 0.0, -2.0 * _SQRT10 * (x[0] - x[3])],
    ])


def _powellsg_rquad(x, p):
    return np.array([0.0, 0.0,
                     2.0 * (p[1] - 2.0 * p[2]) ** 2,
                     2.0 * _SQRT10 * (p[0] - p[3]) ** 2])


def _freuroth_rvec(x):
    return np.array([
        x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1] - 13.0,
        x[0] + ((1.0 + x[1]) * x[1] - 14.0) * x[1] - 29.0,
    ])


def _freuroth_jac(x):
    return np.array([
        [1.0, 10.0 * x[1] - 3.0 * x[1] ** 2 - 2.0],
        [1.0, 3.0 * x[1] ** 2 + 2.0 * x[1] - 14.0],
    ])


def _freuroth_rquad(x, p):
    return np.array([(10.0 - 6.0 * x[1]) * p[1] ** 2,
                     (6.0 * x[1] + 2.0) * p[1] ** 2])


_BROWNDEN_M = 20


def _brownden_component(x, i):
    t = (i + 1) / 5.0
    a = x[0] + t * x[1] - np.exp(t)
    b = x[2] + x[3] * np.sin(t) - np.cos(t)
    return a * a + b * b


def _brownden_jac(x):
    rows = []
    for i in range(_BROWNDEN_M):
        t = (i + 1) / 5.0
        a = x[0] + t * x[1] - np.exp(t)
        b = x[2] + x[3] * np.sin(t) - np.cos(t)
        rows.append([2.0 * a, 2.0 * a * t, 2.0 * b, 2.0 * b * np.sin(t)])
    return np.array(rows)


_KOWOSB_U = np.array([4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1,
                      0.0833, 0.0714, 0.0625])
_KOWOSB_Y = np.array([0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                      0.0456, 0.0342, 0.0323, 0.0235, 0.0246])


def _kowosb_component(x, i):
    u = _KOWOSB_U[i]
    num = u * (u + x[1])
    den = u * (u + x[2]) + x[3]
    return _KOWOSB_Y[i] - x[0] * num / den


def _kowosb_jac(x):
    rows = []
    for i in range(11):
        u = _KOWOSB_U[i]
        num = u * (u + x[1])
        den = u * (u + x[2]) + x[3]
        rows.append([-num / den,
                     -x[0] * u / den,
                     x[0] * num * u / den ** 2,
                     x[0] * num / den ** 2])
    return np.array(rows)


def _brownal_component(x, i):
    n = len(x)
    if i < n - 1:
        return x[i] + np.sum(x) - (n + 1.0)
    return float(np.prod(x)) - 1.0


def _brownal_jac(x):
    n = len(x)
    jac = np.ones((n, n)) + np.eye(n)
    jac[n - 1] = [np.prod(np.delete(x, j)) for j in range(n)]
    return jac


_LINFR_N, _LINFR_M = 9, 45


def _linear_fr_component(x, i):
    s = 2.0 * np.sum(x) / _LINFR_M
    if i < _LINFR_N:
        return x[i] - s - 1.0
    return -s - 1.0


def _linear_fr_jac(x):
    jac = np.full((_LINFR_M, _LINFR_N), -2.0 / _LINFR_M)
    jac[:_LINFR_N] += np.eye(_LINFR_N)
    return jac


# ---------------------------------------------------------------------------
# smooth problems
# ---------------------------------------------------------------------------

def _sum_of_squares(name, x0, rvec, rjac, rquad, phi_star=None):
    """Smooth problem of the form sum_i gamma_i(x)^2 with exact derivatives."""
    x0 = np.asarray(x0, dtype=float)

    def value(x):
        r = rvec(x)
        return float(r @ r)

    def gradient(x):
        return 2.0 * (rjac(x).T @ rvec(x))

    def quadform(x, p):
        r = rvec(x)
        jp = rjac(x) @ p
        return float(2.0 * (jp @ jp + r @ rquad(x, p)))

    return SmoothProblem(name, len(x0), x0, value, gradient, quadform, phi_star)


def _denschne():
    def value(x):
        e = np.exp(x[2])
        return float(x[0] ** 2 + (x[1] + x[1] ** 2) ** 2 + (e - 1.0) ** 2)

    def gradient(x):
        e = np.exp(x[2])
        return np.array([2.0 * x[0],
                         2.0 * (x[1] + x[1] ** 2) * (1.0 + 2.0 * x[1]),
                         2.0 * e * (e - 1.0)])

    def quadform(x, p):
        e = np.exp(x[2])
        d2 = 2.0 * (1.0 + 2.0 * x[1]) ** 2 + 4.0 * (x[1] + x[1] ** 2)
        d3 = 2.0 * e * (2.0 * e - 1.0)
        return float(2.0 * p[0] ** 2 + d2 * p[1] ** 2 + d3 * p[2] ** 2)

    return SmoothProblem("DENSCHNE", 3, np.array([2.0, 3.0, -8.0]),
                         value, gradient, quadform, phi_star=0.0)


def _tridia(n=10):
    idx = np.arange(2.0, n + 1.0)

    def value(x):
        return float((x[0] - 1.0) ** 2 + np.sum(idx * (2.0 * x[1:] - x[:-1]) ** 2))

    def gradient(x):
        g = np.zeros(n)
        g[0] = 2.0 * (x[0] - 1.0)
        d = 2.0 * x[1:] - x[:-1]
        g[1:] += 4.0 * idx * d
        g[:-1] -= 2.0 * idx * d
        return g

    def quadform(x, p):
        return float(2.0 * p[0] ** 2 + np.sum(2.0 * idx * (2.0 * p[1:] - p[:-1]) ** 2))

    return SmoothProblem("TRIDIA", n, np.ones(n), value, gradient, quadform,
                         phi_star=0.0)


def _dqrtic(n=10):
    idx = np.arange(1.0, n + 1.0)

    def value(x):
        return float(np.sum((x - idx) ** 4))

    def gradient(x):
        return 4.0 * (x - idx) ** 3

    def quadform(x, p):
        return float(np.sum(12.0 * (x - idx) ** 2 * p ** 2))

    return SmoothProblem("DQRTIC", n, np.full(n, 2.0), value, gradient, quadform,
                         phi_star=0.0)


def _arwhead(n=100):
    def value(x):
        q = x[:-1] ** 2 + x[-1] ** 2
        return float(np.sum(q ** 2 - 4.0 * x[:-1] + 3.0))

    def gradient(x):
        q = x[:-1] ** 2 + x[-1] ** 2
        g = np.zeros(n)
        g[:-1] = 4.0 * x[:-1] * q - 4.0
        g[-1] = 4.0 * x[-1] * np.sum(q)
        return g

    def quadform(x, p):
        q = x[:-1] ** 2 + x[-1] ** 2
        lin = x[:-1] * p[:-1] + x[-1] * p[-1]
        return float(np.sum(8.0 * lin ** 2 + 4.0 * q * (p[:-1] ** 2 + p[-1] ** 2)))

    return SmoothProblem("ARWHEAD", n, np.ones(n), value, gradient, quadform,
                         phi_star=0.0)


def _nondia(n=10):
    def value(x):
        return float((x[0] - 1.0) ** 2 + 100.0 * np.sum((x[0] - x[1:] ** 2) ** 2))

    def gradient(x):
        d = x[0] - x[1:] ** 2
        g = np.zeros(n)
        g[0] = 2.0 * (x[0] - 1.0) + 200.0 * np.sum(d)
        g[1:] = -400.0 * x[1:] * d
        return g

    def quadform(x, p):
        d = x[0] - x[1:] ** 2
        lin = p[0] - 2.0 * x[1:] * p[1:]
        return float(2.0 * p[0] ** 2
                     + np.sum(200.0 * lin ** 2 - 400.0 * d * p[1:] ** 2))

    return SmoothProblem("NONDIA", n, np.full(n, -1.0), value, gradient, quadform,
                         phi_star=0.0)


def _engval1(n=2):
    def value(x):
        q = x[:-1] ** 2 + x[1:] ** 2
        return float(np.sum(q ** 2 - 4.0 * x[:-1] + 3.0))

    def gradient(x):
        q = x[:-1] ** 2 + x[1:] ** 2
        g = np.zeros(n)
        g[:-1] += 4.0 * x[:-1] * q - 4.0
        g[1:] += 4.0 * x[1:] * q
        return g

    def quadform(x, p):
        q = x[:-1] ** 2 + x[1:] ** 2
        lin = x[:-1] * p[:-1] + x[1:] * p[1:]
        return float(np.sum(8.0 * lin ** 2 + 4.0 * q * (p[:-1] ** 2 + p[1:] ** 2)))

    return SmoothProblem("ENGVAL1", n, np.full(n, 2.0), value, gradient, quadform,
                         phi_star=0.0)


def _sineval():
    # steep sine-shaped valley; the quadratic term keeps the origin unique
    def value(x):
        g = 100.0 * (x[1] - np.sin(x[0]))
        return float(g * g + 0.25 * x[0] ** 2)

    def gradient(x):
        g = 100.0 * (x[1] - np.sin(x[0]))
        return np.array([-200.0 * g * np.cos(x[0]) + 0.5 * x[0], 200.0 * g])

    def quadform(x, p):
        g = 100.0 * (x[1] - np.sin(x[0]))
        dg = 100.0 * (-np.cos(x[0]) * p[0] + p[1])
        return float(2.0 * dg * dg + 2.0 * g * 100.0 * np.sin(x[0]) * p[0] ** 2
                     + 0.5 * p[0] ** 2)

    return SmoothProblem("SINEVAL", 2, np.array([4.71238898038469, -1.0]),
                         value, gradient, quadform, phi_star=0.0)


def _brkmcc():
    def value(x):
        g = 1.0 - 0.25 * x[0] ** 2 - x[1] ** 2
        return float((x[0] - 2.0) ** 2 + (x[1] - 1.0) ** 2 + 1.0 / (25.0 * g)
                     + 5.0 * (x[0] - 2.0 * x[1] + 1.0) ** 2)

    def gradient(x):
        g = 1.0 - 0.25 * x[0] ** 2 - x[1] ** 2
        lin = x[0] - 2.0 * x[1] + 1.0
        return np.array([
            2.0 * (x[0] - 2.0) + 0.5 * x[0] / (25.0 * g * g) + 10.0 * lin,
            2.0 * (x[1] - 1.0) + 2.0 * x[1] / (25.0 * g * g) - 20.0 * lin,
        ])

    def quadform(x, p):
        g = 1.0 - 0.25 * x[0] ** 2 - x[1] ** 2
        dg = -0.5 * x[0] * p[0] - 2.0 * x[1] * p[1]
        rational = (2.0 * dg * dg / g ** 3 + (0.5 * p[0] ** 2 + 2.0 * p[1] ** 2) / g ** 2) / 25.0
        return float(2.0 * p[0] ** 2 + 2.0 * p[1] ** 2
                     + 10.0 * (p[0] - 2.0 * p[1]) ** 2 + rational)

    return SmoothProblem("BRKMCC", 2, np.array([2.0, 2.0]), value, gradient,
                         quadform, phi_star=_PHI_STAR_BRKMCC)


# Optimal values not expressible in closed form were computed once by running
# the exact-gradient quasi-Newton solver from the catalog starting point until
# stagnation, and frozen here (see tests/test_problems.py for the recheck).
_PHI_STAR_BARD_SMOOTH = 0.008214877306578968
_PHI_STAR_BARD_LS = 0.004107438653289484
_PHI_STAR_FREUROTH = 48.98425367924001
_PHI_STAR_BRKMCC = 0.16904267919645033
_PHI_STAR_BROWNDEN_LS = 42911.10081317814
_PHI_STAR_KOWOSB_LS = 0.00015375280192461845

_X_STAR_LINEAR_FR = np.full(_LINFR_N, -1.0)


def _smooth_entries():
    rosen = _sum_of_squares("ROSENBR", [-1.2, 1.0], _rosenbr_rvec, _rosenbr_jac,
                            _rosenbr_rquad, phi_star=0.0)
    cube = _sum_of_squares("CUBE", [-1.2, 1.0], _cube_rvec, _cube_jac,
                           _cube_rquad, phi_star=0.0)
    helix = _sum_of_squares("HELIX", [-1.0, 0.0, 0.0], _helix_rvec, _helix_jac,
                            _helix_rquad, phi_star=0.0)
    bard = _sum_of_squares("BARD", [1.0, 1.0, 1.0], _bard_rvec, _bard_jac,
                           _bard_rquad, phi_star=_PHI_STAR_BARD_SMOOTH)
    box3d = _sum_of_squares("BOX3D", [0.0, 10.0, 20.0], _box3d_rvec, _box3d_jac,
                            _box3d_rquad, phi_star=0.0)
    powellsg = _sum_of_squares("POWELLSG", [3.0, -1.0, 0.0, 1.0], _powellsg_rvec,
                               _powellsg_jac, _powellsg_rquad, phi_star=0.0)
    freuroth = _sum_of_squares("FREUROTH", [0.5, -2.0], _freuroth_rvec,
                               _freuroth_jac, _freuroth_rquad,
                               phi_star=_PHI_STAR_FREUROTH)
    entries = [
        CatalogEntry(rosen, "smooth", "Rosenbrock valley, standard start",
                     x_star=np.array([1.0, 1.0])),
        CatalogEntry(cube, "smooth", "cubic valley variant of Rosenbrock",
                     x_star=np.array([1.0, 1.0])),
        CatalogEntry(_denschne(), "smooth",
                     "Dennis-Schnabel exponential example",
                     x_star=np.array([0.0, 0.0, 0.0])),
        CatalogEntry(helix, "smooth", "helical valley",
                     x_star=np.array([1.0, 0.0, 0.0])),
        CatalogEntry(bard, "smooth", "Bard data-fitting, sum of squares",
                     x_star=np.array([0.08241056001196619, 1.1330360987875692,
                                      2.343695172120792])),
        CatalogEntry(box3d, "smooth", "Box three-dimensional, 10 terms",
                     x_star=np.array([1.0, 10.0, 1.0])),
        CatalogEntry(powellsg, "smooth", "Powell singular function",
                     x_star=np.zeros(4)),
        CatalogEntry(freuroth, "smooth",
                     "Freudenstein-Roth; local minimum reached from the standard start",
                     x_star=np.array([11.412778986902095, -0.8968052532744765])),
        CatalogEntry(_tridia(10), "smooth", "tridiagonal quadratic",
                     x_star=np.array([1.0] + [2.0 ** -k for k in range(1, 10)])),
        CatalogEntry(_dqrtic(10), "smooth", "diagonal quartic",
                     x_star=np.arange(1.0, 11.0)),
        CatalogEntry(_arwhead(100), "smooth", "arrowhead-coupled quartic"),
        CatalogEntry(_nondia(10), "smooth",
                     "nondiagonal Rosenbrock variant, all coordinates coupled to x1"),
        CatalogEntry(_engval1(2), "smooth", "ENGVAL1 at its smallest dimension",
                     x_star=np.array([1.0, 0.0])),
        CatalogEntry(_sineval(), "smooth", "scaled sine valley",
                     x_star=np.zeros(2)),
        CatalogEntry(_brkmcc(), "smooth", "Brown-McCormick rational term",
                     x_star=np.array([1.795402849554812, 1.377859778052933])),
    ]
    return entries


def _residual_entries():
    mk = ResidualProblem
    entries = [
        CatalogEntry(mk("ROSENBR", 2, 2, np.array([-1.2, 1.0]),
                        _rosenbr_component, _rosenbr_jac, phi_star=0.0),
                     "residual", "Rosenbrock in residual form",
                     x_star=np.array([1.0, 1.0])),
        CatalogEntry(mk("HELIX", 3, 3, np.array([-1.0, 0.0, 0.0]),
                        _helix_component, _helix_jac, phi_star=0.0),
                     "residual", "helical valley residuals",
                     x_star=np.array([1.0, 0.0, 0.0])),
        CatalogEntry(mk("BARD", 3, 15, np.array([1.0, 1.0, 1.0]),
                        _bard_component, _bard_jac, phi_star=_PHI_STAR_BARD_LS),
                     "residual", "Bard data fitting"),
        CatalogEntry(mk("BOX3D", 3, 10, np.array([0.0, 10.0, 20.0]),
                        _box3d_component, _box3d_jac, phi_star=0.0),
                     "residual", "Box three-dimensional",
                     x_star=np.array([1.0, 10.0, 1.0])),
        CatalogEntry(mk("POWELLSG", 4, 4, np.array([3.0, -1.0, 0.0, 1.0]),
                        _powellsg_component, _powellsg_jac, phi_star=0.0),
                     "residual", "Powell singular residuals",
                     x_star=np.zeros(4)),
        CatalogEntry(mk("BROWNDEN", 4, 20, np.array([25.0, 5.0, -5.0, -1.0]),
                        _brownden_component, _brownden_jac,
                        phi_star=_PHI_STAR_BROWNDEN_LS),
                     "residual", "Brown-Dennis nonzero-residual fit"),
        CatalogEntry(mk("KOWOSB", 4, 11,
                        np.array([0.25, 0.39, 0.415, 0.39]),
                        _kowosb_component, _kowosb_jac,
                        phi_star=_PHI_STAR_KOWOSB_LS),
                     "residual", "Kowalik-Osborne enzyme kinetics fit"),
        CatalogEntry(mk("BROWNAL", 10, 10, np.full(10, 0.5),
                        _brownal_component, _brownal_jac, phi_star=0.0),
                     "residual", "Brown almost-linear"),
        CatalogEntry(mk("LINEAR_FR", _LINFR_N, _LINFR_M, np.ones(_LINFR_N),
                        _linear_fr_component, _linear_fr_jac,
                        phi_star=0.5 * (_LINFR_M - _LINFR_N)),
                     "residual", "linear full-rank least squares",
                     x_star=_X_STAR_LINEAR_FR.copy()),
    ]
    return entries


def catalog() -> list[CatalogEntry]:
    """All built-in problems, smooth entries first."""
    return _smooth_entries() + _residual_entries()


def smooth_catalog() -> list[SmoothProblem]:
    return [e.problem for e in _smooth_entries()]


def residual_catalog() -> list[ResidualProblem]:
    return [e.problem for e in _residual_entries()]


def find(name, kind="smooth"):
    """Look up a catalog entry by name; returns None when absent."""
    entries = _smooth_entries() if kind == "smooth" else _residual_entries()
    for entry in entries:
        if entry.problem.name == name:
            return entry
    return None
