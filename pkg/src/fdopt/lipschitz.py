"""Curvature-bound estimation for choosing differencing intervals.

The workhorse is the iterative second-difference probe: widen or narrow the
probe width t until the squared-interval quotient |Delta(t)|/t^2 is neither
drowned by noise nor contaminated by higher-order terms, then bound the
second derivative by that quotient.  A family of idealized schemes based on
the Hessian quadratic-form hook, a third-derivative probe for central
differencing, and the per-residual variant for least squares live here too.

Every estimate is floored at 0.1 so downstream interval formulas stay
well-defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .fdiff import EPS_MACHINE
from .problems import CapabilityError

FLOOR = 0.1


@dataclass(frozen=True)
class MWParams:
    tau1: float = 100.0       # noise-dominance guard, >> 1
    tau2: float = 0.1         # relative-change guard, in (0, 1)
    max_iters: int = 11       # ladder steps in one direction
    growth: float = 10.0      # geometric ladder factor
    t0: Optional[float] = None  # explicit initial width; default rule if None

    def __post_init__(self):
        if self.tau1 <= 1.0:
            raise ValueError("tau1 must exceed 1")
        if not 0.0 < self.tau2 < 1.0:
            raise ValueError("tau2 must lie in (0, 1)")
        if self.growth <= 1.0:
            raise ValueError("growth factor must exceed 1")


@dataclass
class LipschitzEstimate:
    values: np.ndarray         # per-coordinate bound, L or M
    order: str                 # "second" | "third"
    method: str
    evals_spent: float
    floor_applied: np.ndarray  # bool per coordinate


@dataclass
class MWOutcome:
    """Result of one probe-width search; failure is a value, not an error."""

    success: bool
    value: Optional[float] = None   # floored |Delta(t)| / t^2 on success
    t: Optional[float] = None
    delta: Optional[float] = None
    f0: Optional[float] = None
    f_plus: Optional[float] = None
    f_minus: Optional[float] = None
    evals: int = 0


@dataclass
class AdaptiveState:
    current: LipschitzEstimate
    last_alpha: Optional[float] = None
    reestimate_threshold: float = 0.5


def _unit(p):
    p = np.asarray(p, dtype=float)
    norm = float(np.linalg.norm(p))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("probe direction must be a unit vector")
    return p


def second_difference(oracle, x, p, t, f0=None) -> float:
    """Delta(t) = f(x+tp) - 2 f(x) + f(x-tp) along a unit direction."""
    if t <= 0.0:
        raise ValueError("probe width must be positive")
    x = np.asarray(x, dtype=float)
    p = _unit(p)
    if f0 is None:
        f0 = oracle.noisy_value(x)
    return oracle.noisy_value(x + t * p) - 2.0 * f0 + oracle.noisy_value(x - t * p)


def default_probe_width(x, p, sigma_f) -> float:
    if sigma_f > 0.0:
        return sigma_f ** 0.25 * max(1.0, abs(float(np.dot(x, p))))
    return EPS_MACHINE ** 0.25


def mw_estimate(oracle, x, p, sigma_f, params: MWParams = MWParams()) -> MWOutcome:
    """Search a geometric ladder of probe widths for one satisfying both
    guards, and bound the second derivative from the winning probe.

    Too-small widths (noise-dominated second difference) grow t; too-large
    widths (lopsided function change) shrink it.  Once widths failing on
    opposite sides bracket the feasible window, the search bisects the
    bracket geometrically, so windows narrower than the ladder factor are
    still found.  An exhausted iteration budget, or a width failing both
    guards at once, yields failure; callers replace it by the floor.
    """
    x = np.asarray(x, dtype=float)
    p = _unit(p)
    f0 = oracle.noisy_value(x)
    evals = 1
    eps_f = sigma_f if sigma_f > 0.0 else EPS_MACHINE * max(1.0, abs(f0))
    t = params.t0 if params.t0 is not None else default_probe_width(x, p, sigma_f)
    t_small = None   # failed the noise-dominance guard (too small)
    t_large = None   # failed the balance guard (too large)
    for _ in range(params.max_iters):
        f_plus = oracle.noisy_value(x + t * p)
        f_minus = oracle.noisy_value(x - t * p)
        evals += 2
        delta = f_plus - 2.0 * f0 + f_minus
        large_enough = abs(delta) >= params.tau1 * eps_f
        balanced = (abs(f_plus - f0) <= params.tau2 * max(abs(f0), abs(f_plus))
                    and abs(f_minus - f0) <= params.tau2 * max(abs(f0), abs(f_minus)))
        if large_enough and balanced:
            return MWOutcome(True, max(FLOOR, abs(delta) / t ** 2), t, delta,
                             f0, f_plus, f_minus, evals)
        if not large_enough and balanced:
            t_small = t if t_small is None else max(t_small, t)
        elif large_enough and not balanced:
            t_large = t if t_large is None else min(t_large, t)
        else:
            break
        if t_small is not None and t_large is not None:
            if t_large <= t_small:
                break
            t = math.sqrt(t_small * t_large)
        elif t_small is not None:
            t = t_small * params.growth
        else:
            t = t_large / params.growth
    return MWOutcome(False, evals=evals)


def estimate_component_lipschitz(oracle, x, sigma_f,
                                 params: MWParams = MWParams()) -> LipschitzEstimate:
    """Second-derivative bound along every coordinate; floor on failures."""
    x = np.asarray(x, dtype=float)
    n = x.size
    values = np.empty(n)
    floored = np.zeros(n, dtype=bool)
    evals = 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        outcome = mw_estimate(oracle, x, e, sigma_f, params)
        evals += outcome.evals
        if outcome.success:
            values[i] = outcome.value
            floored[i] = outcome.value <= FLOOR
        else:
            values[i] = FLOOR
            floored[i] = True
    return LipschitzEstimate(values, "second", "mw_component", evals, floored)


def directional_curvature(est: LipschitzEstimate) -> float:
    """Root-mean-square of the componentwise bounds, used along search
    directions."""
    v = np.asarray(est.values, dtype=float)
    if v.size == 0:
        raise ValueError("empty estimate")
    return float(np.linalg.norm(v) / np.sqrt(v.size))


def adaptive_maybe_reestimate(state: AdaptiveState, oracle, x, sigma_f,
                              params: MWParams = MWParams()) -> AdaptiveState:
    """Refresh the componentwise bounds when the last step length was short.

    A small accepted step signals that the curvature seen by the line search
    disagrees with the stored bounds, so they are recomputed at the current
    iterate.  A failed line search counts as a zero step and triggers too.
    """
    if state.last_alpha is None or state.last_alpha >= state.reestimate_threshold:
        return state
    fresh = estimate_component_lipschitz(oracle, x, sigma_f, params)
    fresh = replace(fresh,
                    evals_spent=fresh.evals_spent + state.current.evals_spent)
    return AdaptiveState(fresh, None, state.reestimate_threshold)


# ---------------------------------------------------------------------------
# idealized schemes driven by the Hessian quadratic-form hook
# ---------------------------------------------------------------------------

def _require_quadform(problem):
    if problem.hessian_quadform is None:
        raise CapabilityError(
            f"problem {problem.name!r} exposes no Hessian quadratic form")
    return problem.hessian_quadform


def _hessian_diag(problem, x):
    q = _require_quadform(problem)
    n = x.size
    diag = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        diag[i] = q(x, e)
    return diag


def _quadform_matvec(problem, x, v):
    # H v recovered from the quadratic form by polarization, one coordinate
    # at a time; never forms H
    q = problem.hessian_quadform
    n = v.size
    out = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        out[i] = 0.25 * (q(x, e + v) - q(x, e - v))
    return out


def spectral_norm_estimate(problem, x, iters: int = 30) -> float:
    """Dominant |eigenvalue| of the Hessian by power iteration on the
    quadratic form, deterministic all-ones start."""
    _require_quadform(problem)
    x = np.asarray(x, dtype=float)
    n = x.size
    v = np.ones(n) / np.sqrt(n)
    for _ in range(iters):
        w = _quadform_matvec(problem, x, v)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
    return abs(float(problem.hessian_quadform(x, v)))


def estimate_scheme(scheme: int, problem, x) -> LipschitzEstimate:
    """One of the nine idealized second-derivative bounding schemes.

    1 is the constant guess L = 1; 2-4 reduce the Hessian at the given point
    to a scalar (spectral norm, mean |diagonal|, root-mean-square diagonal);
    5 keeps the |diagonal| componentwise; 6-9 are the same reductions meant to
    be re-evaluated wherever differencing happens.  All are floored.
    """
    if scheme not in range(1, 10):
        raise ValueError("scheme id must lie in 1..9")
    x = np.asarray(x, dtype=float)
    n = x.size
    if scheme == 1:
        return LipschitzEstimate(np.ones(n), "second", "scheme_1", 0.0,
                                 np.zeros(n, dtype=bool))
    if scheme in (2, 6):
        raw = spectral_norm_estimate(problem, x)
        values = np.full(n, max(FLOOR, raw))
        floored = np.full(n, raw < FLOOR)
    elif scheme in (3, 7):
        raw = float(np.mean(np.abs(_hessian_diag(problem, x))))
        values = np.full(n, max(FLOOR, raw))
        floored = np.full(n, raw < FLOOR)
    elif scheme in (4, 8):
        diag = _hessian_diag(problem, x)
        raw = float(np.sqrt(np.mean(diag ** 2)))
        values = np.full(n, max(FLOOR, raw))
        floored = np.full(n, raw < FLOOR)
    else:  # 5, 9: componentwise
        diag = np.abs(_hessian_diag(problem, x))
        floored = diag < FLOOR
        values = np.maximum(FLOOR, diag)
    return LipschitzEstimate(values, "second", f"scheme_{scheme}", 0.0, floored)


def scheme_directional_curvature(scheme: int, problem, x, p,
                                 est: LipschitzEstimate) -> float:
    """Directional second-derivative bound consistent with a scheme.

    Fixed schemes reuse the stored estimate; the per-point schemes 6-8 reduce
    the Hessian at the supplied point, and 9 projects it onto the direction.
    """
    if scheme == 1:
        return 1.0
    if scheme in (2, 3, 4):
        return float(est.values[0])
    if scheme == 5:
        return directional_curvature(est)
    if scheme in (6, 7, 8):
        return float(estimate_scheme(scheme, problem, np.asarray(x, float)).values[0])
    if scheme == 9:
        q = _require_quadform(problem)
        p = np.asarray(p, dtype=float)
        norm2 = float(p @ p)
        if norm2 == 0.0:
            raise ValueError("direction must be nonzero")
        return max(FLOOR, abs(float(q(np.asarray(x, float), p))) / norm2)
    raise ValueError("scheme id must lie in 1..9")


def third_derivative_estimate(problem, x, p) -> float:
    """Bound on the third directional derivative from the change of the
    Hessian quadratic form over a tiny step; cost is never charged."""
    q = _require_quadform(problem)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    h_hat = np.sqrt(EPS_MACHINE)
    shifted = q(x + h_hat * p / norm, p)
    here = q(x, p)
    return max(FLOOR, abs(shifted - here) / (h_hat * norm ** 2))


def idealized_residual_lipschitz(problem, x) -> np.ndarray:
    """Per-residual, per-coordinate second-derivative bound from exact
    second differences of the noise-free components.  Unfloored; callers
    floor entries before forming intervals."""
    x = np.asarray(x, dtype=float)
    m, n = problem.m, problem.n
    h = EPS_MACHINE ** 0.25
    L = np.empty((m, n))
    for j in range(n):
        xp = x.copy()
        xp[j] += h
        xm = x.copy()
        xm[j] -= h
        for i in range(m):
            L[i, j] = abs(problem.residual(xp, i) + problem.residual(xm, i)
                          - 2.0 * problem.residual(x, i)) / h ** 2
    return L
