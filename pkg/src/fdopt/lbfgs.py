"""Limited-memory BFGS driven entirely by difference gradients.

The solver follows the classic two-loop recursion with a bisection
Armijo-Wolfe line search whose sufficient-decrease test is relaxed to
tolerate noise: after the first inner trial the threshold gains a 2*sigma_f
slack, and when the directional derivative is smaller than the predicted
gradient noise the test degrades to simple non-increase.  Componentwise
curvature bounds choose the differencing interval and are re-estimated
whenever the line search returns a short step.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import fdiff, lipschitz
from .fdiff import CENTRAL, FORWARD
from .noise import NoisyOracle
from .records import IterationRecord, SolverResult

_PAIR_SKIP = 1e-12


@dataclass
class LbfgsConfig:
    scheme: str = FORWARD
    memory: int = 10
    c1: float = 1e-4
    c2: float = 0.9
    max_evals: float | None = None        # defaults to 500 n at run time
    stagnation_window: int = 5
    sigma_f: float = 0.0
    lipschitz_mode: str = "mw_component"  # mw_component | scheme_<k> | fixed
    fixed_curvature: float = 1.0
    tau: float = 1e-6                     # optimality-gap tolerance
    mw_params: lipschitz.MWParams = field(default_factory=lipschitz.MWParams)
    use_analytic_gradient: bool = False   # reference mode for calibration runs

    def __post_init__(self):
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.memory < 1:
            raise ValueError("memory must be positive")


class LbfgsMemory:
    """Bounded store of curvature pairs; rejects pairs that would break
    positive definiteness."""

    def __init__(self, capacity):
        self.pairs = deque(maxlen=capacity)

    def push(self, s, y):
        sy = float(s @ y)
        if sy <= _PAIR_SKIP * np.linalg.norm(s) * np.linalg.norm(y):
            return False
        self.pairs.append((s, y, 1.0 / sy))
        return True

    def __len__(self):
        return len(self.pairs)


@dataclass
class LineSearchOutcome:
    alpha: float
    evals: float
    status: str                      # accepted|relaxed_accepted|nondescent_accepted|failed
    f_new: float | None = None


def two_loop_direction(memory: LbfgsMemory, g):
    """Quasi-Newton direction -H g from the stored pairs; steepest descent
    when the memory is empty."""
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("gradient contains non-finite entries")
    if len(memory) == 0:
        return -g
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(memory.pairs):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    s_last, y_last, _ = memory.pairs[-1]
    gamma = float(s_last @ y_last) / float(y_last @ y_last)
    r = gamma * q
    for (s, y, rho), a in zip(memory.pairs, reversed(alphas)):
        b = rho * float(y @ r)
        r += (a - b) * s
    return -r


def relaxed_armijo_check(j, f_trial, f_k, alpha, gTp, sigma_f, sigma_g,
                         p_norm, c1=1e-4) -> bool:
    """Noise-tolerant sufficient decrease.

    With a trustworthy descent direction the first trial must pass plain
    Armijo; later trials get a 2*sigma_f allowance.  When the directional
    derivative is within the gradient noise, any non-increase is accepted.
    """
    if gTp < -sigma_g * p_norm:
        slack = 0.0 if j == 0 else 2.0 * sigma_f
        return f_trial <= f_k + c1 * alpha * gTp + slack
    return f_trial <= f_k


class _CurvatureState:
    """Tracks the interval-selecting curvature bounds for one solver run."""

    def __init__(self, oracle, config):
        self.oracle = oracle
        self.config = config
        self.problem = oracle.problem
        self.mode = config.lipschitz_mode
        self.scheme_id = None
        if self.mode.startswith("scheme_"):
            self.scheme_id = int(self.mode.split("_", 1)[1])
        self.est = None
        self.m_est = None

    @property
    def noisy(self):
        return self.config.sigma_f > 0.0

    def initialize(self, x):
        if not self.noisy:
            return
        if self.config.scheme == CENTRAL:
            self._refresh_third(x)
            return
        if self.mode == "mw_component":
            self.est = lipschitz.estimate_component_lipschitz(
                self.oracle, x, self.config.sigma_f, self.config.mw_params)
        elif self.scheme_id is not None:
            self.est = lipschitz.estimate_scheme(self.scheme_id, self.problem, x)
        elif self.mode == "fixed":
            n = self.problem.n
            v = max(lipschitz.FLOOR, self.config.fixed_curvature)
            self.est = lipschitz.LipschitzEstimate(
                np.full(n, v), "second", "fixed", 0.0, np.zeros(n, dtype=bool))
        else:
            raise ValueError(f"unknown lipschitz mode {self.mode!r}")

    def _refresh_third(self, x):
        n = self.problem.n
        vals = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            vals[i] = lipschitz.third_derivative_estimate(self.problem, x, e)
        self.m_est = lipschitz.LipschitzEstimate(
            vals, "third", "hessian_change", 0.0, vals <= lipschitz.FLOOR)

    def refresh_for_gradient(self, x, last_alpha):
        """Per-iteration update; returns True when the bounds were recomputed
        at a charged cost."""
        if not self.noisy:
            return False
        if self.config.scheme == CENTRAL:
            self._refresh_third(x)
            return False
        if self.mode == "mw_component":
            if last_alpha is not None and last_alpha < 0.5:
                self.est = lipschitz.estimate_component_lipschitz(
                    self.oracle, x, self.config.sigma_f, self.config.mw_params)
                return True
            return False
        if self.scheme_id is not None and self.scheme_id >= 6:
            self.est = lipschitz.estimate_scheme(self.scheme_id, self.problem, x)
        return False

    def gradient_rule(self, x):
        if not self.noisy:
            return fdiff.machine_eps_rule()
        values = self.m_est.values if self.config.scheme == CENTRAL else self.est.values
        return fdiff.noise_optimal_rule(self.config.sigma_f, values)

    def sigma_g(self):
        if not self.noisy:
            return 0.0
        values = self.m_est.values if self.config.scheme == CENTRAL else self.est.values
        per_coord = [fdiff.gradient_noise_level(self.config.sigma_f, v,
                                                self.config.scheme)
                     for v in values]
        return fdiff.full_gradient_noise_level(per_coord)

    def directional_interval(self, x, p):
        """Interval for the line-search directional derivative at x."""
        scheme = self.config.scheme
        if not self.noisy:
            if scheme == FORWARD:
                return math.sqrt(fdiff.EPS_MACHINE)
            return fdiff.EPS_MACHINE ** (1.0 / 3.0)
        if scheme == CENTRAL:
            curv = lipschitz.third_derivative_estimate(self.problem, x, p)
        elif self.scheme_id is not None:
            curv = lipschitz.scheme_directional_curvature(
                self.scheme_id, self.problem, x, p, self.est)
        else:
            curv = lipschitz.directional_curvature(self.est)
        return fdiff.optimal_interval(self.config.sigma_f,
                                      max(lipschitz.FLOOR, curv), scheme)


def armijo_wolfe_search(oracle, x, p, f_k, gTp, config, curv,
                        sigma_g=0.0, budget_remaining=math.inf,
                        max_inner=30) -> LineSearchOutcome:
    """Bisection line search with bracketing.

    A failed sufficient-decrease test halves (or bisects) the step; a passed
    one that still violates the curvature condition doubles it until an upper
    bracket exists.  If the iteration cap or the evaluation budget cuts the
    search short, the largest step that passed sufficient decrease wins.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    p_norm = float(np.linalg.norm(p))
    if p_norm == 0.0:
        raise ValueError("search direction must be nonzero")
    sigma_f = config.sigma_f
    nondescent = gTp >= -sigma_g * p_norm
    lo, hi = 0.0, None
    alpha = 1.0
    best = None     # (alpha, f_trial, status)
    evals = 0.0

    def exact_directional(x_trial):
        return float(oracle.problem.gradient(x_trial) @ p)

    for j in range(max_inner):
        if j > 0 and evals >= budget_remaining:
            break
        x_trial = x + alpha * p
        f_trial = oracle.noisy_value(x_trial)
        evals += 1
        if relaxed_armijo_check(j, f_trial, f_k, alpha, gTp, sigma_f, sigma_g,
                                p_norm, config.c1):
            if nondescent:
                return LineSearchOutcome(alpha, evals, "nondescent_accepted",
                                         f_trial)
            status = "relaxed_accepted" if (j >= 1 and sigma_f > 0.0) else "accepted"
            best = (alpha, f_trial, status)
            if evals >= budget_remaining:
                return LineSearchOutcome(alpha, evals, status, f_trial)
            if config.use_analytic_gradient:
                deriv = exact_directional(x_trial)
            else:
                h = curv.directional_interval(x_trial, p)
                deriv = fdiff.fd_directional(
                    oracle, x_trial, p, config.scheme, h,
                    f_base=f_trial if config.scheme == FORWARD else None)
                evals += 1.0 if config.scheme == FORWARD else 2.0
            if deriv >= config.c2 * gTp:
                return LineSearchOutcome(alpha, evals, status, f_trial)
            lo = alpha
            alpha = 0.5 * (lo + hi) if hi is not None else 2.0 * alpha
        else:
            hi = alpha
            alpha = 0.5 * (lo + hi)
    if best is not None:
        return LineSearchOutcome(best[0], evals, best[2], best[1])
    return LineSearchOutcome(0.0, evals, "failed")


def _gap_reached(phi, phi_star, tau):
    return phi - phi_star <= tau * max(1.0, abs(phi_star))


def minimize(oracle: NoisyOracle, x0, config: LbfgsConfig,
             phi_star=None, line_search=armijo_wolfe_search) -> SolverResult:
    """Run the solver from x0 until the budget, a stagnation window, or the
    optimality-gap target stops it.

    The returned trace records, per outer iteration, the cumulative charged
    evaluations, the observed objective, and the true objective read through
    the uncounted reporting channel.
    """
    problem = oracle.problem
    n = problem.n
    x = np.asarray(x0, dtype=float).copy()
    max_evals = config.max_evals if config.max_evals is not None else 500.0 * n
    if phi_star is None:
        phi_star = problem.phi_star

    trace = []
    f_x = oracle.noisy_value(x)
    if not np.isfinite(f_x):
        return SolverResult(x, "failure", oracle.eval_count, f_x,
                            oracle.true_value(x), trace)

    curv = _CurvatureState(oracle, config)
    curv.initialize(x)

    memory = LbfgsMemory(config.memory)
    best_noisy = f_x
    best_true = oracle.true_value(x)
    stagnant = 0
    last_alpha = None
    g_prev = None
    x_prev = None
    reason = "budget"
    trace.append(IterationRecord(0, oracle.eval_count, f_x, best_true))

    if phi_star is not None and _gap_reached(best_true, phi_star, config.tau):
        return SolverResult(x, "gap", oracle.eval_count, best_noisy, best_true,
                            trace)

    k = 0
    while oracle.eval_count < max_evals:
        k += 1
        reestimated = curv.refresh_for_gradient(x, last_alpha)

        if config.use_analytic_gradient:
            g = np.asarray(problem.gradient(x), dtype=float)
        else:
            g, _ = fdiff.fd_gradient(oracle, x, config.scheme,
                                     curv.gradient_rule(x))
        if not np.all(np.isfinite(g)):
            reason = "failure"
            break
        sigma_g = curv.sigma_g()

        if g_prev is not None:
            memory.push(x - x_prev, g - g_prev)
        x_prev = x.copy()
        g_prev = g.copy()

        p = two_loop_direction(memory, g)
        gTp = float(g @ p)
        remaining = max_evals - oracle.eval_count
        outcome = line_search(oracle, x, p, f_x, gTp, config, curv,
                              sigma_g=sigma_g, budget_remaining=remaining)
        last_alpha = outcome.alpha
        if outcome.status != "failed":
            x = x + outcome.alpha * p
            f_x = outcome.f_new

        true_phi = oracle.true_value(x)
        best_true = min(best_true, true_phi)
        improvement = best_noisy - f_x
        best_noisy = min(best_noisy, f_x)
        trace.append(IterationRecord(k, oracle.eval_count, f_x, true_phi,
                                     alpha=outcome.alpha,
                                     grad_norm=float(np.linalg.norm(g)),
                                     reestimated=reestimated))

        if phi_star is not None and _gap_reached(true_phi, phi_star, config.tau):
            reason = "gap"
            break

        threshold = (10.0 * config.sigma_f if config.sigma_f > 0.0
                     else 1e-16 * max(1.0, abs(best_noisy)))
        if improvement > threshold:
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= config.stagnation_window:
                reason = "stagnation"
                break

    return SolverResult(x, reason, oracle.eval_count, best_noisy, best_true,
                        trace)
