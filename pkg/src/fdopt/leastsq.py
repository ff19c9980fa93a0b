"""Levenberg-Marquardt trust-region solver for noisy nonlinear least squares.

The Jacobian is approximated by per-residual, per-coordinate forward
differences whose intervals come from second-derivative bounds on the
individual residual components.  Three bounding policies are supported: a
one-time estimate at the start (probe cost charged to the budget), an
idealized re-estimate of every entry at every iterate from the noise-free
residuals (uncharged, used to study how much accuracy better bounds buy),
and the trivial all-ones fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fdiff, lipschitz
from .lipschitz import FLOOR
from .noise import ComponentView, NoisyOracle
from .records import IterationRecord, SolverResult

INITIAL_ONLY = "initial_only"
IDEALIZED = "idealized_per_iteration"
UNIT = "unit"

_MW_FAILURE_BOUND = 1.0   # failed probes fall back to unit curvature here


@dataclass
class LmConfig:
    delta0: float = 1.0
    eta: float = 1e-4
    expand: float = 2.0
    shrink: float = 0.25
    max_evals: float | None = None      # defaults to 500 n units
    lipschitz_policy: str = INITIAL_ONLY
    sigma_f: float = 0.0
    min_radius: float = 1e-8
    tau: float = 1e-6
    mw_params: lipschitz.MWParams = None

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if not self.shrink < 1.0 < self.expand:
            raise ValueError("need shrink < 1 < expand")
        if self.mw_params is None:
            self.mw_params = lipschitz.MWParams()


@dataclass
class GaussNewtonModel:
    g: np.ndarray
    h: np.ndarray


def build_model(jac, r) -> GaussNewtonModel:
    """Gauss-Newton gradient J'r and model Hessian J'J."""
    jac = np.asarray(jac, dtype=float)
    r = np.asarray(r, dtype=float)
    if jac.shape[0] != r.shape[0]:
        raise ValueError("residual vector and Jacobian rows disagree")
    h = jac.T @ jac
    return GaussNewtonModel(jac.T @ r, 0.5 * (h + h.T))


def _solve_shifted(h, g, lam):
    return np.linalg.solve(h + lam * np.eye(h.shape[0]), -g)


def tr_step(model: GaussNewtonModel, delta, max_iters=50):
    """Approximately minimize the quadratic model inside a ball of radius
    delta: interior Gauss-Newton step when it fits, otherwise a damped step
    with ||s|| within ten percent of the boundary, found by safeguarded
    Newton iteration on the damping parameter."""
    if delta <= 0.0:
        raise ValueError("trust radius must be positive")
    g, h = model.g, model.h
    n = g.size
    trace_h = float(np.trace(h))
    lam_floor = 1e-12 * max(trace_h, 0.0) / n + 1e-300
    s = _solve_shifted(h, g, lam_floor)
    norm = float(np.linalg.norm(s))
    if norm <= delta:
        return s, 0.0

    # bracket a damping value that pulls the step inside the ball
    lam_lo = lam_floor
    lam_hi = max(1.0, lam_floor)
    while True:
        s = _solve_shifted(h, g, lam_hi)
        if np.linalg.norm(s) <= delta:
            break
        lam_lo = lam_hi
        lam_hi *= 10.0

    lam = math.sqrt(lam_lo * lam_hi)
    for _ in range(max_iters):
        s = _solve_shifted(h, g, lam)
        norm = float(np.linalg.norm(s))
        if 0.9 * delta <= norm <= 1.1 * delta:
            return s, lam
        if norm > delta:
            lam_lo = lam
        else:
            lam_hi = lam
        # Newton step on 1/||s||, which is nearly linear in lam
        q = np.linalg.solve(model.h + lam * np.eye(n), s)
        denom = float(s @ q)
        if denom > 0.0:
            lam_new = lam + (norm - delta) / delta * (norm * norm / denom)
        else:
            lam_new = math.sqrt(lam_lo * lam_hi)
        if not lam_lo < lam_new < lam_hi:
            lam_new = math.sqrt(lam_lo * lam_hi)
        lam = lam_new
    return s, lam


def _gap_reached(phi, phi_star, tau):
    return phi - phi_star <= tau * max(1.0, abs(phi_star))


def _initial_curvature(oracle, x, config):
    """Per-(component, coordinate) second-derivative bounds at the start;
    probe evaluations are charged through the oracle."""
    m, n = oracle.problem.m, oracle.problem.n
    L = np.empty((m, n))
    for i in range(m):
        view = ComponentView(oracle, i)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            outcome = lipschitz.mw_estimate(view, x, e, config.sigma_f,
                                            config.mw_params)
            L[i, j] = outcome.value if outcome.success else _MW_FAILURE_BOUND
    return L


def _interval_matrix(x, config, curvature):
    if config.sigma_f == 0.0:
        h_row = np.maximum(1.0, np.abs(x)) * math.sqrt(fdiff.EPS_MACHINE)
        return np.broadcast_to(h_row, curvature.shape).copy()
    return 8.0 ** 0.25 * np.sqrt(config.sigma_f / np.maximum(curvature, FLOOR))


def lm_minimize(oracle: NoisyOracle, x0, config: LmConfig,
                phi_star=None) -> SolverResult:
    """Trust-region Gauss-Newton loop on the observed residuals.

    Steps are accepted when the realized reduction is at least eta times the
    model reduction; the radius doubles after near-boundary, high-quality
    steps and quarters after poor ones.  Runs stop at the evaluation budget,
    when the radius collapses, or when the true objective reaches the
    optimality-gap target.
    """
    problem = oracle.problem
    n, m = problem.n, problem.m
    x = np.asarray(x0, dtype=float).copy()
    max_evals = config.max_evals if config.max_evals is not None else 500.0 * n
    if phi_star is None:
        phi_star = problem.phi_star

    trace = []
    delta = config.delta0
    lam = 0.0

    if config.lipschitz_policy == INITIAL_ONLY and config.sigma_f > 0.0:
        curvature = _initial_curvature(oracle, x, config)
    else:
        curvature = np.ones((m, n))

    k = 0
    reason = "budget"
    best_noisy = math.inf
    best_true = math.inf
    while oracle.eval_count < max_evals:
        k += 1
        if config.lipschitz_policy == IDEALIZED and config.sigma_f > 0.0:
            curvature = lipschitz.idealized_residual_lipschitz(problem, x)

        r = oracle.noisy_residual_vector(x)
        if not np.all(np.isfinite(r)):
            reason = "failure"
            break
        f_x = 0.5 * float(r @ r)
        jac, _ = fdiff.fd_jacobian(oracle, x, _interval_matrix(x, config, curvature),
                                   base=r)
        model = build_model(jac, r)

        true_phi = oracle.true_value(x)
        best_true = min(best_true, true_phi)
        best_noisy = min(best_noisy, f_x)
        trace.append(IterationRecord(k, oracle.eval_count, f_x, true_phi,
                                     grad_norm=float(np.linalg.norm(model.g)),
                                     delta=delta, lam=lam))
        if phi_star is not None and _gap_reached(true_phi, phi_star, config.tau):
            reason = "gap"
            break

        accepted = False
        while not accepted:
            s, lam = tr_step(model, delta)
            predicted = -(float(model.g @ s) + 0.5 * float(s @ model.h @ s))
            rho = -math.inf
            if predicted > 0.0:
                f_trial = oracle.noisy_objective(x + s)
                rho = (f_x - f_trial) / predicted
            if rho >= config.eta:
                x = x + s
                accepted = True
                if rho > 0.75 and np.linalg.norm(s) >= 0.9 * delta:
                    delta *= config.expand
            if rho < 0.25:
                delta *= config.shrink
            if delta < config.min_radius:
                reason = "radius"
                break
            if not accepted and oracle.eval_count >= max_evals:
                reason = "budget"
                break
        if reason in ("radius",) or (not accepted and reason == "budget"):
            break

    return SolverResult(x, reason, oracle.eval_count, best_noisy, best_true,
                        trace)
