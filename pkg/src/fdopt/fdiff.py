"""Finite-difference derivative estimates and their error calculus.

Two interval regimes are supported.  In the machine-precision regime the
interval follows the classic sqrt/cbrt-of-eps rules with max(1, |x_i|)
scaling.  In the noise-optimal regime the interval balances the truncation
term against noise amplification,

    forward:  h_i = 8^(1/4) * sqrt(sigma_f / L_i)
    central:  h_i = (3 sigma_f / M_i)^(1/3)

where L_i and M_i bound the second and third derivative along coordinate i.
The corresponding mean-squared-error bounds and predicted gradient noise
levels are exposed so callers can reason about the accuracy of what they get.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

FORWARD = "forward"
CENTRAL = "central"

EPS_MACHINE = 2.0 ** -52

_EIGHTH_ROOT = 8.0 ** 0.25   # forward-interval constant
_FOURTH_ROOT2 = 2.0 ** 0.25  # forward gradient-noise constant


def _check_scheme(scheme):
    if scheme not in (FORWARD, CENTRAL):
        raise ValueError(f"unknown difference scheme {scheme!r}")


@dataclass(frozen=True)
class IntervalRule:
    """How to pick the differencing interval for each coordinate."""

    tag: str                      # "machine_eps" | "noise_optimal"
    sigma_f: float = 0.0
    curvature: object = None      # scalar or per-coordinate array (L or M)

    def __post_init__(self):
        if self.tag not in ("machine_eps", "noise_optimal"):
            raise ValueError(f"unknown interval rule {self.tag!r}")


def machine_eps_rule() -> IntervalRule:
    return IntervalRule("machine_eps")


def noise_optimal_rule(sigma_f, curvature) -> IntervalRule:
    return IntervalRule("noise_optimal", sigma_f, np.asarray(curvature, dtype=float))


def optimal_interval(sigma_f, curvature, scheme) -> float:
    """Closed-form minimizer of the mean-squared-error bound."""
    _check_scheme(scheme)
    if curvature <= 0.0:
        raise ValueError("curvature bound must be positive")
    if scheme == FORWARD:
        return _EIGHTH_ROOT * np.sqrt(sigma_f / curvature)
    return (3.0 * sigma_f / curvature) ** (1.0 / 3.0)


def interval(x_i, rule: IntervalRule, scheme, coord: int = 0) -> float:
    """Differencing interval for one coordinate under the given rule."""
    _check_scheme(scheme)
    if rule.tag == "machine_eps":
        scale = max(1.0, abs(x_i))
        if scheme == FORWARD:
            return scale * np.sqrt(EPS_MACHINE)
        return scale * EPS_MACHINE ** (1.0 / 3.0)
    curv = np.asarray(rule.curvature, dtype=float)
    c = float(curv) if curv.ndim == 0 else float(curv[coord])
    return optimal_interval(rule.sigma_f, c, scheme)


def fd_gradient(oracle, x, scheme, rule: IntervalRule):
    """Coordinate-wise difference gradient.

    Forward differencing shares one base evaluation across all coordinates,
    costing n+1 evaluations; central costs 2n.  Returns (g, evals).
    """
    _check_scheme(scheme)
    x = np.asarray(x, dtype=float)
    n = x.size
    g = np.empty(n)
    if scheme == FORWARD:
        f0 = oracle.noisy_value(x)
        for i in range(n):
            h = interval(x[i], rule, scheme, i)
            xp = x.copy()
            xp[i] += h
            g[i] = (oracle.noisy_value(xp) - f0) / h
        return g, n + 1
    for i in range(n):
        h = interval(x[i], rule, scheme, i)
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        g[i] = (oracle.noisy_value(xp) - oracle.noisy_value(xm)) / (2.0 * h)
    return g, 2 * n


def fd_directional(oracle, x, p, scheme, h, f_base: Optional[float] = None) -> float:
    """Difference estimate of the directional derivative grad(phi)'p.

    The perturbation is taken along the unit direction and rescaled by ||p||.
    For forward differencing a precomputed f(x) may be passed as ``f_base`` to
    save one evaluation.
    """
    _check_scheme(scheme)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    if h <= 0.0:
        raise ValueError("interval must be positive")
    pu = p / norm
    if scheme == FORWARD:
        f_plus = oracle.noisy_value(x + h * pu)
        if f_base is None:
            f_base = oracle.noisy_value(x)
        return (f_plus - f_base) / h * norm
    f_plus = oracle.noisy_value(x + h * pu)
    f_minus = oracle.noisy_value(x - h * pu)
    return (f_plus - f_minus) / (2.0 * h) * norm


def fd_jacobian(oracle, x, intervals, base: Optional[np.ndarray] = None):
    """Forward-difference Jacobian of a residual oracle.

    ``intervals`` is broadcast to an (m, n) matrix of positive entries H with
    Jhat[i, j] = (r_i(x + H[i,j] e_j) - r_i(x)) / H[i,j].  Base components are
    evaluated once each unless supplied.  Returns (Jhat, units) where units
    follow the m-components-per-evaluation convention.
    """
    x = np.asarray(x, dtype=float)
    m, n = oracle.problem.m, oracle.problem.n
    H = np.broadcast_to(np.asarray(intervals, dtype=float), (m, n))
    if np.any(H <= 0.0):
        raise ValueError("all differencing intervals must be positive")
    units = float(n)
    if base is None:
        base = np.array([oracle.noisy_residual(x, i) for i in range(m)])
        units += 1.0
    J = np.empty((m, n))
    for j in range(n):
        for i in range(m):
            xp = x.copy()
            xp[j] += H[i, j]
            J[i, j] = (oracle.noisy_residual(xp, i) - base[i]) / H[i, j]
    return J, units


def mse_bound(h, curvature, sigma_f, scheme) -> float:
    """Upper bound on the mean-squared error of the difference quotient."""
    _check_scheme(scheme)
    if h <= 0.0:
        raise ValueError("interval must be positive")
    if scheme == FORWARD:
        return curvature ** 2 * h ** 2 / 4.0 + 2.0 * sigma_f ** 2 / h ** 2
    return curvature ** 2 * h ** 4 / 36.0 + sigma_f ** 2 / (2.0 * h ** 2)


def gradient_noise_level(sigma_f, curvature, scheme) -> float:
    """Predicted standard deviation of the difference estimate along one
    direction when its interval is chosen optimally."""
    _check_scheme(scheme)
    if scheme == FORWARD:
        return _FOURTH_ROOT2 * np.sqrt(curvature * sigma_f)
    return 3.0 ** (1.0 / 6.0) / 2.0 * curvature ** (1.0 / 3.0) * sigma_f ** (2.0 / 3.0)


def full_gradient_noise_level(per_coordinate) -> float:
    """Root of the summed per-coordinate mean-squared errors."""
    v = np.asarray(per_coordinate, dtype=float)
    if np.any(v < 0.0):
        raise ValueError("per-coordinate noise levels must be nonnegative")
    return float(np.linalg.norm(v))
