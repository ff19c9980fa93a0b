"""Derivative-free optimization through finite differences.

Gradients and Jacobians of noisy black-box functions are approximated by
coordinate differences with intervals tuned to the noise level and local
curvature bounds, then fed to quasi-Newton and trust-region solvers.  A
benchmarking layer records evaluation-count traces and renders log-ratio
comparison profiles.
"""

from . import bench, fdiff, lbfgs, leastsq, lipschitz, noise, problems
from .noise import NoiseModel, NoisyOracle
from .problems import ResidualProblem, SmoothProblem, catalog

__all__ = [
    "bench",
    "fdiff",
    "lbfgs",
    "leastsq",
    "lipschitz",
    "noise",
    "problems",
    "NoiseModel",
    "NoisyOracle",
    "ResidualProblem",
    "SmoothProblem",
    "catalog",
]
