"""Stochastic evaluation oracles.

Solvers never see a problem's value function directly; they read it through a
NoisyOracle that injects additive uniform noise and counts evaluations.  The
noise stream comes from numpy's Philox generator, a counter-based 64-bit
family with splittable substreams, keyed by the oracle seed; one uniform
variate is consumed per noisy evaluation, in call order, which makes every
trace reproducible (and replayable in vectorized form) for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import ResidualProblem, _check_dim

_HALF_WIDTH = math.sqrt(3.0)  # uniform on [-sqrt(3), sqrt(3)] has unit variance


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"        # "none" | "uniform"
    sigma_f: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "uniform"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma_f < 0.0:
            raise ValueError("sigma_f must be nonnegative")


class NoisyOracle:
    """Counted, seeded access to a problem's (possibly noisy) evaluations.

    The true objective remains reachable through ``true_value`` for reporting;
    that path draws no noise and moves no counter, so it can never influence
    the evaluation budget.
    """

    def __init__(self, problem, model: NoiseModel | None = None):
        self.problem = problem
        self.model = model if model is not None else NoiseModel()
        self._rng = np.random.Generator(np.random.Philox(self.model.seed))
        self._evals = 0
        self._component_calls = 0
        self._is_residual = isinstance(problem, ResidualProblem)

    @property
    def is_residual(self) -> bool:
        return self._is_residual

    @property
    def eval_count(self) -> float:
        """Evaluation units consumed; fractional for residual oracles."""
        if self._is_residual:
            return self._component_calls / self.problem.m
        return self._evals

    @property
    def reported_eval_count(self) -> int:
        """Units rounded up, the conservative figure for reports."""
        return int(math.ceil(self.eval_count - 1e-12))

    @property
    def residual_eval_count(self) -> int:
        return self._component_calls

    def _noise(self) -> float:
        if self.model.kind == "none":
            return 0.0
        return self.model.sigma_f * self._rng.uniform(-_HALF_WIDTH, _HALF_WIDTH)

    def noisy_value(self, x) -> float:
        if self._is_residual:
            raise ValueError("noisy_value requires a smooth problem; "
                             "use noisy_residual / noisy_objective")
        x = _check_dim(x, self.problem.n)
        self._evals += 1
        return float(self.problem.value(x)) + self._noise()

    def noisy_residual(self, x, i: int) -> float:
        if not self._is_residual:
            raise ValueError("noisy_residual requires a residual problem")
        x = _check_dim(x, self.problem.n)
        if not 0 <= i < self.problem.m:
            raise ValueError(f"component index {i} outside [0, {self.problem.m})")
        self._component_calls += 1
        return float(self.problem.residual(x, i)) + self._noise()

    def noisy_residual_vector(self, x) -> np.ndarray:
        """All m components at x, freshly drawn noise; costs one unit."""
        m = self.problem.m
        return np.array([self.noisy_residual(x, i) for i in range(m)])

    def noisy_objective(self, x) -> float:
        """Observed least-squares objective, half the squared residual norm."""
        r = self.noisy_residual_vector(x)
        return 0.5 * float(r @ r)

    def true_value(self, x) -> float:
        """Noise-free objective; reporting channel only, never counted."""
        x = _check_dim(x, self.problem.n)
        if self._is_residual:
            total = 0.0
            for i in range(self.problem.m):
                gi = self.problem.residual(x, i)
                total += gi * gi
            return 0.5 * total
        return float(self.problem.value(x))


class ComponentView:
    """A single residual component presented as a scalar noisy function.

    Evaluations route through the parent oracle so unit accounting stays
    intact; curvature probes on component i can therefore be charged exactly.
    """

    def __init__(self, oracle: NoisyOracle, i: int):
        self.oracle = oracle
        self.i = i

    def noisy_value(self, x) -> float:
        return self.oracle.noisy_residual(x, self.i)


def estimate_noise_level(oracle: NoisyOracle, x, k: int) -> float:
    """Sample standard deviation of k repeated evaluations at fixed x."""
    if k < 2:
        raise ValueError("need at least two samples")
    vals = np.array([oracle.noisy_value(x) for _ in range(k)])
    return float(np.std(vals, ddof=1))
