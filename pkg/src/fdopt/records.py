"""Common result containers shared by the solvers and the experiment layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class IterationRecord:
    iteration: int
    evals: float          # cumulative evaluation units
    noisy_f: float
    true_phi: float
    alpha: float = 0.0
    grad_norm: float = float("nan")
    reestimated: bool = False
    delta: Optional[float] = None   # trust radius (least squares only)
    lam: Optional[float] = None     # damping parameter (least squares only)


@dataclass
class SolverResult:
    x: np.ndarray
    reason: str                     # budget|stagnation|gap|radius|failure
    evals: float
    best_noisy_f: float
    best_true_phi: float
    trace: list = field(default_factory=list)
