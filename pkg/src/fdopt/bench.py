"""Experiment records, termination predicates, log-ratio profiles, and the
CSV/figure emitters.

A profile compares two solvers over a paired problem set: for each problem
the base-2 log of the ratio of a per-problem metric (evaluations to reach a
target, or best optimality gap) is computed, the ratios are sorted, and the
shaded area around the zero line summarizes which side won more.  Runs that
never reach the target are assigned a large sentinel so their ratios stay
finite; plots cap bars and flag those problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SENTINEL = 2.0 ** 40
PLOT_CAP = 20.0   # bars are clipped to +/- log2(2**20)

GAP_CLAMP = 1e-16


@dataclass
class RunRecord:
    solver_id: str
    problem_id: str
    sigma_f: float
    seed: int
    trace: list = field(default_factory=list)   # rows (evals, noisy_f, true_phi)
    terminal_reason: str = "budget"

    @property
    def key(self):
        return (self.problem_id, self.sigma_f, self.seed)

    def best_true_phi(self) -> float:
        return min(row[2] for row in self.trace)


def record_from_result(solver_id, problem_id, sigma_f, seed, result) -> RunRecord:
    trace = [(rec.evals, rec.noisy_f, rec.true_phi) for rec in result.trace]
    return RunRecord(solver_id, problem_id, sigma_f, seed, trace, result.reason)


@dataclass
class Profile:
    ratios: np.ndarray
    problem_ids: list
    failed_a: np.ndarray
    failed_b: np.ndarray
    sentinel: float = SENTINEL

    @property
    def failure_mask(self) -> np.ndarray:
        return self.failed_a | self.failed_b


def gap_target(phi_k, phi_star, tau) -> bool:
    """Absolute optimality-gap test with unit floor on the scale."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    return phi_k - phi_star <= tau * max(1.0, abs(phi_star))


def relative_target(phi_k, phi_baseline, phi_0, tau) -> bool:
    """Fraction of the initial gap closed relative to a baseline solution."""
    if phi_0 <= phi_baseline:
        raise ValueError("degenerate run: starting value does not exceed baseline")
    return phi_k - phi_baseline <= tau * (phi_0 - phi_baseline)


def evals_to_target(record: RunRecord, predicate) -> float:
    """Cumulative evaluations at the first trace row satisfying the
    predicate; the sentinel when none does."""
    for row in record.trace:
        if predicate(row):
            return float(row[0])
    return SENTINEL


def _pair(records_a, records_b):
    by_key_a = {}
    for rec in records_a:
        if rec.key in by_key_a:
            raise ValueError(f"duplicate record for {rec.key} on side A")
        by_key_a[rec.key] = rec
    by_key_b = {}
    for rec in records_b:
        if rec.key in by_key_b:
            raise ValueError(f"duplicate record for {rec.key} on side B")
        by_key_b[rec.key] = rec
    if set(by_key_a) != set(by_key_b):
        odd = set(by_key_a) ^ set(by_key_b)
        raise ValueError(f"unpaired problems: {sorted(odd)}")
    keys = sorted(by_key_a)
    return [(by_key_a[k], by_key_b[k]) for k in keys]


def _sorted_profile(entries):
    entries.sort(key=lambda e: e[0])
    ratios = np.array([e[0] for e in entries])
    ids = [e[1] for e in entries]
    fa = np.array([e[2] for e in entries], dtype=bool)
    fb = np.array([e[3] for e in entries], dtype=bool)
    return Profile(ratios, ids, fa, fb)


def log_ratio_profile(records_a, records_b, predicate) -> Profile:
    """Sorted log2 ratios of evaluations-to-target between paired runs."""
    entries = []
    for rec_a, rec_b in _pair(records_a, records_b):
        ea = evals_to_target(rec_a, predicate)
        eb = evals_to_target(rec_b, predicate)
        entries.append((math.log2(ea / eb), rec_a.problem_id,
                        ea >= SENTINEL, eb >= SENTINEL))
    return _sorted_profile(entries)


def accuracy_profile(records_a, records_b, phi_star) -> Profile:
    """Sorted log2 ratios of best clamped optimality gaps between paired
    runs; ``phi_star`` maps problem ids to optimal values."""
    entries = []
    for rec_a, rec_b in _pair(records_a, records_b):
        if rec_a.problem_id not in phi_star:
            raise ValueError(f"no optimal value known for {rec_a.problem_id}")
        star = phi_star[rec_a.problem_id]
        gap_a = max(rec_a.best_true_phi() - star, GAP_CLAMP)
        gap_b = max(rec_b.best_true_phi() - star, GAP_CLAMP)
        entries.append((math.log2(gap_a / gap_b), rec_a.problem_id, False, False))
    return _sorted_profile(entries)


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_runs_csv(records, path):
    lines = ["solver_id,problem_id,sigma_f,seed,evals,noisy_f,true_phi,reason"]
    for rec in records:
        for evals, noisy_f, true_phi in rec.trace:
            lines.append(",".join([
                rec.solver_id, rec.problem_id, _fmt(float(rec.sigma_f)),
                str(rec.seed), _fmt(float(evals)), _fmt(float(noisy_f)),
                _fmt(float(true_phi)), rec.terminal_reason,
            ]))
    _write_text(path, "\n".join(lines) + "\n")


def emit_profile_csv(profile: Profile, path):
    lines = ["problem_id,ratio,failed_A,failed_B"]
    for pid, ratio, fa, fb in zip(profile.problem_ids, profile.ratios,
                                  profile.failed_a, profile.failed_b):
        lines.append(",".join([pid, _fmt(float(ratio)), _fmt(bool(fa)),
                               _fmt(bool(fb))]))
    _write_text(path, "\n".join(lines) + "\n")


def emit_csv(obj, path):
    """Write either a list of run records or a profile, schema per type."""
    if isinstance(obj, Profile):
        emit_profile_csv(obj, path)
    else:
        emit_runs_csv(obj, path)


def _write_text(path, text):
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def load_runs_csv(path) -> list:
    """Read records back; rows sharing (solver, problem, sigma, seed) fold
    into one record in file order."""
    path = Path(path)
    records = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = ["solver_id", "problem_id", "sigma_f", "seed", "evals",
                    "noisy_f", "true_phi", "reason"]
        if header != expected:
            raise ValueError(f"unexpected header in {path}: {header}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            solver, pid, sigma, seed, evals, noisy_f, true_phi, reason = parts
            key = (solver, pid, float(sigma), int(seed))
            rec = records.get(key)
            if rec is None:
                rec = RunRecord(solver, pid, float(sigma), int(seed), [],
                                reason)
                records[key] = rec
            rec.terminal_reason = reason
            rec.trace.append((float(evals), float(noisy_f), float(true_phi)))
    return list(records.values())


def profile_figure(profile: Profile, title=None):
    """Bar rendering of a sorted log-ratio profile; failures show as capped,
    marked bars."""
    fig, ax = plt.subplots(figsize=(4.0, 3.0))
    n = len(profile.ratios)
    if n:
        heights = np.clip(profile.ratios, -PLOT_CAP, PLOT_CAP)
        heights = np.where(profile.failure_mask & (profile.ratios > 0),
                           PLOT_CAP, heights)
        heights = np.where(profile.failure_mask & (profile.ratios < 0),
                           -PLOT_CAP, heights)
        x = np.arange(n)
        ax.bar(x, heights, width=1.0, color="#6699cc", edgecolor="#335577",
               linewidth=0.4)
        failed = np.flatnonzero(profile.failure_mask)
        if failed.size:
            ax.plot(failed, heights[failed], "x", color="#cc3333", markersize=5)
        ax.set_xlim(-0.5, n - 0.5)
        ax.set_ylim(-PLOT_CAP - 1, PLOT_CAP + 1)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("problem (sorted)")
    ax.set_ylabel("log2 ratio")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def emit_profile_svg(profile: Profile, path, title=None):
    fig = profile_figure(profile, title=title)
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
