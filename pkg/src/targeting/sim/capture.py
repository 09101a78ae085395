"""Two-window capture–recapture of an onionsite's active visitors.

Middles are compromised once per trial. In each window every client makes
its visits, each through a uniformly chosen guard from its set and a uniform
middle. Visits through compromised middles are tallied per guard, summed over
all clients sharing it; a guard reaching ``threshold`` in a window counts as
captured. The Chapman estimate is taken from the two captured sets.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from ..analytic import chapman_estimate
from ..model import AdversaryParams, CaptureScenario, ClientGroup, SeededRng, validate_scenario
from .engine import DEFAULT_SEED, SweepResult, check_budget, run_trials, sample_guard_sets


@dataclass(frozen=True)
class CaptureTrialResult:
    c1: int
    c2: int
    m2: int
    estimate: float
    realized_fraction: float = float("nan")


def _marked(rng, compromised, local, visits_client, k, n_guards, threshold):
    pick = rng.integers(k, size=visits_client.size)
    middle = rng.integers(compromised.size, size=visits_client.size)
    used = local[visits_client, pick]
    hits = np.bincount(used[compromised[middle]], minlength=n_guards)
    return hits >= threshold


def run_capture_trial(
    cap: CaptureScenario, adv: AdversaryParams, rng: SeededRng
) -> CaptureTrialResult:
    n, k = cap.n_clients, cap.guards_per_client
    compromised = rng.random(cap.middle_pool) < adv.middle_fraction
    sets = sample_guard_sets(rng, n, k, cap.guard_pool, cap.disjoint_guards)
    _, local = np.unique(sets, return_inverse=True)
    local = local.reshape(n, k)
    n_guards = int(local.max()) + 1
    per_client = np.repeat(
        [g.visits_per_window for g in cap.client_groups], [g.count for g in cap.client_groups]
    )
    visits_client = np.repeat(np.arange(n), per_client)

    first = _marked(rng, compromised, local, visits_client, k, n_guards, cap.threshold)
    second = _marked(rng, compromised, local, visits_client, k, n_guards, cap.threshold)
    c1, c2 = int(first.sum()), int(second.sum())
    m2 = int((first & second).sum())
    return CaptureTrialResult(c1, c2, m2, chapman_estimate(c1, c2, m2), float(compromised.mean()))


def capture_trials(
    cap: CaptureScenario, adv: AdversaryParams, trials: int, seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> np.ndarray:
    """Structured array of per-trial (c1, c2, m2, estimate, realized_fraction)."""
    validate_scenario(cap)
    out = run_trials(run_capture_trial, (cap, adv), trials, seed, workers)
    rec = np.zeros(trials, dtype=[("c1", "i8"), ("c2", "i8"), ("m2", "i8"),
                                  ("estimate", "f8"), ("realized_fraction", "f8")])
    for i, r in enumerate(out):
        rec[i] = (r.c1, r.c2, r.m2, r.estimate, r.realized_fraction)
    return rec


def mix_label(cap: CaptureScenario) -> str:
    return "+".join(f"{g.count}x{g.visits_per_window}" for g in cap.client_groups)


@dataclass(frozen=True)
class CapturePoint:
    panel: str
    scenario: CaptureScenario
    adversary: AdversaryParams


DEFAULT_B = 0.25


def default_capture_grid(base: CaptureScenario | None = None, B: float = DEFAULT_B) -> list[CapturePoint]:
    """The four one-factor sweeps around the default (B=0.25, threshold 3, 225/25 mix, one guard)."""
    base = base or CaptureScenario()
    adv = AdversaryParams(B)
    pts = [CapturePoint("default", base, adv)]
    for b in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55):
        pts.append(CapturePoint("middle_fraction", base, AdversaryParams(b)))
    for t in (1, 2, 3, 5, 7, 10):
        pts.append(CapturePoint("threshold", replace(base, threshold=t), adv))
    for regular, targeted in ((25, 25), (225, 25), (475, 25), (2475, 25), (50, 50)):
        groups = (ClientGroup(regular, 2), ClientGroup(targeted, 10))
        pts.append(CapturePoint("client_mix", replace(base, client_groups=groups), adv))
    for k in (1, 2, 3, 5, 10):
        pts.append(CapturePoint("guards_per_client", replace(base, guards_per_client=k), adv))
    return pts


CAPTURE_COLUMNS = [
    "panel", "middle_fraction", "threshold", "client_mix", "guards_per_client",
    "target_size", "trials", "mean_estimate", "sd_estimate", "min_estimate", "q1_estimate",
    "median_estimate", "q3_estimate", "max_estimate", "median_abs_error", "mean_abs_error",
    "se_abs_error", "mean_c1", "mean_c2", "mean_m2", "realized_middle_fraction",
]

TRIAL_COLUMNS = [
    "panel", "middle_fraction", "threshold", "client_mix", "guards_per_client",
    "trial_id", "c1", "c2", "m2", "estimate",
]


def _params(p: CapturePoint) -> dict:
    return {
        "panel": p.panel,
        "middle_fraction": p.adversary.middle_fraction,
        "threshold": p.scenario.threshold,
        "client_mix": mix_label(p.scenario),
        "guards_per_client": p.scenario.guards_per_client,
    }


def summarize(p: CapturePoint, rec: np.ndarray) -> dict:
    est = rec["estimate"]
    abs_err = np.abs(est - p.scenario.target_size)
    q = np.percentile(est, [0, 25, 50, 75, 100])
    n = est.size
    return {
        **_params(p),
        "target_size": p.scenario.target_size,
        "trials": n,
        "mean_estimate": est.mean(),
        "sd_estimate": est.std(ddof=1) if n > 1 else 0.0,
        "min_estimate": q[0], "q1_estimate": q[1], "median_estimate": q[2],
        "q3_estimate": q[3], "max_estimate": q[4],
        "median_abs_error": float(np.median(abs_err)),
        "mean_abs_error": abs_err.mean(),
        "se_abs_error": abs_err.std(ddof=1) / np.sqrt(n) if n > 1 else 0.0,
        "mean_c1": rec["c1"].mean(), "mean_c2": rec["c2"].mean(), "mean_m2": rec["m2"].mean(),
        "realized_middle_fraction": rec["realized_fraction"].mean(),
    }


def trial_rows(p: CapturePoint, rec: np.ndarray) -> list[dict]:
    base = _params(p)
    return [
        {**base, "trial_id": i, "c1": r["c1"], "c2": r["c2"], "m2": r["m2"], "estimate": r["estimate"]}
        for i, r in enumerate(rec)
    ]


def run_capture_sweep(
    grid: Iterable[CapturePoint],
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> SweepResult:
    """Summary rows per grid point; full per-trial records kept in ``samples`` for violins."""
    grid = list(grid)
    check_budget(len(grid), trials)
    result = SweepResult(columns=list(CAPTURE_COLUMNS))
    for i, p in enumerate(grid):
        rec = capture_trials(p.scenario, p.adversary, trials, seed, workers)
        result.rows.append(summarize(p, rec))
        result.samples[i] = (p, rec)
    return result
