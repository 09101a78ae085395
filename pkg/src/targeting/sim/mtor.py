"""Monte Carlo of a middle-relay adversary watching MTor cabal meetings.

Per trial: middles are compromised i.i.d. with probability B once, each
client's guard set is fixed, and every meeting each client picks one of its
guards. The first client on a guard in a meeting picks that guard's middle;
later clients on the same guard reuse it (deduplication). A guard seen behind
a compromised middle for the first time gets its single bridging attempt.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..model import AdversaryParams, CabalScenario, SeededRng, validate_scenario
from .engine import DEFAULT_SEED, SweepResult, check_budget, run_trials, sample_guard_sets


@dataclass
class MtorTrialResult:
    identified: np.ndarray  # identified members after meeting 1..m
    bridged: frozenset
    failed: frozenset
    realized_fraction: float


def run_mtor_trial(
    scenario: CabalScenario, adv: AdversaryParams, rng: SeededRng
) -> MtorTrialResult:
    c, k, m = scenario.cabal_size, scenario.guards_per_client, scenario.meetings
    M = scenario.middle_pool

    compromised = rng.random(M) < adv.middle_fraction
    sets = sample_guard_sets(rng, c, k, scenario.guard_pool, scenario.disjoint_guards)
    guard_ids, local = np.unique(sets, return_inverse=True)
    local = local.reshape(c, k)
    n_guards = guard_ids.size
    bridge_draw = rng.random(n_guards)
    pick = rng.integers(k, size=(m, c))
    middle = rng.integers(M, size=(m, c))

    used = local[np.arange(c), pick]  # (m, c) local guard index per client per meeting
    if not scenario.disjoint_guards:
        # one middle per (meeting, guard): the lowest-index client's draw wins
        key = (np.arange(m)[:, None] * n_guards + used).ravel()
        _, first, inv = np.unique(key, return_index=True, return_inverse=True)
        middle = middle.ravel()[first][inv].reshape(m, c)
    seen = compromised[middle]

    meeting = np.broadcast_to(np.arange(m)[:, None], (m, c))
    first_seen = np.full(n_guards, m)
    np.minimum.at(first_seen, used[seen], meeting[seen])
    attempted = first_seen < m
    success = attempted & (bridge_draw < adv.bridge_prob)
    bridged_at = np.where(success, first_seen, m)

    hit = bridged_at[used] <= meeting
    ident_at = np.where(hit.any(axis=0), hit.argmax(axis=0), m)
    identified = np.cumsum(np.bincount(ident_at, minlength=m + 1)[:m])

    return MtorTrialResult(
        identified=identified,
        bridged=frozenset(guard_ids[success].tolist()),
        failed=frozenset(guard_ids[attempted & ~success].tolist()),
        realized_fraction=float(compromised.mean()),
    )


def _trial_row(scenario, adv, rng):
    r = run_mtor_trial(scenario, adv, rng)
    return r.identified, r.realized_fraction


def mtor_trials(
    scenario: CabalScenario, adv: AdversaryParams, trials: int, seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Identified counts, shape (trials, meetings), and realized compromised fractions."""
    validate_scenario(scenario)
    out = run_trials(_trial_row, (scenario, adv), trials, seed, workers)
    counts = np.array([o[0] for o in out], dtype=np.int64).reshape(trials, scenario.meetings)
    fracs = np.array([o[1] for o in out])
    return counts, fracs


MTOR_COLUMNS = [
    "cabal_size", "guards_per_client", "middle_fraction", "bridge_prob", "trials",
    "meeting", "mean_identified", "se_identified", "mean_fraction", "se_fraction",
    "realized_middle_fraction",
]


@dataclass(frozen=True)
class MtorPoint:
    middle_fraction: float
    bridge_prob: float
    guards_per_client: int


def default_mtor_grid() -> list[MtorPoint]:
    """B sweep at p_b=0.5 for one and three guards, then p_b sweep at B=0.2 with three guards."""
    pts = [
        MtorPoint(B, 0.5, k) for k in (1, 3) for B in (0.05, 0.1, 0.15, 0.2, 0.5)
    ]
    pts += [
        MtorPoint(0.2, pb, 3) for pb in (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)
        if MtorPoint(0.2, pb, 3) not in pts
    ]
    return pts


def run_mtor_sweep(
    scenario: CabalScenario,
    grid: Iterable[MtorPoint | Sequence],
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    keep_samples: bool = False,
) -> SweepResult:
    grid = [p if isinstance(p, MtorPoint) else MtorPoint(*p) for p in grid]
    check_budget(len(grid), trials)
    result = SweepResult(columns=list(MTOR_COLUMNS))
    for p in grid:
        sc = validate_scenario(replace(scenario, guards_per_client=p.guards_per_client))
        adv = AdversaryParams(p.middle_fraction, p.bridge_prob)
        counts, fracs = mtor_trials(sc, adv, trials, seed, workers)
        mean = counts.mean(axis=0)
        se = counts.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros_like(mean)
        for t in range(sc.meetings):
            result.rows.append({
                "cabal_size": sc.cabal_size,
                "guards_per_client": p.guards_per_client,
                "middle_fraction": p.middle_fraction,
                "bridge_prob": p.bridge_prob,
                "trials": trials,
                "meeting": t + 1,
                "mean_identified": mean[t],
                "se_identified": se[t],
                "mean_fraction": mean[t] / sc.cabal_size,
                "se_fraction": se[t] / sc.cabal_size,
                "realized_middle_fraction": fracs.mean(),
            })
        if keep_samples:
            result.samples[p] = counts
    return result
