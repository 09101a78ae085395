"""Trial fan-out and CSV plumbing shared by the simulators.

Trial ``i`` of every grid point draws from ``SeededRng(seed, i)``, so grid
points share common random numbers and any trial can be replayed on its own.
Results are always reassembled in trial order, which makes aggregates
independent of the worker count.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ..model import ResourceCapError, SeededRng

DEFAULT_SEED = 20170101
DEFAULT_TRIAL_BUDGET = 20_000_000


def check_budget(points: int, trials: int, budget: int = DEFAULT_TRIAL_BUDGET) -> None:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if points * trials > budget:
        raise ResourceCapError(
            f"{points} grid points x {trials} trials exceeds budget of {budget} trials"
        )


def _run_chunk(fn: Callable, args: tuple, seed: int, start: int, stop: int) -> list:
    return [fn(*args, SeededRng(seed, i)) for i in range(start, stop)]


def run_trials(
    fn: Callable[..., Any], args: tuple, trials: int, seed: int, workers: int = 1
) -> list:
    """Evaluate ``fn(*args, rng)`` for trial indices 0..trials-1, in index order."""
    if workers <= 1 or trials < 2 * workers:
        return _run_chunk(fn, args, seed, 0, trials)
    n_chunks = workers * 4
    bounds = np.linspace(0, trials, n_chunks + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_chunk, fn, args, seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        out: list = []
        for f in futures:
            out.extend(f.result())
    return out


def fmt(v: Any) -> str:
    """Stable textual form for CSV cells."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return f"{v:.10g}"
    return str(v)


@dataclass
class SweepResult:
    """Tabular sweep output with a fixed column order."""

    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    samples: dict = field(default_factory=dict)  # grid key -> per-trial arrays

    def to_csv(self, path=None) -> str:
        return write_csv(self.columns, self.rows, path)

    def column(self, name: str, **where) -> list:
        return [r[name] for r in self.rows if all(r.get(k) == v for k, v in where.items())]


def write_csv(columns: Sequence[str], rows: Sequence[dict], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def sample_guard_sets(rng: SeededRng, n_clients: int, k: int, pool: int, disjoint: bool) -> np.ndarray:
    """Guard ids, shape (n_clients, k), distinct within each row.

    Disjoint mode draws all n_clients*k guards without replacement. Otherwise
    rows are drawn independently; rows holding a repeated guard are redrawn.
    """
    if disjoint:
        return rng.choice_without_replacement(pool, n_clients * k).reshape(n_clients, k)
    sets = rng.integers(pool, size=(n_clients, k))
    if k == 1:
        return sets
    while True:
        s = np.sort(sets, axis=1)
        bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
        if bad.size == 0:
            return sets
        sets[bad] = rng.integers(pool, size=(bad.size, k))
