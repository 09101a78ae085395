"""Maximum-likelihood estimation of cabal size from per-meeting circuit counts.

Each meeting the adversary sees ``x_i`` cabal circuits at compromised middles,
modeled as Binomial(theta, B). Both the likelihood and the probability of an
observation vector are symmetric in its entries, so exact distributions are
built over sorted multisets weighted by their multinomial multiplicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .model import ResourceCapError, ValidationError

DEFAULT_MAX_THETA = 100
DEFAULT_STATE_CAP = 5_000_000
ERROR_THRESHOLDS = (1, 2, 5, 10)

# Log-likelihoods closer than this are treated as tied; exact ties
# (e.g. theta=9 vs 10 for x=(2), B=0.2) differ only by rounding noise.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class MleConfig:
    B: float
    meetings: int
    max_theta: int = DEFAULT_MAX_THETA
    true_sizes: tuple[int, ...] = tuple(range(1, 21))

    def __post_init__(self) -> None:
        if not 0.0 <= self.B <= 1.0:
            raise ValidationError(f"B out of [0,1]: {self.B!r}")
        if self.meetings < 1:
            raise ValidationError(f"meetings must be >= 1, got {self.meetings}")
        if max(self.true_sizes) > self.max_theta:
            raise ValidationError(
                f"max_theta ({self.max_theta}) below largest candidate observation "
                f"({max(self.true_sizes)})"
            )


@dataclass
class MleDistribution:
    """Exact distribution of the MLE for one true cabal size."""

    c: int
    m: int
    B: float
    max_theta: int
    masses: np.ndarray  # index = MLE value
    bound_mass: float = 0.0  # mass whose argmax sat on max_theta
    n_states: int = 0

    def as_dict(self) -> dict[int, float]:
        return {int(v): float(p) for v, p in enumerate(self.masses) if p > 0}

    def total(self) -> float:
        return float(self.masses.sum())

    def expected(self) -> float:
        return float(np.arange(len(self.masses)) @ self.masses)

    def expected_error(self) -> float:
        return self.expected() - self.c

    def rmse(self) -> float:
        err = np.arange(len(self.masses)) - self.c
        return math.sqrt(float(err**2 @ self.masses))

    def std(self) -> float:
        dev = np.arange(len(self.masses)) - self.expected()
        return math.sqrt(float(dev**2 @ self.masses))

    def error_probability(self, k: int) -> float:
        """P(|MLE - c| >= k)."""
        err = np.abs(np.arange(len(self.masses)) - self.c)
        return float(self.masses[err >= k].sum())


def _binom_logpmf(x: np.ndarray, theta: np.ndarray, B: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (
            gammaln(theta + 1) - gammaln(x + 1) - gammaln(theta - x + 1)
            + xlogy(x, B) + xlog1py(theta - x, -B)
        )
    return np.where(x > theta, -np.inf, out)


def likelihood(x: Sequence[int], theta: int, B: float) -> float:
    """Probability of the observation vector ``x`` if the cabal has ``theta`` members."""
    if theta < 0:
        raise ValidationError(f"theta must be >= 0, got {theta}")
    x = np.asarray(x, dtype=int)
    if np.any(x < 0):
        raise ValidationError("observations must be non-negative")
    if np.any(x > theta):
        return 0.0
    return float(np.exp(_binom_logpmf(x, theta, B).sum()))


def log_likelihood_table(xs: np.ndarray, B: float, max_theta: int) -> np.ndarray:
    """Rows of ``xs`` against every theta in 0..max_theta."""
    xs = np.atleast_2d(np.asarray(xs, dtype=int))
    thetas = np.arange(max_theta + 1)
    table = np.zeros((xs.shape[0], max_theta + 1))
    for col in xs.T:
        table += _binom_logpmf(col[:, None], thetas[None, :], B)
    return table


def _argmax_smallest(table: np.ndarray, floor: np.ndarray) -> np.ndarray:
    best = table.max(axis=1, keepdims=True)
    est = (table >= best - TIE_TOL).argmax(axis=1)
    # every theta impossible (B=0 with a positive count): fall back to max(x)
    dead = ~np.isfinite(best[:, 0])
    est[dead] = floor[dead]
    return est


def mle_search(x: Sequence[int], B: float, max_theta: int = DEFAULT_MAX_THETA) -> tuple[int, bool]:
    """Return ``(estimate, hit_bound)`` for one observation vector."""
    x = np.asarray(x, dtype=int)
    if x.size and int(x.max()) > max_theta:
        raise ValidationError(f"max(x)={int(x.max())} exceeds max_theta={max_theta}")
    if x.size == 0:
        return 0, False
    table = log_likelihood_table(x[None, :], B, max_theta)
    theta = int(_argmax_smallest(table, x.max(keepdims=True))[0])
    return theta, theta == max_theta


def mle(x: Sequence[int], B: float, max_theta: int = DEFAULT_MAX_THETA) -> int:
    """Smallest theta in [max(x), max_theta] maximizing the likelihood of ``x``."""
    return mle_search(x, B, max_theta)[0]


def multisets(top: int, m: int, cap: int = DEFAULT_STATE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Sorted m-tuples over {0..top} and the number of orderings of each."""
    n_states = math.comb(top + m, m)
    if n_states > cap:
        raise ResourceCapError(
            f"{n_states} observation multisets for c<={top}, m={m} exceed cap {cap}"
        )
    rows = np.fromiter(
        (v for t in combinations_with_replacement(range(top + 1), m) for v in t),
        dtype=np.int64,
        count=n_states * m,
    ).reshape(n_states, m)
    # multinomial coefficient m! / prod(run lengths!)
    log_mult = np.full(n_states, gammaln(m + 1))
    for v in range(top + 1):
        log_mult -= gammaln((rows == v).sum(axis=1) + 1)
    return rows, np.rint(np.exp(log_mult))


def mle_distributions(
    cs: Iterable[int],
    m: int,
    B: float,
    max_theta: int = DEFAULT_MAX_THETA,
    cap: int = DEFAULT_STATE_CAP,
) -> list[MleDistribution]:
    """Distribution rows for several true sizes sharing one multiset enumeration.

    The MLE of an observation depends only on (x, B), so it is computed once
    for all multisets over {0..max(cs)}; each row then reweights those with
    max(x) <= c by their probability under Binomial(c, B).
    """
    cs = sorted(set(int(c) for c in cs))
    if not cs or cs[0] < 1:
        raise ValidationError("true sizes must be positive")
    if m < 1:
        raise ValidationError(f"meetings must be >= 1, got {m}")
    if cs[-1] > max_theta:
        raise ValidationError(f"max_theta={max_theta} below true size {cs[-1]}")
    rows, mult = multisets(cs[-1], m, cap)
    top = rows[:, -1]
    estimates = _argmax_smallest(log_likelihood_table(rows, B, max_theta), top)
    out = []
    for c in cs:
        keep = top <= c
        logp = _binom_logpmf(rows[keep], c, B).sum(axis=1)
        w = mult[keep] * np.exp(logp)
        masses = np.bincount(estimates[keep], weights=w, minlength=max_theta + 1)
        out.append(
            MleDistribution(
                c=c, m=m, B=B, max_theta=max_theta, masses=masses,
                bound_mass=float(masses[max_theta]), n_states=int(keep.sum()),
            )
        )
    return out


def mle_distribution(
    c: int, m: int, B: float, max_theta: int = DEFAULT_MAX_THETA, cap: int = DEFAULT_STATE_CAP
) -> MleDistribution:
    return mle_distributions([c], m, B, max_theta, cap)[0]


def expected_mle_error(c: int, m: int, B: float, max_theta: int = DEFAULT_MAX_THETA) -> float:
    return mle_distribution(c, m, B, max_theta).expected_error()
