"""Closed-form guard-exposure, deduplication, collision and Chapman quantities.

Powers are taken in log space (``log1p``/``expm1``) so that large ``m * c``
products do not underflow or lose the small complement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import AdversaryParams, CabalScenario, ValidationError


@dataclass(frozen=True)
class ExposureQuery:
    adversary: AdversaryParams
    scenario: CabalScenario

    def failure_probability(self) -> float:
        return failure_probability(
            self.adversary.middle_fraction, self.scenario.meetings, self.scenario.cabal_size
        )

    def succeeds(self) -> bool:
        return self.failure_probability() < self.adversary.failure_threshold


def _prob(name: str, p: float, *, open_interval: bool = False) -> None:
    ok = 0.0 < p < 1.0 if open_interval else 0.0 <= p <= 1.0
    if not ok:
        interval = "(0,1)" if open_interval else "[0,1]"
        raise ValidationError(f"{name} out of {interval}: {p!r}")


def _nonneg_int(name: str, v: int, minimum: int = 0) -> None:
    if int(v) != v or v < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {v!r}")


def _unobserved(B: float, m: int) -> float:
    """(1-B)^m: chance one client never crosses a compromised middle."""
    if m == 0:
        return 1.0
    if B >= 1.0:
        return 0.0
    return math.exp(m * math.log1p(-B))


def failure_probability(B: float, m: int, c: int) -> float:
    """Probability that some cabal member still has no identified guard after ``m`` meetings."""
    _prob("middle_fraction", B)
    _nonneg_int("meetings", m)
    _nonneg_int("cabal_size", c, 1)
    q = _unobserved(B, m)
    if q >= 1.0:
        return 1.0
    return -math.expm1(c * math.log1p(-q))


_INT_LIMIT = 2**53


def _first_true(pred, guess: float, what: str) -> int:
    """Smallest n >= 0 with pred(n), for pred monotone in n, bracketed from a float guess."""
    if not guess < _INT_LIMIT:
        raise ValidationError(f"{what} result exceeds 2^53 (estimate {guess:.3g})")
    start = max(0, math.floor(guess))
    if pred(start):
        hi, step = start, 1
        while hi > 0 and pred(max(0, hi - step)):
            hi = max(0, hi - step)
            step *= 2
        lo = max(-1, hi - step)  # pred(lo) false, or lo == -1
        if hi == 0:
            return 0
    else:
        lo, step = start, 1
        while not pred(lo + step):
            lo += step
            step *= 2
            if lo > _INT_LIMIT:
                raise ValidationError(f"{what} result exceeds 2^53")
        hi = lo + step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_meetings(B: float, c: int, T: float) -> int:
    """Smallest ``m`` with ``failure_probability(B, m, c) < T``."""
    _prob("middle_fraction", B, open_interval=True)
    _nonneg_int("cabal_size", c, 1)
    _prob("failure_threshold", T, open_interval=True)
    # log_{1-B}[1 - (1-T)^{1/c}], computed without cancellation
    inner = -math.expm1(math.log1p(-T) / c)
    guess = math.log(inner) / math.log1p(-B)
    return _first_true(lambda n: failure_probability(B, n, c) < T, guess, "min_meetings")


def max_cabal(B: float, m: int, T: float) -> int:
    """Largest ``c`` with ``failure_probability(B, m, c) < T``; 0 if even one member fails."""
    _prob("middle_fraction", B, open_interval=True)
    _nonneg_int("meetings", m, 1)
    _prob("failure_threshold", T, open_interval=True)
    log_q = m * math.log1p(-B)
    # c < log(1-T) / log(1 - (1-B)^m)
    denom = math.log1p(-math.exp(log_q))
    if denom == 0.0:
        raise ValidationError(
            f"max_cabal unbounded at double precision for B={B}, m={m}"
        )
    guess = math.log1p(-T) / denom
    return _first_true(lambda n: failure_probability(B, m, n + 1) >= T, guess, "max_cabal")


def min_bandwidth(m: int, c: int, T: float) -> float:
    """Real-valued middle fraction at which ``failure_probability(B, m, c) == T``."""
    _nonneg_int("meetings", m, 1)
    _nonneg_int("cabal_size", c, 1)
    _prob("failure_threshold", T, open_interval=True)
    inner = -math.expm1(math.log1p(-T) / c)
    return -math.expm1(math.log(inner) / m)


def expected_identified_fraction(B: float, m: int) -> float:
    _prob("middle_fraction", B)
    _nonneg_int("meetings", m)
    return 1.0 - _unobserved(B, m)


def expected_unidentified_count(B: float, m: int, c: int) -> float:
    _prob("middle_fraction", B)
    _nonneg_int("meetings", m)
    return c * _unobserved(B, m)


def exact_subset_exposure(B: float, m: int, c: int, i: int) -> float:
    """Probability that exactly a given ``i``-member subset has an exposed guard."""
    _prob("middle_fraction", B)
    _nonneg_int("meetings", m)
    if not 0 <= i <= c:
        raise ValidationError(f"subset size must satisfy 0 <= i <= c, got i={i}, c={c}")
    q = _unobserved(B, m)
    return (1.0 - q) ** i * q ** (c - i)


def expected_distinct_guards(g: int, c: float) -> float:
    """Expected number of distinct guards when ``c`` clients each pick one uniformly."""
    _nonneg_int("guard_pool", g, 1)
    if c < 0:
        raise ValidationError(f"cabal size must be non-negative, got {c}")
    if g == 1:
        return 1.0 if c > 0 else 0.0
    return -g * math.expm1(c * math.log1p(-1.0 / g))


def expected_distinct_middles(M: int, g: int, c: float) -> float:
    """Expected distinct middles seen by the multicast root after guard deduplication.

    The expected distinct-guard count is plugged in as the number of draws
    from the middle pool.
    """
    _nonneg_int("middle_pool", M, 1)
    h = expected_distinct_guards(g, c)
    return expected_distinct_guards(M, h)


def mr_selection_probability(B: float, sessions: int) -> float:
    """Chance an adversary holding fraction ``B`` has been the multicast root at least once."""
    _prob("middle_fraction", B)
    _nonneg_int("sessions", sessions)
    return 1.0 - _unobserved(B, sessions)


def guard_collision_probability(g: int, k: int, c: int) -> float:
    """Probability that two of ``c`` clients share a guard, each holding ``k`` distinct guards."""
    _nonneg_int("guard_pool", g, 1)
    _nonneg_int("guards_per_client", k, 1)
    _nonneg_int("clients", c, 0)
    if k * c > g:
        raise ValidationError(f"guards_per_client*clients ({k}*{c}) exceeds guard_pool {g}")
    # C(g-ki, k)/C(g, k) telescopes to prod_j (g-ki-j)/(g-j)
    log_no_collision = math.fsum(
        math.log1p(-k * i / (g - j)) for i in range(c) for j in range(k)
    )
    return -math.expm1(log_no_collision)


def chapman_estimate(c1: int, c2: int, m2: int) -> float:
    """Chapman form of the Lincoln–Petersen population estimate."""
    for name, v in (("c1", c1), ("c2", c2), ("m2", m2)):
        _nonneg_int(name, v)
    if m2 > min(c1, c2):
        raise ValidationError(f"overlap m2={m2} exceeds min(c1, c2)={min(c1, c2)}")
    return (c1 + 1) * (c2 + 1) / (m2 + 1) - 1
