"""Probability that an adversary bridges a guard of a targeted client.

The client picks one of ``n`` guards uniformly for every meeting and a fresh
middle each time. Each client–guard pair gets a single bridging attempt, made
the first time that guard is seen behind a compromised middle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ValidationError


@dataclass(frozen=True)
class BridgingQuery:
    guards_per_client: int
    B: float
    p_b: float
    meetings: int

    def __post_init__(self) -> None:
        _check(self.guards_per_client, self.B, self.p_b, self.meetings)

    def success(self) -> float:
        return multi_guard_success(self.guards_per_client, self.B, self.p_b, self.meetings)


def _check(n: int, B: float, p_b: float, m: int) -> None:
    if not 0.0 <= B <= 1.0:
        raise ValidationError(f"B out of [0,1]: {B!r}")
    if not 0.0 <= p_b <= 1.0:
        raise ValidationError(f"p_b out of [0,1]: {p_b!r}")
    if int(n) != n or n < 1:
        raise ValidationError(f"guards_per_client must be >= 1, got {n!r}")
    if int(m) != m or m < 0:
        raise ValidationError(f"meetings must be >= 0, got {m!r}")


def one_guard_success(B: float, p_b: float, m: int) -> float:
    _check(1, B, p_b, m)
    return (1.0 - (1.0 - B) ** m) * p_b


def _fresh_rate(n: int, j: int, B: float) -> float:
    # chance a meeting uses one of the n-j+1 untried guards AND a compromised middle
    return (n - j + 1) / n * B


def failure_term(n: int, j: int, i: int, B: float, p_b: float) -> float:
    """Chance the j-th new guard shows up exactly ``i`` meetings after the previous one and is not bridged."""
    if not 1 <= j <= n:
        raise ValidationError(f"need 1 <= j <= n, got j={j}, n={n}")
    if i < 1:
        raise ValidationError(f"gap i must be >= 1, got {i}")
    _check(n, B, p_b, 0)
    r = _fresh_rate(n, j, B)
    return (1.0 - r) ** (i - 1) * r * (1.0 - p_b)


def success_term(n: int, j: int, m: int, B: float, p_b: float) -> float:
    """Chance the j-th new guard appears within ``m`` meetings and is bridged."""
    if not 1 <= j <= n:
        raise ValidationError(f"need 1 <= j <= n, got j={j}, n={n}")
    _check(n, B, p_b, m)
    r = _fresh_rate(n, j, B)
    return (1.0 - (1.0 - r) ** m) * p_b


def multi_guard_success(g: int, B: float, p_b: float, m: int) -> float:
    """Total bridging probability for a client with ``g`` guards over ``m`` meetings.

    Sums, over which guard k is the first bridged, the chance that guards
    1..k-1 were each found and failed at increasing meetings i_1 < ... < i_{k-1}
    and guard k is then bridged in the remaining meetings. ``last_fail[t]``
    carries the probability that the most recent failure happened at meeting
    ``t``, which turns the ordered-tuple sum into an O(g m^2) recurrence.
    """
    _check(g, B, p_b, m)
    if m == 0:
        return 0.0
    gaps = np.arange(1, m + 1)
    last_fail = np.zeros(m)
    last_fail[0] = 1.0
    total = 0.0
    for k in range(1, g + 1):
        r = _fresh_rate(g, k, B)
        remaining = m - np.arange(m)
        s = (1.0 - (1.0 - r) ** remaining) * p_b
        total += float(last_fail @ s)
        if k == g:
            break
        f = (1.0 - r) ** (gaps - 1) * r * (1.0 - p_b)
        nxt = np.zeros(m)
        for t in np.flatnonzero(last_fail):
            span = m - t - 1
            if span > 0:
                nxt[t + 1:] += last_fail[t] * f[:span]
        last_fail = nxt
        if not last_fail.any():
            break
    return total


def three_guard_success(B: float, p_b: float, m: int) -> float:
    """Three-guard success written out as the explicit single, double and triple sum."""
    _check(3, B, p_b, m)
    total = success_term(3, 1, m, B, p_b)
    for i1 in range(1, m):
        f1 = failure_term(3, 1, i1, B, p_b)
        total += f1 * success_term(3, 2, m - i1, B, p_b)
        for i2 in range(i1 + 1, m):
            total += f1 * failure_term(3, 2, i2 - i1, B, p_b) * success_term(3, 3, m - i2, B, p_b)
    return total
