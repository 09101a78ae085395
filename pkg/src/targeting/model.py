"""Domain types, scenario configuration, and the seeded randomness contract.

Every scenario is a frozen dataclass validated at construction. Scenario files
are JSON documents carrying a ``"kind"`` tag (``"cabal"`` or ``"capture"``)
plus the dataclass fields; see ``docs/scenario_schema.md``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

# Bumped whenever the draw order inside a simulator changes, so that published
# (seed, version) pairs keep reproducing the same CSV bytes.
RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=(stream_id,))"
RNG_VERSION = 1

DEFAULT_GUARD_POOL = 2500
DEFAULT_MIDDLE_POOL = 5000

_U64 = 2**64


class ValidationError(ValueError):
    """A domain value or scenario violates one of its invariants."""


class ResourceCapError(RuntimeError):
    """A requested computation exceeds the configured work budget."""


def _check_int(name: str, value: Any, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")


def _check_closed(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} out of [0,1]: {value!r}")


def _check_open(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValidationError(f"{name} out of (0,1): {value!r}")


@dataclass(frozen=True)
class AdversaryParams:
    """Adversary endowment: middle bandwidth share, bridging success, failure tolerance."""

    middle_fraction: float
    bridge_prob: float = 1.0
    failure_threshold: float = 0.1

    def __post_init__(self) -> None:
        _check_closed("middle_fraction", self.middle_fraction)
        _check_closed("bridge_prob", self.bridge_prob)
        _check_open("failure_threshold", self.failure_threshold)


@dataclass(frozen=True)
class CabalScenario:
    cabal_size: int
    meetings: int
    guards_per_client: int = 1
    guard_pool: int = DEFAULT_GUARD_POOL
    middle_pool: int = DEFAULT_MIDDLE_POOL
    # False samples each client's guard set independently, allowing collisions.
    disjoint_guards: bool = True

    def __post_init__(self) -> None:
        _check_int("cabal_size", self.cabal_size, 1)
        _check_int("meetings", self.meetings, 0)
        _check_int("guards_per_client", self.guards_per_client, 1)
        _check_int("guard_pool", self.guard_pool, 1)
        _check_int("middle_pool", self.middle_pool, 1)
        if self.guards_per_client > self.guard_pool:
            raise ValidationError(
                f"guards_per_client ({self.guards_per_client}) exceeds guard_pool ({self.guard_pool})"
            )
        if self.disjoint_guards and self.cabal_size * self.guards_per_client > self.guard_pool:
            raise ValidationError(
                "disjoint guard sets infeasible: "
                f"{self.cabal_size}*{self.guards_per_client} > {self.guard_pool}"
            )


@dataclass(frozen=True)
class ClientGroup:
    count: int
    visits_per_window: int

    def __post_init__(self) -> None:
        _check_int("client group count", self.count, 1)
        _check_int("visits_per_window", self.visits_per_window, 1)


def _default_groups() -> tuple[ClientGroup, ...]:
    return (ClientGroup(225, 2), ClientGroup(25, 10))


@dataclass(frozen=True)
class CaptureScenario:
    """Two-window onionsite capture–recapture setup.

    ``target_visits`` defines the population being estimated: clients whose
    groups visit at least that many times per window. The defaults are the
    225 regular (2 visits) plus 25 targeted (10 visits) mix with threshold 3.
    Guard sets are sampled independently per client by default, so guards may
    be shared between clients.
    """

    client_groups: tuple[ClientGroup, ...] = field(default_factory=_default_groups)
    threshold: int = 3
    guards_per_client: int = 1
    guard_pool: int = DEFAULT_GUARD_POOL
    middle_pool: int = DEFAULT_MIDDLE_POOL
    disjoint_guards: bool = False
    target_visits: int = 10

    def __post_init__(self) -> None:
        groups = tuple(
            g if isinstance(g, ClientGroup) else ClientGroup(*g) for g in self.client_groups
        )
        object.__setattr__(self, "client_groups", groups)
        if not groups:
            raise ValidationError("at least one client group is required")
        _check_int("threshold", self.threshold, 1)
        _check_int("guards_per_client", self.guards_per_client, 1)
        _check_int("guard_pool", self.guard_pool, 1)
        _check_int("middle_pool", self.middle_pool, 1)
        _check_int("target_visits", self.target_visits, 1)
        if self.guards_per_client > self.guard_pool:
            raise ValidationError(
                f"guards_per_client ({self.guards_per_client}) exceeds guard_pool ({self.guard_pool})"
            )
        if self.disjoint_guards and self.n_clients * self.guards_per_client > self.guard_pool:
            raise ValidationError(
                "disjoint guard sets infeasible: "
                f"{self.n_clients}*{self.guards_per_client} > {self.guard_pool}"
            )

    @property
    def n_clients(self) -> int:
        return sum(g.count for g in self.client_groups)

    @property
    def target_size(self) -> int:
        return sum(g.count for g in self.client_groups if g.visits_per_window >= self.target_visits)


Scenario = Union[CabalScenario, CaptureScenario]


def validate_scenario(s: Scenario) -> Scenario:
    """Re-check every invariant and return ``s`` unchanged.

    Construction already validates, so this mainly guards values assembled by
    ``dataclasses.replace`` or unpickled from elsewhere.
    """
    if not isinstance(s, (CabalScenario, CaptureScenario)):
        raise ValidationError(f"not a scenario: {type(s).__name__}")
    s.__post_init__()
    return s


# ---------------------------------------------------------------- serialization

def scenario_to_dict(s: Scenario) -> dict:
    d = asdict(s)
    if isinstance(s, CaptureScenario):
        d["client_groups"] = [[g.count, g.visits_per_window] for g in s.client_groups]
        d["kind"] = "capture"
    else:
        d["kind"] = "cabal"
    return d


def scenario_from_dict(d: dict) -> Scenario:
    d = dict(d)
    kind = d.pop("kind", None)
    try:
        if kind == "cabal":
            return CabalScenario(**d)
        if kind == "capture":
            if "client_groups" in d:
                d["client_groups"] = tuple(ClientGroup(*g) for g in d["client_groups"])
            return CaptureScenario(**d)
    except TypeError as exc:
        raise ValidationError(f"bad scenario fields: {exc}") from None
    raise ValidationError(f"unknown scenario kind {kind!r}; expected 'cabal' or 'capture'")


def dumps_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n"


def loads_scenario(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))


def load_document(path: str | Path) -> dict:
    """Read a scenario file as a raw dict (scenario fields plus optional sections)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    return doc


# ---------------------------------------------------------------- randomness

class SeededRng:
    """Per-trial random stream fixed by ``(seed, stream_id)``.

    The PCG64 bit stream for a given SeedSequence is platform independent.
    Draw order inside the simulators is pinned by ``RNG_VERSION``.
    """

    __slots__ = ("seed", "stream_id", "gen")

    def __init__(self, seed: int, stream_id: int = 0) -> None:
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if not 0 <= int(v) < _U64:
                raise ValidationError(f"{name} must be a 64-bit unsigned integer, got {v}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, high, size=None):
        return self.gen.integers(0, high, size=size)

    def choice_without_replacement(self, n: int, k: int) -> np.ndarray:
        return self.gen.choice(n, size=k, replace=False)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream_id={self.stream_id})"
