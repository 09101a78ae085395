import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from targeting.model import (
    AdversaryParams,
    CabalScenario,
    CaptureScenario,
    ClientGroup,
    SeededRng,
    ValidationError,
    dumps_scenario,
    loads_scenario,
    validate_scenario,
)


def test_default_network_sizes_accepted():
    s = CabalScenario(cabal_size=25, meetings=10, guards_per_client=3, guard_pool=2500,
                      middle_pool=5000)
    assert validate_scenario(s) is s


def test_middle_fraction_out_of_range():
    with pytest.raises(ValidationError, match=r"middle_fraction out of \[0,1\]"):
        AdversaryParams(middle_fraction=1.5)


@pytest.mark.parametrize("field,value", [("bridge_prob", -0.1), ("failure_threshold", 0.0),
                                         ("failure_threshold", 1.0)])
def test_adversary_bounds(field, value):
    with pytest.raises(ValidationError, match=field):
        AdversaryParams(middle_fraction=0.2, **{field: value})


def test_disjoint_guards_infeasible():
    with pytest.raises(ValidationError, match="disjoint guard sets infeasible"):
        CabalScenario(cabal_size=900, meetings=1, guards_per_client=3, guard_pool=2500)


def test_colliding_mode_lifts_disjointness_limit():
    s = CabalScenario(cabal_size=900, meetings=1, guards_per_client=3, disjoint_guards=False)
    assert s.cabal_size * s.guards_per_client > s.guard_pool


def test_guards_per_client_bounded_by_pool():
    with pytest.raises(ValidationError, match="exceeds guard_pool"):
        CabalScenario(cabal_size=1, meetings=1, guards_per_client=11, guard_pool=10)


def test_capture_needs_groups():
    with pytest.raises(ValidationError, match="at least one client group"):
        CaptureScenario(client_groups=())
    with pytest.raises(ValidationError, match="threshold"):
        CaptureScenario(threshold=0)


def test_capture_defaults():
    cap = CaptureScenario()
    assert cap.n_clients == 250
    assert cap.target_size == 25
    assert cap.threshold == 3


def test_validate_catches_mutated_values():
    s = CabalScenario(cabal_size=10, meetings=1)
    object.__setattr__(s, "cabal_size", 0)
    with pytest.raises(ValidationError):
        validate_scenario(s)


def test_unknown_kind():
    with pytest.raises(ValidationError, match="unknown scenario kind"):
        loads_scenario('{"kind": "mesh"}')
    with pytest.raises(ValidationError, match="bad scenario fields"):
        loads_scenario('{"kind": "cabal", "cabal_size": 3, "meetings": 1, "colour": 1}')


cabal_scenarios = st.builds(
    CabalScenario,
    cabal_size=st.integers(1, 50),
    meetings=st.integers(0, 200),
    guards_per_client=st.integers(1, 5),
    guard_pool=st.integers(250, 3000),
    middle_pool=st.integers(1, 6000),
    disjoint_guards=st.booleans(),
)

capture_scenarios = st.builds(
    CaptureScenario,
    client_groups=st.lists(
        st.builds(ClientGroup, st.integers(1, 500), st.integers(1, 20)), min_size=1, max_size=4
    ).map(tuple),
    threshold=st.integers(1, 10),
    guards_per_client=st.integers(1, 3),
    target_visits=st.integers(1, 20),
)


@given(st.one_of(cabal_scenarios, capture_scenarios))
def test_round_trip(s):
    assert loads_scenario(dumps_scenario(s)) == s


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_rng_determinism(seed, stream):
    a = SeededRng(seed, stream).random(1000)
    b = SeededRng(seed, stream).random(1000)
    assert np.array_equal(a, b)


def test_rng_streams_differ():
    assert not np.array_equal(SeededRng(1, 0).random(10), SeededRng(1, 1).random(10))


def test_rng_rejects_out_of_range():
    with pytest.raises(ValidationError):
        SeededRng(-1)
    with pytest.raises(ValidationError):
        SeededRng(0, 2**64)


def test_rng_pinned_values():
    # frozen output of the versioned generator; changes here break published seeds
    got = SeededRng(20170101, 0).random(3)
    assert got.tolist() == [0.7567788947819586, 0.8900773720000479, 0.48750594124705415]
