from dataclasses import replace

import numpy as np
import pytest

from targeting import analytic
from targeting.model import AdversaryParams, CabalScenario, CaptureScenario, ClientGroup, SeededRng
from targeting.sim import capture, mtor
from targeting.sim.engine import run_trials, sample_guard_sets


def test_full_compromise_identifies_everyone_at_once():
    sc = CabalScenario(cabal_size=25, meetings=5)
    for i in range(50):
        r = mtor.run_mtor_trial(sc, AdversaryParams(1.0, 1.0), SeededRng(3, i))
        assert r.identified.tolist() == [25] * 5
        assert len(r.bridged) == 25 and not r.failed


def test_no_compromise_identifies_nobody():
    sc = CabalScenario(cabal_size=25, meetings=30, guards_per_client=3)
    r = mtor.run_mtor_trial(sc, AdversaryParams(0.0, 1.0), SeededRng(3, 0))
    assert not r.identified.any()


@pytest.mark.parametrize("disjoint", [True, False])
def test_identified_monotone_and_capped(disjoint):
    pool = 2500 if disjoint else 60
    sc = CabalScenario(cabal_size=40, meetings=60, guards_per_client=3, guard_pool=pool,
                       disjoint_guards=disjoint)
    for i in range(40):
        r = mtor.run_mtor_trial(sc, AdversaryParams(0.3, 0.6), SeededRng(9, i))
        assert np.all(np.diff(r.identified) >= 0)
        assert r.identified.max() <= sc.cabal_size
        assert not (r.bridged & r.failed)


def test_one_attempt_per_guard():
    # p_b=0: every observed guard lands in `failed`, never retried into `bridged`
    sc = CabalScenario(cabal_size=10, meetings=50, guards_per_client=2)
    r = mtor.run_mtor_trial(sc, AdversaryParams(0.5, 0.0), SeededRng(1, 0))
    assert not r.bridged and len(r.failed) > 0
    assert not r.identified.any()


def test_shared_guard_shares_middle():
    # one guard for everyone: dedup means every client sees the same middle,
    # so a meeting either exposes all clients or none
    sc = CabalScenario(cabal_size=8, meetings=40, guard_pool=1, disjoint_guards=False)
    for i in range(30):
        r = mtor.run_mtor_trial(sc, AdversaryParams(0.3, 1.0), SeededRng(5, i))
        assert set(np.unique(r.identified)) <= {0, 8}


def test_trial_is_function_of_seed_and_index():
    sc = CabalScenario(cabal_size=25, meetings=20, guards_per_client=3)
    adv = AdversaryParams(0.2, 0.5)
    a = mtor.run_mtor_trial(sc, adv, SeededRng(77, 12))
    b = mtor.run_mtor_trial(sc, adv, SeededRng(77, 12))
    assert np.array_equal(a.identified, b.identified) and a.bridged == b.bridged


def test_parallel_matches_serial():
    sc = CabalScenario(cabal_size=25, meetings=15, guards_per_client=3)
    adv = AdversaryParams(0.2, 0.5)
    s, fs = mtor.mtor_trials(sc, adv, 60, seed=4, workers=1)
    p, fp = mtor.mtor_trials(sc, adv, 60, seed=4, workers=3)
    assert np.array_equal(s, p) and np.array_equal(fs, fp)


def test_guard_sets_distinct_within_client():
    rng = SeededRng(2, 0)
    sets = sample_guard_sets(rng, 500, 5, 40, disjoint=False)
    assert all(len(set(row)) == 5 for row in sets.tolist())
    d = sample_guard_sets(rng, 50, 3, 150, disjoint=True)
    assert len(set(d.ravel().tolist())) == 150


@pytest.mark.slow
def test_one_guard_certain_bridge_tracks_closed_form():
    sc = CabalScenario(cabal_size=25, meetings=10)
    for B in (0.1, 0.3):
        counts, _ = mtor.mtor_trials(sc, AdversaryParams(B, 1.0), 4000, seed=8)
        frac = counts / 25
        for m in (1, 5, 10):
            mean = frac[:, m - 1].mean()
            se = frac[:, m - 1].std(ddof=1) / np.sqrt(len(frac))
            assert abs(mean - analytic.expected_identified_fraction(B, m)) < 3 * se


def test_sweep_rows_and_budget():
    sc = CabalScenario(cabal_size=25, meetings=5)
    res = mtor.run_mtor_sweep(sc, [(0.2, 0.5, 1), (0.2, 0.5, 3)], trials=20, seed=1)
    assert len(res.rows) == 10
    assert res.to_csv().splitlines()[0] == ",".join(mtor.MTOR_COLUMNS)
    from targeting.model import ResourceCapError
    with pytest.raises(ResourceCapError):
        mtor.run_mtor_sweep(sc, [(0.2, 0.5, 1)] * 3, trials=10**7, seed=1)


def test_default_mtor_grid_covers_figures():
    grid = mtor.default_mtor_grid()
    assert {p.middle_fraction for p in grid if p.bridge_prob == 0.5} == {0.05, 0.1, 0.15, 0.2, 0.5}
    assert {p.bridge_prob for p in grid if p.guards_per_client == 3 and p.middle_fraction == 0.2} == {
        0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95}
    assert len(grid) == len(set(grid))


# ---------------------------------------------------------------- capture


def test_capture_perfect_observation():
    cap = CaptureScenario(client_groups=(ClientGroup(40, 3),), threshold=1, disjoint_guards=True)
    r = capture.run_capture_trial(cap, AdversaryParams(1.0), SeededRng(1, 0))
    assert (r.c1, r.c2, r.m2) == (40, 40, 40)
    assert r.estimate == pytest.approx(40.0)


def test_capture_blind_adversary():
    r = capture.run_capture_trial(CaptureScenario(), AdversaryParams(0.0), SeededRng(1, 0))
    assert (r.c1, r.c2, r.m2, r.estimate) == (0, 0, 0, 0.0)


def test_capture_overlap_invariant():
    cap = CaptureScenario(guards_per_client=2)
    rec = capture.capture_trials(cap, AdversaryParams(0.3), 300, seed=5)
    assert np.all(rec["m2"] <= np.minimum(rec["c1"], rec["c2"]))
    assert np.all(rec["estimate"] >= 0)


def test_capture_shared_guard_aggregates_clients():
    # two 2-visit clients on the only guard: with B=1 the guard sees 4 >= threshold 3
    cap = CaptureScenario(client_groups=(ClientGroup(2, 2),), threshold=3, guard_pool=1,
                          disjoint_guards=False)
    r = capture.run_capture_trial(cap, AdversaryParams(1.0), SeededRng(0, 0))
    assert (r.c1, r.c2, r.m2) == (1, 1, 1)


def test_capture_sweep_deterministic():
    grid = capture.default_capture_grid()[:3]
    a = capture.run_capture_sweep(grid, 50, seed=3).to_csv()
    b = capture.run_capture_sweep(grid, 50, seed=3, workers=2).to_csv()
    assert a == b


def test_default_capture_grid_panels():
    grid = capture.default_capture_grid()
    panels = {}
    for p in grid:
        panels.setdefault(p.panel, []).append(p)
    assert [p.scenario.threshold for p in panels["threshold"]] == [1, 2, 3, 5, 7, 10]
    assert len(panels["middle_fraction"]) == 11
    assert [capture.mix_label(p.scenario) for p in panels["client_mix"]][3] == "2475x2+25x10"
    assert [p.scenario.guards_per_client for p in panels["guards_per_client"]] == [1, 2, 3, 5, 10]


def _stream(rng):
    return rng.stream_id


def test_run_trials_order():
    def _noop(rng):
        return rng.stream_id
    assert run_trials(_noop, (), 7, seed=1) == list(range(7))
    assert run_trials(_stream, (), 40, seed=1, workers=2) == list(range(40))


def test_replace_keeps_validation():
    with pytest.raises(Exception):
        replace(CaptureScenario(), threshold=0)
