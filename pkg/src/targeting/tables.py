"""Row builders for the deterministic figure data (closed forms and exact MLE).

Each builder returns ``(columns, rows)``; the CLI writes them as CSV.
"""
from __future__ import annotations

import numpy as np

from . import analytic, bridging
from .mle import ERROR_THRESHOLDS, mle_distributions

FINE_B = tuple(round(0.01 * i, 2) for i in range(1, 100))
FINE_T = FINE_B

MIN_MEETINGS_C = (5, 20, 50)
MIN_MEETINGS_T = (0.1, 0.5, 0.9)
MAX_CABAL_B = (0.05, 0.1, 0.2)
MAX_CABAL_M = (1, 4, 8)
FRACTION_B = (0.05, 0.1, 0.15, 0.2, 0.3, 0.5)
FRACTION_M = tuple(range(0, 101))

BRIDGE_PB = (0.5, 0.95)
BRIDGE_GUARDS = (1, 3)
BRIDGE_M_CURVES = (1, 5, 10, 20)
BRIDGE_B_CURVES = (0.05, 0.1, 0.15, 0.2)
BRIDGE_M_AXIS = tuple(range(0, 51))
BRIDGE_B_AXIS = tuple(round(0.01 * i, 2) for i in range(0, 101))

MLE_B = (0.05, 0.1, 0.15, 0.2, 0.5, 0.75, 0.9)
MLE_M = (1, 2, 5)
MLE_C = tuple(range(1, 21))

COLLISION_CLIENTS = (3, 5, 10, 20, 25)
COLLISION_GUARDS = (1, 3)
PRINTED_COLLISION_PERCENT = {
    1: (0.1, 0.4, 1.8, 7.3, 11.3),
    3: (1.1, 3.5, 15.0, 49.8, 66.4),
}


def min_meetings_rows(Bs=FINE_B, cs=MIN_MEETINGS_C, Ts=MIN_MEETINGS_T):
    cols = ["middle_fraction", "cabal_size", "failure_threshold", "min_meetings",
            "failure_at_min"]
    rows = []
    for c in cs:
        for T in Ts:
            for B in Bs:
                m = analytic.min_meetings(B, c, T)
                rows.append({"middle_fraction": B, "cabal_size": c, "failure_threshold": T,
                             "min_meetings": m,
                             "failure_at_min": analytic.failure_probability(B, m, c)})
    return cols, rows


def max_cabal_rows(Ts=FINE_T, Bs=MAX_CABAL_B, ms=MAX_CABAL_M):
    cols = ["middle_fraction", "meetings", "failure_threshold", "max_cabal"]
    rows = [
        {"middle_fraction": B, "meetings": m, "failure_threshold": T,
         "max_cabal": analytic.max_cabal(B, m, T)}
        for B in Bs for m in ms for T in Ts
    ]
    return cols, rows


def identified_fraction_rows(Bs=FRACTION_B, ms=FRACTION_M):
    cols = ["middle_fraction", "meetings", "identified_fraction"]
    rows = [
        {"middle_fraction": B, "meetings": m,
         "identified_fraction": analytic.expected_identified_fraction(B, m)}
        for B in Bs for m in ms
    ]
    return cols, rows


def dedup_rows(networks=((2500, 5000), (800, 2000)), max_c=250):
    cols = ["guard_pool", "middle_pool", "cabal_size", "expected_guards", "expected_middles",
            "abs_error", "rel_error"]
    rows = []
    for g, M in networks:
        for c in range(1, max_c + 1):
            mid = analytic.expected_distinct_middles(M, g, c)
            rows.append({"guard_pool": g, "middle_pool": M, "cabal_size": c,
                         "expected_guards": analytic.expected_distinct_guards(g, c),
                         "expected_middles": mid, "abs_error": abs(mid - c),
                         "rel_error": abs(mid - c) / c})
    return cols, rows


def collision_rows(g=2500, ks=COLLISION_GUARDS, cs=COLLISION_CLIENTS):
    cols = ["guard_pool", "guards_per_client", "clients", "collision_probability"]
    rows = [
        {"guard_pool": g, "guards_per_client": k, "clients": c,
         "collision_probability": analytic.guard_collision_probability(g, k, c)}
        for k in ks for c in cs
    ]
    return cols, rows


def mr_selection_rows(Bs=(0.05, 0.1, 0.2, 0.5), sessions=tuple(range(0, 31))):
    cols = ["middle_fraction", "sessions", "mr_selection_probability"]
    rows = [
        {"middle_fraction": B, "sessions": s,
         "mr_selection_probability": analytic.mr_selection_probability(B, s)}
        for B in Bs for s in sessions
    ]
    return cols, rows


BRIDGE_COLUMNS = ["guards_per_client", "middle_fraction", "bridge_prob", "meetings",
                  "killed_circuits", "success", "explicit_success"]


def _bridge_row(g, B, pb, m, killed):
    eff = m + killed
    explicit = {1: bridging.one_guard_success, 3: bridging.three_guard_success}.get(g)
    return {"guards_per_client": g, "middle_fraction": B, "bridge_prob": pb, "meetings": m,
            "killed_circuits": killed,
            "success": bridging.multi_guard_success(g, B, pb, eff),
            "explicit_success": explicit(B, pb, eff) if explicit else float("nan")}


def bridging_vs_b_rows(guards=BRIDGE_GUARDS, pbs=BRIDGE_PB, ms=BRIDGE_M_CURVES,
                       Bs=BRIDGE_B_AXIS, killed=0):
    rows = [_bridge_row(g, B, pb, m, killed)
            for g in guards for pb in pbs for m in ms for B in Bs]
    return list(BRIDGE_COLUMNS), rows


def bridging_vs_m_rows(guards=BRIDGE_GUARDS, pbs=BRIDGE_PB, Bs=BRIDGE_B_CURVES,
                       ms=BRIDGE_M_AXIS, killed=0):
    rows = [_bridge_row(g, B, pb, m, killed)
            for g in guards for pb in pbs for B in Bs for m in ms]
    return list(BRIDGE_COLUMNS), rows


MLE_DIST_COLUMNS = ["middle_fraction", "meetings", "true_c", "mle_value", "probability"]
MLE_ERROR_COLUMNS = (
    ["middle_fraction", "meetings", "true_c", "expected_mle", "expected_error", "rmse", "sd_mle"]
    + [f"p_error_ge_{k}" for k in ERROR_THRESHOLDS]
    + ["total_mass", "bound_mass"]
)


def mle_rows(Bs=MLE_B, ms=MLE_M, cs=MLE_C, max_theta=100, cap=None):
    """Distribution matrix rows (nonzero masses) and per-c error summary rows."""
    dist, err = [], []
    kw = {} if cap is None else {"cap": cap}
    for B in Bs:
        for m in ms:
            for d in mle_distributions(cs, m, B, max_theta, **kw):
                for v in np.flatnonzero(d.masses > 0):
                    dist.append({"middle_fraction": B, "meetings": m, "true_c": d.c,
                                 "mle_value": int(v), "probability": d.masses[v]})
                row = {"middle_fraction": B, "meetings": m, "true_c": d.c,
                       "expected_mle": d.expected(), "expected_error": d.expected_error(),
                       "rmse": d.rmse(), "sd_mle": d.std(), "total_mass": d.total(), "bound_mass": d.bound_mass}
                for k in ERROR_THRESHOLDS:
                    row[f"p_error_ge_{k}"] = d.error_probability(k)
                err.append(row)
    return (list(MLE_DIST_COLUMNS), dist), (list(MLE_ERROR_COLUMNS), err)
