import numpy as np
import pytest
from hypothesis import given, strategies as st

from traconflow.flow import (
    AircraftMetrics, AnalysisParams, FlightRecord, aircraft_based_metrics, occupancy_profile,
    time_based_counts,
)
from traconflow.geometry import DIRECT, Classification

REROUTED = Classification.rerouted()


def rec(fid, e, l, runway="R1", rerouted=False):
    return FlightRecord(str(fid), float(e), float(l), runway, REROUTED if rerouted else DIRECT)


def test_record_validation():
    with pytest.raises(ValueError, match="F1"):
        rec("F1", 10, 10)
    with pytest.raises(ValueError):
        rec("F2", float("nan"), 10)


def test_params_validation():
    with pytest.raises(ValueError):
        AnalysisParams(T=0)
    with pytest.raises(ValueError):
        AnalysisParams(one_runway_share=0.5)
    p = AnalysisParams()
    assert (p.T, p.period, p.one_runway_share) == (900, 900, 0.75)


# --- time-based ------------------------------------------------------------------

def test_period_single_flight():
    (p,) = time_based_counts([rec(1, 0, 600)])
    assert (p.period_index, p.present, p.entering, p.landing) == (0, 1, 1, 1)


def test_period_spanning_flight():
    p0, p1 = time_based_counts([rec(1, 800, 1000, rerouted=True)])
    assert (p0.present, p0.entering, p0.landing, p0.rerouted) == (1, 1, 0, 1)
    assert (p1.present, p1.entering, p1.landing, p1.rerouted) == (1, 0, 1, 1)


def test_period_empty():
    assert time_based_counts([]) == []


def test_period_runways():
    recs = [rec(i, 0, 100 + i, "R1" if i < 7 else "R2") for i in range(8)]
    assert time_based_counts(recs)[0].runways_in_use == 1
    recs = [rec(i, 0, 100 + i, "R1" if i < 6 else "R2") for i in range(8)]
    assert time_based_counts(recs)[0].runways_in_use == 2


records_st = st.lists(
    st.tuples(st.integers(0, 20_000), st.integers(1, 3000), st.booleans(), st.booleans()),
    min_size=1, max_size=60,
).map(lambda xs: [rec(i, e, e + d, "R1" if r else "R2", x) for i, (e, d, r, x) in enumerate(xs)])


@given(records_st)
def test_period_totals(records):
    periods = time_based_counts(records)
    assert sum(p.entering for p in periods) == len(records)
    assert sum(p.landing for p in periods) == len(records)
    for p in periods:
        assert 0 <= p.entering <= p.present and 0 <= p.rerouted <= p.present


# --- aircraft-based ------------------------------------------------------------------

def brute_occupancy(records, f, only_rerouted=False):
    pool = [r for r in records if r.is_rerouted] if only_rerouted else records
    events = sorted({t for r in records for t in (r.entry_t, r.landing_t)})
    probes = events + [(a + b) / 2 for a, b in zip(events, events[1:])]
    best = 0
    for tau in probes:
        if f.entry_t <= tau < f.landing_t:
            best = max(best, sum(r.entry_t <= tau < r.landing_t for r in pool))
    return best


def test_overlapping_pair():
    ms = aircraft_based_metrics([rec(1, 0, 600), rec(2, 300, 900)])
    assert [m.n_present for m in ms] == [2, 2]


def test_touching_not_copresent():
    ms = aircraft_based_metrics([rec(1, 0, 600), rec(2, 600, 900)])
    assert [m.n_present for m in ms] == [1, 1]


def test_landing_flow_hand_count():
    recs = [rec(1, 2000, 3200), rec(2, 2500, 3600), rec(3, 3000, 3900)]
    m = aircraft_based_metrics(recs, AnalysisParams(T=900))[1]
    assert m.landing_flow == pytest.approx(12.0)


def test_window_half_open():
    recs = [rec(1, 0, 1000), rec(2, 0, 1450), rec(3, 0, 550)]
    m = aircraft_based_metrics(recs, AnalysisParams(T=900))[0]
    # window [550, 1450) holds the landings at 550 and 1000 but not 1450
    assert m.landing_flow == pytest.approx(2 * 4.0)


def test_runways_rule():
    recs = [rec(i, 0, 3000 + 10 * i, "R1" if i < 7 else "R2") for i in range(8)]
    assert {m.runways_in_use for m in aircraft_based_metrics(recs)} == {1}
    recs = [rec(i, 0, 3000 + 10 * i, "R1" if i < 4 else "R2") for i in range(8)]
    assert {m.runways_in_use for m in aircraft_based_metrics(recs)} == {2}


@given(records_st)
def test_occupancy_matches_bruteforce(records):
    ms = aircraft_based_metrics(records)
    for r, m in zip(records, ms):
        assert m.n_present == brute_occupancy(records, r)
        assert m.n_rerouted == brute_occupancy(records, r, only_rerouted=True)
        assert 1 <= m.n_present and m.n_rerouted <= m.n_present
        assert m.entering_flow >= 0 and m.landing_flow >= 0


@given(records_st, st.integers(-5000, 5000), st.randoms())
def test_flows_invariant(records, shift, rnd):
    base = aircraft_based_metrics(records)
    shifted = [rec(f"x{r.flight_id}", r.entry_t + shift + 10_000, r.landing_t + shift + 10_000,
                   r.runway, r.is_rerouted) for r in records]
    order = list(range(len(records)))
    rnd.shuffle(order)
    moved = aircraft_based_metrics([shifted[i] for i in order])
    for j, i in enumerate(order):
        a, b = base[i], moved[j]
        assert (a.n_present, a.entering_flow, a.landing_flow, a.n_rerouted, a.runways_in_use) == \
            (b.n_present, b.entering_flow, b.landing_flow, b.n_rerouted, b.runways_in_use)


@given(records_st)
def test_all_direct_zero_rerouted(records):
    direct = [rec(r.flight_id, r.entry_t, r.landing_t, r.runway) for r in records]
    assert all(p.rerouted == 0 for p in time_based_counts(direct))
    assert all(m.n_rerouted == 0 for m in aircraft_based_metrics(direct))


def test_many_flights_bruteforce():
    rng = np.random.default_rng(3)
    e = rng.integers(0, 20_000, 200)
    recs = [rec(i, e[i], e[i] + rng.integers(300, 1500), rerouted=rng.random() < 0.3) for i in range(200)]
    for r, m in zip(recs, aircraft_based_metrics(recs)):
        assert m.n_present == brute_occupancy(recs, r)


# --- occupancy profile ------------------------------------------------------------------

def metric(n, lf, ef=0.0, nr=0, rw=1):
    return AircraftMetrics("f", n, ef, lf, nr, rw)


def test_profile_single():
    (b,) = occupancy_profile([metric(3, 20.0)])
    assert b.frequency == 1 and b.std_landing_flow == 0


def test_profile_two_points():
    (b,) = occupancy_profile([metric(3, 20.0), metric(3, 40.0)])
    assert b.mean_landing_flow == 30 and b.std_landing_flow == 10


def test_profile_empty():
    assert len(occupancy_profile([])) == 0


def test_profile_sorted_and_split():
    prof = occupancy_profile([metric(5, 1), metric(2, 1), metric(2, 1, rw=2)])
    assert [(b.n_present, b.runways_in_use) for b in prof] == [(2, 1), (2, 2), (5, 1)]
    pooled = occupancy_profile([metric(2, 1), metric(2, 1), metric(2, 1, rw=2)], split_runways=False)
    assert [(b.n_present, b.runways_in_use, b.frequency) for b in pooled] == [(2, 1, 3)]
    assert prof.select(runways_in_use=2)[0].n_present == 2


@given(records_st)
def test_profile_frequencies(records):
    ms = aircraft_based_metrics(records)
    prof = occupancy_profile(ms)
    assert sum(b.frequency for b in prof) == len(ms)
    assert all(b.frequency >= 1 and b.std_landing_flow >= 0 and b.std_entering_flow >= 0 for b in prof)
