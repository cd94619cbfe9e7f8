import numpy as np
import pytest
from hypothesis import given, strategies as st

from traconflow.flow import FlightRecord
from traconflow.geometry import DIRECT, Classification
from traconflow.travel_time import (
    CalibrationError, TravelTimeDistribution, default_distribution, fit_from_direct_tracks,
    mean_slots, sample, sample_many, slot_round,
)


def direct(d, fid="f", e=0.0):
    return FlightRecord(fid, e, e + d, "R1", DIRECT)


def test_validation():
    with pytest.raises(ValueError):
        TravelTimeDistribution.from_mapping({0: 1.0})
    with pytest.raises(ValueError):
        TravelTimeDistribution.from_mapping({5: 0.5, 6: 0.4})
    with pytest.raises(ValueError):
        TravelTimeDistribution.from_mapping({5: 1.5, 6: -0.5})
    with pytest.raises(ValueError):
        TravelTimeDistribution(np.array([], dtype=int), np.array([]))


def test_fit_point_mass():
    d = fit_from_direct_tracks([direct(870, str(i)) for i in range(5)])
    assert d.as_dict() == {29: 1.0}


def test_fit_two_values():
    assert fit_from_direct_tracks([direct(600), direct(1200)]).as_dict() == {20: 0.5, 40: 0.5}


def test_fit_ignores_rerouted_and_requires_direct():
    rer = FlightRecord("r", 0, 3000, "R1", Classification.rerouted())
    assert fit_from_direct_tracks([rer, direct(600)]).as_dict() == {20: 1.0}
    with pytest.raises(CalibrationError):
        fit_from_direct_tracks([rer])


def test_slot_round():
    assert slot_round(0) == 1 and slot_round(10) == 1
    assert slot_round(44.9) == 1 and slot_round(45) == 2 and slot_round(870) == 29


def test_fit_generator_corpus():
    # transit times uniform on [600, 1200] s: mean 30 slots, sd 300/sqrt(3) s
    rng = np.random.default_rng(1)
    n = 5000
    d = rng.uniform(600, 1200, n)
    fitted = fit_from_direct_tracks([direct(x, str(i)) for i, x in enumerate(d)])
    se = (600 / np.sqrt(12)) / 30 / np.sqrt(n)
    assert abs(mean_slots(fitted) - 30.0) <= 3 * se + 0.5 / np.sqrt(n)


def test_sample_point_mass():
    d = TravelTimeDistribution.from_mapping({29: 1.0})
    rng = np.random.default_rng(0)
    assert {sample(d, rng) for _ in range(100)} == {29}


def test_sample_frequency():
    d = TravelTimeDistribution.from_mapping({20: 0.5, 40: 0.5})
    s = sample_many(d, np.random.default_rng(5), 100_000)
    assert abs((s == 20).mean() - 0.5) <= 0.01


def test_sample_deterministic_and_stream_equal():
    d = default_distribution()
    a = [sample(d, np.random.default_rng(9)) for _ in range(3)]
    assert len(set(a)) == 1
    rng = np.random.default_rng(9)
    one_by_one = [sample(d, rng) for _ in range(500)]
    assert one_by_one == sample_many(d, np.random.default_rng(9), 500).tolist()


def test_sample_support_exhaustive():
    d = default_distribution()
    s = sample_many(d, np.random.default_rng(2), 1_000_000)
    assert set(np.unique(s)) <= set(d.slots.tolist())
    freq = np.bincount(s, minlength=d.max_slots + 1)[d.slots] / len(s)
    assert np.abs(freq - d.probabilities).max() < 0.002


def test_mean_values():
    assert mean_slots(TravelTimeDistribution.from_mapping({29: 1.0})) == 29
    assert mean_slots(TravelTimeDistribution.from_mapping({20: 0.5, 40: 0.5})) == 30


def test_default_distribution():
    d = default_distribution()
    assert d.slots.tolist() == list(range(18, 45))
    assert int(d.slots[np.argmax(d.probabilities)]) == 26
    # direct computation over the 27 support points
    k = np.arange(18, 45)
    w = np.where(k <= 26, k - 17, 9 * (45 - k) / 19)
    assert abs((k * w).sum() / w.sum() - 29) <= 0.5
    assert abs(mean_slots(d) - 29) <= 0.5


@given(st.lists(st.floats(1, 5000), min_size=1, max_size=200))
def test_fit_mean_matches_rounded_sample_mean(durations):
    fitted = fit_from_direct_tracks([direct(x, str(i)) for i, x in enumerate(durations)])
    rounded = np.mean([slot_round(x) for x in durations])
    assert abs(mean_slots(fitted) - rounded) <= 1e-9
    if min(durations) >= 45:  # above the one-slot floor
        assert abs(mean_slots(fitted) - np.mean(durations) / 30) <= 0.5
    assert abs(fitted.probabilities.sum() - 1) <= 1e-9


@given(st.lists(st.integers(1, 80), min_size=1, max_size=50), st.integers(1, 5))
def test_fit_normalized_under_multiplicity(slots, rep):
    recs = [direct(30 * s, f"{i}-{j}") for i, s in enumerate(slots) for j in range(rep)]
    fitted = fit_from_direct_tracks(recs)
    assert abs(fitted.probabilities.sum() - 1) <= 1e-9
    assert fitted == fit_from_direct_tracks([direct(30 * s, str(i)) for i, s in enumerate(slots)])
