import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import seeds
from traconflow.geometry import DIRECT, classify_track, cumulative_turn, heading_series, track_features
from traconflow.sim import simulate
from traconflow.synthetic import (
    PRESETS, TRACON_RADIUS_NM, TRUE_LABEL, DemandProfile, TrackKind, TrackTemplate, gen_demand,
    gen_scenario, gen_track, gen_track_corpus,
)


def test_profile_validation():
    with pytest.raises(ValueError):
        DemandProfile(((5, 1.0),))
    with pytest.raises(ValueError):
        DemandProfile(((0, 1.0), (0, 2.0)))
    with pytest.raises(ValueError):
        DemandProfile(((0, -1.0),))
    assert DemandProfile.hourly([1, 2]).rates(240).tolist() == [1] * 120 + [2] * 120


def test_template_validation():
    with pytest.raises(ValueError):
        TrackTemplate(TrackKind.DIRECT, 0, speed=0)
    with pytest.raises(ValueError):
        TrackTemplate(TrackKind.DIRECT, 0, noise_sd=-1)
    with pytest.raises(ValueError):
        TrackTemplate(TrackKind.DIRECT, 0, entry_radius=55)


def test_demand_zero():
    d = gen_demand(DemandProfile.constant(0), 2880, np.random.default_rng(0))
    assert d.total == 0


def test_demand_total_bound():
    d = gen_demand(DemandProfile.constant(30), 2880, np.random.default_rng(1))
    assert abs(d.total - 720) <= 3 * math.sqrt(720)


def test_demand_deterministic():
    p = DemandProfile.hourly([10, 40, 5])
    assert gen_demand(p, 360, np.random.default_rng(4)) == gen_demand(p, 360, np.random.default_rng(4))


def test_demand_segments_independent():
    p = DemandProfile(((0, 30.0), (1440, 30.0)))
    totals = np.array([[c[:1440].sum(), c[1440:].sum()] for c in
                       (gen_demand(p, 2880, np.random.default_rng(s)).counts for s in range(400))])
    r = np.corrcoef(totals.T)[0, 1]
    assert abs(r) < 3 / math.sqrt(400)


def test_direct_noise_free():
    for b in range(0, 360, 15):
        tr, lab = gen_track(TrackTemplate(TrackKind.DIRECT, b), np.random.default_rng(b))
        assert lab == DIRECT and classify_track(tr) == DIRECT


def test_hippodrome_winding():
    for s in range(20):
        tr, lab = gen_track(TrackTemplate(TrackKind.HIPPODROME, 17 * s), np.random.default_rng(s))
        _, winding = cumulative_turn(heading_series(tr))
        assert winding >= 360
        assert classify_track(tr) == lab


def test_sturn_nets_near_zero():
    for s in range(20):
        tr, lab = gen_track(TrackTemplate(TrackKind.STURN, 17 * s), np.random.default_rng(s))
        f = track_features(tr)
        assert abs(f.net_turn) <= 30 and f.total_winding > 150
        assert classify_track(tr) == lab


def test_noise_free_archetypes_all_correct():
    corpus = gen_track_corpus(300, np.random.default_rng(12), noise_sd=0.0)
    assert all(classify_track(t) == lab for t, lab in corpus)


@given(seeds, st.sampled_from(list(TrackKind)), st.floats(0, 360), st.floats(0, 1))
def test_containment(seed, kind, bearing, noise):
    tr, _ = gen_track(TrackTemplate(kind, bearing, noise_sd=noise), np.random.default_rng(seed))
    assert np.hypot(tr.x, tr.y).max() <= TRACON_RADIUS_NM + 1e-9


@given(seeds, st.sampled_from(list(TrackKind)))
def test_label_deterministic(seed, kind):
    a, la = gen_track(TrackTemplate(kind, 10.0), np.random.default_rng(seed))
    b, lb = gen_track(TrackTemplate(kind, 10.0), np.random.default_rng(seed))
    assert la == lb == TRUE_LABEL[kind] and np.array_equal(a.x, b.x)


def test_unknown_preset():
    with pytest.raises(ValueError, match="unknown preset"):
        gen_scenario("sunny", np.random.default_rng(0))


def test_presets_deterministic():
    for name in PRESETS:
        a = gen_scenario(name, np.random.default_rng(3), seed=3)
        b = gen_scenario(name, np.random.default_rng(3), seed=3)
        assert a.demand == b.demand and a.schedule == b.schedule and a.config == b.config


def test_quiet_day_no_rerouting():
    for seed in range(20):
        sc = gen_scenario("quiet_day", np.random.default_rng(seed), seed=seed)
        out = simulate(sc.config, sc.demand, sc.schedule, sc.distribution)
        assert (out.rerouting_slots[out.landed] == 0).all()
        assert out.landed[out.nominal_landing_slot < sc.config.horizon_slots - 1].all()


def _hourly_mean(a):
    return a[: len(a) // 120 * 120].reshape(-1, 120).mean(axis=1)


def test_saturated_rerouted_grows_in_peak():
    sc = gen_scenario("saturated_one_runway", np.random.default_rng(6), seed=6)
    out = simulate(sc.config, sc.demand, sc.schedule, sc.distribution)
    h = _hourly_mean(out.n_rerouted)
    assert h[3] < 1 and h[7] < h[9] < h[11]


def test_fog_reroutes_drop_when_runway_opens():
    sc = gen_scenario("fog_day_runway_closure", np.random.default_rng(6), seed=6)
    out = simulate(sc.config, sc.demand, sc.schedule, sc.distribution)
    half = sc.config.horizon_slots // 2
    before = out.n_rerouted[half - 120:half].mean()
    after = out.n_rerouted[half + 120:half + 240].mean()
    assert before > 5 and after < before / 2
