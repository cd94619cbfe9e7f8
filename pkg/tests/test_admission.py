import numpy as np
import pytest
from hypothesis import given

from helpers import config, one_runway, point_mass, random_instance, seeds
from reference_sim import simulate_reference
from traconflow.admission import UNBOUNDED, CapConfig, DelayReport, run_capped, sweep_caps
from traconflow.sim import DemandSequence, run, simulate
from traconflow.synthetic import gen_scenario
from traconflow.travel_time import default_distribution, sample_many


def test_cap_config():
    with pytest.raises(ValueError):
        CapConfig(0)
    assert CapConfig.parse("inf") == UNBOUNDED and CapConfig.parse(" 7 ") == CapConfig(7)
    with pytest.raises(ValueError):
        CapConfig.parse("x")
    assert str(CapConfig(5)) == "5" and str(UNBOUNDED) == "inf"


def test_unbounded_identity():
    sc = gen_scenario("saturated_one_runway", np.random.default_rng(0), days=1, seed=0)
    out, _ = run_capped(sc.config, UNBOUNDED, sc.demand, sc.schedule, sc.distribution)
    assert out == run(sc.config, sc.demand, sc.schedule, sc.distribution)


def test_cap_one_hand_simulation():
    out, rep = run_capped(config(60, 1), CapConfig(1), DemandSequence.from_mapping({0: 2}, 60),
                          one_runway(60), point_mass(20))
    assert out.entry_slot.tolist() == [0, 20]
    assert out.actual_landing_slot.tolist() == [20, 40]
    assert out.waiting_slots.tolist() == [0, 20] and out.rerouting_slots.tolist() == [0, 0]
    assert rep.mean_waiting_s == 10 * 30 and rep.mean_rerouting_s == 0 and rep.percent_delayed == 50


def test_delay_report_over_landed():
    out, rep = run_capped(config(30, 1), CapConfig(1), DemandSequence.from_mapping({0: 2}, 30),
                          one_runway(30), point_mass(20))
    assert rep.n_planes == 2 and rep.n_unlanded == 1 and rep.waiting_slots.tolist() == [0]


@pytest.mark.xfail(strict=True, reason="with a saturated runway, mean rerouting grows by about "
                   "4 slots per extra admitted plane, so caps 9..12 spread far beyond 10%")
def test_near_capacity_rerouting_caps_9_to_12():
    H = 2880 * 5
    demand = DemandSequence(np.random.default_rng(1).poisson(28 / 120, H))
    table = sweep_caps(config(H, 1), [CapConfig(c) for c in range(9, 13)], demand,
                       one_runway(H), default_distribution())
    r = np.array([rep.mean_rerouting_s for rep in table.values()])
    spread = (r.max() - r.min()) / r.mean()
    print(f"mean rerouting s by cap 9..12: {np.round(r, 1).tolist()} spread {spread:.2f}")
    assert spread <= 0.10


def test_sweep_single_unbounded():
    sc = gen_scenario("two_runway_peak", np.random.default_rng(3), days=1, seed=3)
    (rep,) = sweep_caps(sc.config, [UNBOUNDED], sc.demand, sc.schedule, sc.distribution).values()
    direct = DelayReport.from_output(run(sc.config, sc.demand, sc.schedule, sc.distribution))
    assert np.array_equal(rep.rerouting_slots, direct.rerouting_slots)
    assert rep.mean_waiting_s == 0


def test_sweep_order_and_waiting():
    sc = gen_scenario("saturated_one_runway", np.random.default_rng(5), days=2, seed=5)
    caps = [CapConfig(c) for c in (12, 6, 9, 7, 8, 11, 10)] + [UNBOUNDED]
    table = sweep_caps(sc.config, caps, sc.demand, sc.schedule, sc.distribution)
    assert [str(c) for c in table] == ["6", "7", "8", "9", "10", "11", "12", "inf"]
    w = [rep.mean_waiting_s for rep in table.values()]
    assert all(b < a for a, b in zip(w, w[1:]))
    pct = [rep.percent_delayed for rep in table.values()][:-1]
    assert all(b <= a for a, b in zip(pct, pct[1:]))


def test_sweep_empty():
    with pytest.raises(ValueError):
        sweep_caps(config(5), [], DemandSequence(np.zeros(5, int)), one_runway(5), point_mass(2))


@given(seeds)
def test_cap_properties(seed):
    rng = np.random.default_rng(seed)
    cfg, demand, sched, dist, _ = random_instance(rng, 200, 40)
    outs = {c: simulate(cfg, demand, sched, dist, c) for c in (1, 2, 3, 5, 8, None)}
    for c, out in outs.items():
        if c is not None:
            assert (out.n_in_tracon <= c).all()
        # FIFO: admission order is arrival order
        adm = out.entry_slot[out.admitted]
        assert (np.diff(adm) >= 0).all() and (np.diff(out.arrival_slot) >= 0).all()
        assert (out.waiting_slots[out.admitted] >= 0).all()
        landed = out.landed
        assert (out.rerouting_slots[landed] >= 0).all()
    landings = [outs[c].landed.sum() for c in (1, 2, 3, 5, 8, None)]
    assert all(b >= a for a, b in zip(landings, landings[1:]))


@given(seeds)
def test_larger_cap_admits_no_later(seed):
    # superset-admission check, with the reference simulator as the oracle
    cfg, demand, sched, dist, _ = random_instance(np.random.default_rng(seed), 100, 8)
    mask = sched.open_mask(cfg.n_runways, cfg.horizon_slots)
    nominals = sample_many(dist, np.random.default_rng(cfg.seed), demand.total).tolist()
    entries = []
    for cap in (1, 2, 3, 4, None):
        ref = simulate_reference(cfg.horizon_slots, cfg.n_runways, demand.padded(cfg.horizon_slots).tolist(),
                                 nominals, lambda r, t: bool(mask[r, t]), cap)
        e = np.array(ref["entry"], dtype=float)
        e[e < 0] = np.inf
        entries.append(e)
    for small, big in zip(entries, entries[1:]):
        assert (big <= small).all()
