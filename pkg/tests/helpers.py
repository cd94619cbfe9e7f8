"""Shared builders for simulator tests."""
import numpy as np
from hypothesis import strategies as st

from traconflow.sim import DemandSequence, RunwaySchedule, SimConfig
from traconflow.travel_time import TravelTimeDistribution


def point_mass(n):
    return TravelTimeDistribution.from_mapping({n: 1.0})


def config(horizon, n_runways=2, seed=0):
    return SimConfig(horizon_slots=horizon, seed=seed, n_runways=n_runways)


def one_runway(horizon):
    return RunwaySchedule.runways_open([True], horizon)


def random_instance(rng, max_horizon=100, max_planes=8):
    """Small random scenario: ``(config, demand, schedule, dist, cap)``."""
    H = int(rng.integers(1, max_horizon + 1))
    R = int(rng.integers(1, 3))
    n = int(rng.integers(0, max_planes + 1))
    counts = np.bincount(rng.integers(0, H, n), minlength=H)
    ivs = []
    for _ in range(R):
        if rng.random() < 0.4:
            a, b = sorted(int(v) for v in rng.integers(0, H + 1, 2))
            ivs.append(tuple((x, y) for x, y in ((0, a), (b, H)) if y > x))
        else:
            ivs.append(((0, H),))
    support = np.unique(rng.integers(1, int(rng.integers(2, 40)), int(rng.integers(1, 6))))
    dist = TravelTimeDistribution.from_weights(support, rng.uniform(0.1, 1, len(support)))
    cap = None if rng.random() < 0.5 else int(rng.integers(1, 5))
    return (config(H, R, int(rng.integers(0, 2**31))), DemandSequence(counts),
            RunwaySchedule(tuple(ivs)), dist, cap)


seeds = st.integers(0, 2**32 - 1)
