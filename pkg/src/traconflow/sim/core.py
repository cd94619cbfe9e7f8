"""Discrete-time TRACON queuing and landing model.

Time advances in 30-second slots. Each entering plane draws a nominal
transit time and requests the runway for the lockout period starting at
its nominal landing slot; planes that cannot get a reservation hold in the
TRACON until a runway is free. A landing locks its runway for 4 slots.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..flow import FlightRecord
from ..geometry import Classification, DIRECT
from ..travel_time import TravelTimeDistribution, sample, sample_many
from . import _engine
from ._engine import NO_SLOT, SimulationError  # noqa: F401 (re-exported)

log = logging.getLogger(__name__)

if os.environ.get("TRACONFLOW_PURE_PYTHON") == "1":
    _run_kernel = _engine.run_engine
    BACKEND = "python"
else:
    try:
        from ._ckernel import run_kernel as _run_kernel
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _run_kernel = _engine.run_engine
        BACKEND = "python"

SECONDS_PER_HOUR = 3600
SLOTS_PER_DAY = 2880


class InvalidInputError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    horizon_slots: int
    seed: int = 0
    slot_seconds: int = 30
    lockout_slots: int = 4
    n_runways: int = 2

    def __post_init__(self):
        if self.horizon_slots < 1:
            raise InvalidInputError("horizon_slots must be >= 1")
        if self.slot_seconds * self.lockout_slots != 120:
            raise InvalidInputError("runway lockout must last 120 s")
        if self.n_runways < 1:
            raise InvalidInputError("need at least one runway")

    @property
    def slots_per_hour(self) -> float:
        return SECONDS_PER_HOUR / self.slot_seconds


@dataclass(frozen=True, eq=False)
class DemandSequence:
    """Number of planes arriving at the TRACON boundary in each slot."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1:
            raise InvalidInputError("demand must be one-dimensional")
        if np.any(c < 0):
            raise InvalidInputError("negative entry count")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_mapping(cls, entries: Mapping[int, int], horizon: Optional[int] = None) -> "DemandSequence":
        if entries and min(entries) < 0:
            raise InvalidInputError("negative slot index")
        n = horizon if horizon is not None else (max(entries) + 1 if entries else 0)
        if entries and max(entries) >= n:
            raise InvalidInputError(f"demand references slot {max(entries)} >= horizon {n}")
        c = np.zeros(n, dtype=np.int64)
        for s, k in entries.items():
            c[s] += k
        return cls(c)

    @property
    def entries(self) -> dict[int, int]:
        return {int(s): int(self.counts[s]) for s in np.flatnonzero(self.counts)}

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def padded(self, horizon: int) -> np.ndarray:
        if len(self.counts) > horizon and self.counts[horizon:].any():
            last = int(np.flatnonzero(self.counts)[-1])
            raise InvalidInputError(f"demand references slot {last} >= horizon {horizon}")
        out = np.zeros(horizon, dtype=np.int64)
        n = min(horizon, len(self.counts))
        out[:n] = self.counts[:n]
        return out

    def __eq__(self, other):
        if not isinstance(other, DemandSequence):
            return NotImplemented
        a, b = self.counts, other.counts
        n = max(len(a), len(b))
        return np.array_equal(np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b))))


@dataclass(frozen=True)
class RunwaySchedule:
    """Half-open open intervals ``[from_slot, to_slot)`` for each runway."""

    intervals: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        norm = []
        for r, ivs in enumerate(self.intervals):
            ivs = tuple(sorted((int(a), int(b)) for a, b in ivs))
            for a, b in ivs:
                if a < 0 or b <= a:
                    raise InvalidInputError(f"runway {r + 1}: bad interval [{a}, {b})")
            for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
                if a1 < b0:
                    raise InvalidInputError(f"runway {r + 1}: overlapping intervals")
            norm.append(ivs)
        object.__setattr__(self, "intervals", tuple(norm))

    @classmethod
    def all_open(cls, n_runways: int, horizon: int) -> "RunwaySchedule":
        return cls(tuple(((0, horizon),) for _ in range(n_runways)))

    @classmethod
    def runways_open(cls, open_runways: Sequence[bool], horizon: int) -> "RunwaySchedule":
        return cls(tuple(((0, horizon),) if o else () for o in open_runways))

    @property
    def n_runways(self) -> int:
        return len(self.intervals)

    def open_mask(self, n_runways: int, horizon: int) -> np.ndarray:
        if self.n_runways > n_runways:
            raise InvalidInputError(f"schedule names {self.n_runways} runways, config has {n_runways}")
        mask = np.zeros((n_runways, horizon), dtype=bool)
        for r, ivs in enumerate(self.intervals):
            for a, b in ivs:
                if b > horizon:
                    raise InvalidInputError(f"runway {r + 1} interval [{a}, {b}) exceeds horizon {horizon}")
                mask[r, a:b] = True
        return mask


def runway_label(index: int) -> str:
    return f"R{index + 1}"


@dataclass(frozen=True, eq=False)
class SimOutput:
    """Per-plane and per-slot results of one run. ``-1`` marks "never"."""

    config: SimConfig
    arrival_slot: np.ndarray
    entry_slot: np.ndarray
    nominal_slots: np.ndarray
    actual_landing_slot: np.ndarray
    runway: np.ndarray
    n_in_tracon: np.ndarray
    n_rerouted: np.ndarray
    n_waiting: np.ndarray

    @classmethod
    def from_kernel(cls, config: SimConfig, raw: dict) -> "SimOutput":
        return cls(config, raw["arrival"], raw["entry"], raw["nominal"], raw["landing"],
                   raw["runway"], raw["in_tracon"], raw["rerouted"], raw["waiting"])

    @property
    def n_planes(self) -> int:
        return len(self.arrival_slot)

    @property
    def plane_id(self) -> np.ndarray:
        return np.arange(self.n_planes)

    @property
    def admitted(self) -> np.ndarray:
        return self.entry_slot >= 0

    @property
    def landed(self) -> np.ndarray:
        return self.actual_landing_slot >= 0

    @property
    def nominal_landing_slot(self) -> np.ndarray:
        return np.where(self.admitted, self.entry_slot + self.nominal_slots, NO_SLOT)

    @property
    def rerouting_slots(self) -> np.ndarray:
        """Actual minus nominal landing slot; ``-1`` for unlanded planes."""
        return np.where(self.landed, self.actual_landing_slot - self.nominal_landing_slot, NO_SLOT)

    @property
    def waiting_slots(self) -> np.ndarray:
        """Slots held outside the TRACON; ``-1`` for planes never admitted."""
        return np.where(self.admitted, self.entry_slot - self.arrival_slot, NO_SLOT)

    def unlanded(self) -> np.ndarray:
        return np.flatnonzero(~self.landed)

    def landings(self) -> np.ndarray:
        """Landing counts, shape ``(n_runways, horizon)``."""
        out = np.zeros((self.config.n_runways, self.config.horizon_slots), dtype=np.int64)
        m = self.landed
        np.add.at(out, (self.runway[m], self.actual_landing_slot[m]), 1)
        return out

    def runway_occupied(self) -> np.ndarray:
        """True while a runway is locked out by a landing within the last 4 slots."""
        land = self.landings()
        k = self.config.lockout_slots
        cum = np.concatenate([np.zeros((land.shape[0], 1), dtype=np.int64), np.cumsum(land, axis=1)], axis=1)
        t = np.arange(land.shape[1])
        lo = np.maximum(t - k + 1, 0)
        return (cum[:, t + 1] - cum[:, lo]) > 0

    def fields(self) -> dict[str, np.ndarray]:
        return {
            "arrival_slot": self.arrival_slot, "entry_slot": self.entry_slot,
            "nominal_slots": self.nominal_slots, "actual_landing_slot": self.actual_landing_slot,
            "runway": self.runway, "n_in_tracon": self.n_in_tracon,
            "n_rerouted": self.n_rerouted, "n_waiting": self.n_waiting,
        }

    def __eq__(self, other):
        if not isinstance(other, SimOutput):
            return NotImplemented
        a, b = self.fields(), other.fields()
        return self.config == other.config and all(np.array_equal(a[k], b[k]) for k in a)


def _nominal_draws(config: SimConfig, dist: TravelTimeDistribution, n: int) -> np.ndarray:
    # admission is FIFO, so the i-th draw always belongs to plane i
    return sample_many(dist, np.random.default_rng(config.seed), n)


def simulate(config: SimConfig, demand: DemandSequence, schedule: RunwaySchedule,
             dist: TravelTimeDistribution, cap: Optional[int] = None) -> SimOutput:
    H = config.horizon_slots
    arrivals = demand.padded(H)
    mask = schedule.open_mask(config.n_runways, H)
    if cap is not None and cap < 1:
        raise InvalidInputError("cap must be >= 1")
    nominals = _nominal_draws(config, dist, int(arrivals.sum()))
    raw = _run_kernel(H, config.n_runways, config.lockout_slots, arrivals, nominals, mask,
                      -1 if cap is None else int(cap))
    out = SimOutput.from_kernel(config, raw)
    if len(out.unlanded()):
        log.info("%d of %d planes still unlanded at horizon end", len(out.unlanded()), out.n_planes)
    return out


def run(config: SimConfig, demand: DemandSequence, schedule: RunwaySchedule,
        dist: TravelTimeDistribution) -> SimOutput:
    """Simulate ``demand`` against ``schedule`` for ``config.horizon_slots`` slots."""
    return simulate(config, demand, schedule, dist)


@dataclass
class SimState:
    """Incremental simulation; advance with :func:`step`."""

    config: SimConfig
    engine: _engine.EngineState

    @property
    def clock(self) -> int:
        return self.engine.clock

    def output(self) -> SimOutput:
        raw = self.engine.result()
        cfg = self.config
        if self.engine.clock < cfg.horizon_slots:
            cfg = SimConfig(self.engine.clock or 1, cfg.seed, cfg.slot_seconds,
                            cfg.lockout_slots, cfg.n_runways)
        return SimOutput.from_kernel(cfg, raw)


def initial_state(config: SimConfig, schedule: RunwaySchedule, dist: TravelTimeDistribution,
                  cap: Optional[int] = None) -> SimState:
    rng = np.random.default_rng(config.seed)
    mask = schedule.open_mask(config.n_runways, config.horizon_slots)
    engine = _engine.EngineState(config.horizon_slots, config.n_runways, config.lockout_slots,
                                 mask, cap, lambda: sample(dist, rng))
    return SimState(config, engine)


def step(state: SimState, slot: int, entrants: int) -> SimState:
    """Advance ``state`` by one slot with ``entrants`` new arrivals."""
    state.engine.step(slot, entrants)
    return state


def throughput(output: SimOutput, window_slots: int) -> np.ndarray:
    """Landings per hour in each window ``[t, t + window_slots)``."""
    if window_slots < 1:
        raise InvalidInputError("window_slots must be >= 1")
    per_slot = output.landings().sum(axis=0)
    if len(per_slot) < window_slots:
        return np.zeros(0)
    cum = np.concatenate([[0], np.cumsum(per_slot)])
    counts = cum[window_slots:] - cum[:-window_slots]
    return counts * (output.config.slots_per_hour / window_slots)


def to_flight_records(output: SimOutput) -> list[FlightRecord]:
    """Landed planes as flight records; delayed landings count as rerouted."""
    dt = output.config.slot_seconds
    nominal_landing = output.nominal_landing_slot
    records = []
    for pid in np.flatnonzero(output.landed):
        delayed = output.actual_landing_slot[pid] > nominal_landing[pid]
        records.append(FlightRecord(
            str(pid),
            float(output.entry_slot[pid] * dt),
            float(output.actual_landing_slot[pid] * dt),
            runway_label(int(output.runway[pid])),
            Classification.rerouted() if delayed else DIRECT,
        ))
    skipped = output.n_planes - len(records)
    if skipped:
        log.warning("excluded %d unlanded planes from flight records", skipped)
    return records
