"""Capped-TRACON experiments: hold excess arrivals outside in a FIFO queue."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .sim import DemandSequence, RunwaySchedule, SimConfig, SimOutput, simulate
from .travel_time import TravelTimeDistribution


@dataclass(frozen=True, order=True)
class CapConfig:
    """Maximum number of planes inside the TRACON; ``None`` is unbounded."""

    max_in_tracon: Optional[int] = None

    def __post_init__(self):
        if self.max_in_tracon is not None and self.max_in_tracon < 1:
            raise ValueError("cap must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "CapConfig":
        text = text.strip().lower()
        if text in ("inf", "none", "unbounded"):
            return cls(None)
        try:
            value = int(text)
        except ValueError:
            raise ValueError(f"cap {text!r} is neither a positive integer nor 'inf'") from None
        return cls(value)

    @property
    def sort_key(self) -> float:
        return math.inf if self.max_in_tracon is None else self.max_in_tracon

    def __str__(self):
        return "inf" if self.max_in_tracon is None else str(self.max_in_tracon)


UNBOUNDED = CapConfig(None)


@dataclass(frozen=True, eq=False)
class DelayReport:
    """Delays of the planes that landed within the horizon, in slots."""

    waiting_slots: np.ndarray
    rerouting_slots: np.ndarray
    n_planes: int
    n_unlanded: int
    slot_seconds: int = 30

    @classmethod
    def from_output(cls, output: SimOutput) -> "DelayReport":
        m = output.landed
        return cls(output.waiting_slots[m], output.rerouting_slots[m], output.n_planes,
                   int((~m).sum()), output.config.slot_seconds)

    @property
    def total_slots(self) -> np.ndarray:
        return self.waiting_slots + self.rerouting_slots

    def _mean(self, a) -> float:
        return float(a.mean()) if len(a) else 0.0

    @property
    def mean_waiting_s(self) -> float:
        return self._mean(self.waiting_slots) * self.slot_seconds

    @property
    def mean_rerouting_s(self) -> float:
        return self._mean(self.rerouting_slots) * self.slot_seconds

    @property
    def mean_total_s(self) -> float:
        return self.mean_waiting_s + self.mean_rerouting_s

    @property
    def percent_delayed(self) -> float:
        return 100.0 * self._mean(self.total_slots >= 1)


def run_capped(config: SimConfig, cap: CapConfig, demand: DemandSequence,
               schedule: RunwaySchedule, dist: TravelTimeDistribution) -> tuple[SimOutput, DelayReport]:
    out = simulate(config, demand, schedule, dist, cap=cap.max_in_tracon)
    return out, DelayReport.from_output(out)


def sweep_caps(config: SimConfig, caps: Iterable[CapConfig], demand: DemandSequence,
               schedule: RunwaySchedule, dist: TravelTimeDistribution) -> dict[CapConfig, DelayReport]:
    """One capped run per cap, same seed and inputs, ordered by cap."""
    caps = sorted(set(caps), key=lambda c: c.sort_key)
    if not caps:
        raise ValueError("no caps given")
    return {c: run_capped(config, c, demand, schedule, dist)[1] for c in caps}
