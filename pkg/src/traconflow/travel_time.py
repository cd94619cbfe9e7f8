"""Discrete law of nominal TRACON transit times, in 30-second slots."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .flow import FlightRecord

SLOT_SECONDS = 30
_NORMALIZATION_TOL = 1e-9


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TravelTimeDistribution:
    """Probability of each transit duration (whole slots, >= 1)."""

    slots: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        slots = np.asarray(self.slots, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=float)
        if slots.ndim != 1 or slots.shape != probs.shape or len(slots) == 0:
            raise ValueError("slots and probabilities must be non-empty 1-D arrays of equal length")
        if np.any(slots < 1):
            raise ValueError("durations must be at least one slot")
        if np.any(np.diff(slots) <= 0):
            raise ValueError("slots must be strictly increasing")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(probs.sum() - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        slots.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "probabilities", probs)
        cdf = np.cumsum(probs)
        cdf.setflags(write=False)
        object.__setattr__(self, "_cdf", cdf)

    @classmethod
    def from_mapping(cls, probabilities: Mapping[int, float]) -> "TravelTimeDistribution":
        items = sorted(probabilities.items())
        return cls(np.array([k for k, _ in items]), np.array([v for _, v in items]))

    @classmethod
    def from_weights(cls, slots, weights) -> "TravelTimeDistribution":
        w = np.asarray(weights, dtype=float)
        return cls(np.asarray(slots), w / w.sum())

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in zip(self.slots, self.probabilities)}

    @property
    def max_slots(self) -> int:
        return int(self.slots[-1])

    def __eq__(self, other):
        if not isinstance(other, TravelTimeDistribution):
            return NotImplemented
        return (np.array_equal(self.slots, other.slots)
                and np.array_equal(self.probabilities, other.probabilities))

    def __repr__(self):
        return f"TravelTimeDistribution({self.as_dict()!r})"


def slot_round(seconds: float) -> int:
    """Nearest whole slot (halves round up), never below one."""
    return max(1, int(np.floor(seconds / SLOT_SECONDS + 0.5)))


def fit_from_direct_tracks(records: Iterable[FlightRecord]) -> TravelTimeDistribution:
    counts = Counter(
        slot_round(r.landing_t - r.entry_t) for r in records if not r.is_rerouted
    )
    if not counts:
        raise CalibrationError("no Direct flights to calibrate from")
    slots = sorted(counts)
    return TravelTimeDistribution.from_weights(slots, [counts[k] for k in slots])


def _index(dist: TravelTimeDistribution, u):
    # inverse CDF; clip guards against a final cumulative value just below 1
    idx = np.searchsorted(dist._cdf, u, side="right")
    return np.minimum(idx, len(dist.slots) - 1)


def sample(dist: TravelTimeDistribution, rng: np.random.Generator) -> int:
    """Draw one duration. Consumes exactly one ``rng.random()`` double."""
    return int(dist.slots[_index(dist, rng.random())])


def sample_many(dist: TravelTimeDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` draws; the same stream as ``n`` successive :func:`sample` calls."""
    return dist.slots[_index(dist, rng.random(n))].astype(np.int64)


def mean_slots(dist: TravelTimeDistribution) -> float:
    return float(np.dot(dist.slots, dist.probabilities))


def default_distribution() -> TravelTimeDistribution:
    """Triangular law on 18..44 slots peaking at 26; mean 29 1/3 slots."""
    k = np.arange(18, 45)
    w = np.where(k <= 26, k - 17, 9 * (45 - k) / 19)
    return TravelTimeDistribution.from_weights(k, w)
