"""Time-based and aircraft-based counting of TRACON arrivals.

For the aircraft-based counts a flight occupies the half-open interval
``[entry_t, landing_t)``: a plane that lands at the instant another enters
is not co-present with it. The time-based counts use the closed interval so
that a flight is always present in the period it lands in. Flow windows are
half-open, ``[c - T/2, c + T/2)``.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Classification

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class FlightRecord:
    flight_id: str
    entry_t: float
    landing_t: float
    runway: str
    classification: Classification

    def __post_init__(self):
        if not (math.isfinite(self.entry_t) and math.isfinite(self.landing_t)):
            raise ValueError(f"flight {self.flight_id}: non-finite times")
        if not self.landing_t > self.entry_t:
            raise ValueError(f"flight {self.flight_id}: landing_t must exceed entry_t")

    @property
    def is_rerouted(self) -> bool:
        return self.classification.is_rerouted


@dataclass(frozen=True)
class AnalysisParams:
    T: float = 900.0
    period: float = 900.0
    one_runway_share: float = 0.75

    def __post_init__(self):
        if not (self.T > 0 and self.period > 0):
            raise ValueError("T and period must be positive")
        if not 0.5 < self.one_runway_share <= 1.0:
            raise ValueError("one_runway_share must lie in (0.5, 1]")


# analysis window used on simulator output (16 minutes)
MODEL_ANALYSIS = AnalysisParams(T=960.0, period=900.0)


@dataclass(frozen=True)
class PeriodCounts:
    period_index: int
    present: int
    entering: int
    landing: int
    rerouted: int
    runways_in_use: int


@dataclass(frozen=True)
class AircraftMetrics:
    flight_id: str
    n_present: int
    entering_flow: float
    landing_flow: float
    n_rerouted: int
    runways_in_use: int


@dataclass(frozen=True)
class ProfileBin:
    n_present: int
    runways_in_use: int
    frequency: int
    mean_landing_flow: float
    std_landing_flow: float
    mean_entering_flow: float
    std_entering_flow: float
    mean_rerouted: float


@dataclass(frozen=True)
class OccupancyProfile:
    bins: tuple[ProfileBin, ...]

    def __len__(self):
        return len(self.bins)

    def __iter__(self):
        return iter(self.bins)

    def select(self, runways_in_use=None, min_frequency: int = 1) -> list[ProfileBin]:
        return [
            b for b in self.bins
            if (runways_in_use is None or b.runways_in_use == runways_in_use)
            and b.frequency >= min_frequency
        ]


def _runways_in_use(labels: Sequence[str], share: float) -> int:
    if not labels:
        return 1
    top = Counter(labels).most_common(1)[0][1]
    return 1 if top / len(labels) > share else 2


def time_based_counts(records: Iterable[FlightRecord], params: AnalysisParams = AnalysisParams()) -> list[PeriodCounts]:
    """Count present/entering/landing/rerouted flights per fixed period.

    Periods run from index 0 (time 0) through the period holding the last
    landing. A period with no landings reports one runway in use.
    """
    records = list(records)
    if not records:
        return []
    P = params.period
    last = max(int(r.landing_t // P) for r in records)
    n = last + 1
    present = np.zeros(n, dtype=int)
    rerouted = np.zeros(n, dtype=int)
    entering = np.zeros(n, dtype=int)
    landing = np.zeros(n, dtype=int)
    labels: list[list[str]] = [[] for _ in range(n)]
    for r in records:
        first = int(r.entry_t // P)
        # closed interval [entry, landing], so the landing period always counts as present
        stop = int(r.landing_t // P) + 1
        present[first:stop] += 1
        if r.is_rerouted:
            rerouted[first:stop] += 1
        entering[first] += 1
        k = int(r.landing_t // P)
        landing[k] += 1
        labels[k].append(r.runway)
    return [
        PeriodCounts(k, int(present[k]), int(entering[k]), int(landing[k]), int(rerouted[k]),
                     _runways_in_use(labels[k], params.one_runway_share))
        for k in range(n)
    ]


class _RangeMax:
    """Sparse table; ``query(lo, hi)`` is the max of ``a[lo:hi]`` (vectorized)."""

    def __init__(self, a: np.ndarray):
        self.levels = [np.asarray(a)]
        j = 1
        while 2 * j <= len(a):
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-j], prev[j:]))
            j *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        size = hi - lo
        k = np.floor(np.log2(np.maximum(size, 1))).astype(int)
        out = np.empty(len(lo), dtype=self.levels[0].dtype)
        for lvl in np.unique(k):
            m = k == lvl
            tab = self.levels[lvl]
            out[m] = np.maximum(tab[lo[m]], tab[hi[m] - (1 << lvl)])
        return out


def _airborne_at(entries_sorted: np.ndarray, landings_sorted: np.ndarray, times: np.ndarray) -> np.ndarray:
    # flights with entry <= tau < landing
    return (np.searchsorted(entries_sorted, times, side="right")
            - np.searchsorted(landings_sorted, times, side="right"))


def _window_counts(event_times_sorted: np.ndarray, centers: np.ndarray, T: float) -> np.ndarray:
    lo = np.searchsorted(event_times_sorted, centers - T / 2, side="left")
    hi = np.searchsorted(event_times_sorted, centers + T / 2, side="left")
    return hi - lo


def aircraft_based_metrics(records: Iterable[FlightRecord], params: AnalysisParams = AnalysisParams()) -> list[AircraftMetrics]:
    """Per-flight occupancy, flows and runway usage.

    ``n_present`` is the largest number of flights airborne together at any
    instant of the flight's own interval; ``n_rerouted`` is the same maximum
    restricted to rerouted flights. Flows are counts in the window of length
    ``T`` centred on the flight's entry (resp. landing), per hour.
    """
    records = list(records)
    if not records:
        return []
    entry = np.array([r.entry_t for r in records], dtype=float)
    land = np.array([r.landing_t for r in records], dtype=float)
    rer = np.array([r.is_rerouted for r in records])

    # occupancy only rises at entry instants, so the maximum over a flight's
    # interval is attained at one of the entry times inside it
    e_sorted = np.sort(entry)
    l_sorted = np.sort(land)
    occ = _airborne_at(e_sorted, l_sorted, e_sorted)
    occ_r = _airborne_at(np.sort(entry[rer]), np.sort(land[rer]), e_sorted)
    lo = np.searchsorted(e_sorted, entry, side="left")
    hi = np.searchsorted(e_sorted, land, side="left")
    n_present = _RangeMax(occ).query(lo, hi)
    n_rerouted = _RangeMax(occ_r).query(lo, hi)

    T = params.T
    per_hour = SECONDS_PER_HOUR / T
    entering_flow = _window_counts(e_sorted, entry, T) * per_hour
    landing_flow = _window_counts(l_sorted, land, T) * per_hour

    order = np.argsort(land, kind="stable")
    land_by_time = land[order]
    runway_by_time = [records[i].runway for i in order]
    wlo = np.searchsorted(land_by_time, land - T / 2, side="left")
    whi = np.searchsorted(land_by_time, land + T / 2, side="left")

    out = []
    for i, r in enumerate(records):
        out.append(AircraftMetrics(
            r.flight_id,
            int(n_present[i]),
            float(entering_flow[i]),
            float(landing_flow[i]),
            int(n_rerouted[i]),
            _runways_in_use(runway_by_time[wlo[i]:whi[i]], params.one_runway_share),
        ))
    return out


def occupancy_profile(metrics: Iterable[AircraftMetrics], split_runways: bool = True) -> OccupancyProfile:
    """Aggregate aircraft metrics per ``(n_present, runways_in_use)`` bin.

    Standard deviations are population (ddof=0). With
    ``split_runways=False`` all metrics of one occupancy are pooled and the
    bin is tagged with the majority runway count.
    """
    groups: dict[tuple[int, int], list[AircraftMetrics]] = defaultdict(list)
    for m in metrics:
        key = (m.n_present, m.runways_in_use if split_runways else 0)
        groups[key].append(m)
    bins = []
    for (n, rw), ms in sorted(groups.items()):
        lf = np.array([m.landing_flow for m in ms])
        ef = np.array([m.entering_flow for m in ms])
        nr = np.array([m.n_rerouted for m in ms])
        if not split_runways:
            rw = Counter(m.runways_in_use for m in ms).most_common(1)[0][0]
        bins.append(ProfileBin(n, rw, len(ms), float(lf.mean()), float(lf.std()),
                               float(ef.mean()), float(ef.std()), float(nr.mean())))
    return OccupancyProfile(tuple(bins))
