"""Ground-truth scenario generators: demand, runway schedules and 2D tracks."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Classification, Detail, DIRECT, Track
from .sim import SLOTS_PER_DAY, DemandSequence, RunwaySchedule, SimConfig
from .travel_time import TravelTimeDistribution, default_distribution

TRACON_RADIUS_NM = 50.0


@dataclass(frozen=True)
class DemandProfile:
    """Piecewise-constant arrival rate, as ``(from_slot, aircraft per hour)`` steps."""

    steps: tuple[tuple[int, float], ...]

    def __post_init__(self):
        steps = tuple((int(s), float(r)) for s, r in self.steps)
        if not steps or steps[0][0] != 0:
            raise ValueError("first step must start at slot 0")
        if any(b[0] <= a[0] for a, b in zip(steps, steps[1:])):
            raise ValueError("step start slots must be strictly increasing")
        if any(r < 0 for _, r in steps):
            raise ValueError("negative rate")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def constant(cls, rate: float) -> "DemandProfile":
        return cls(((0, rate),))

    @classmethod
    def hourly(cls, rates: Sequence[float], slot_seconds: int = 30) -> "DemandProfile":
        per_hour = 3600 // slot_seconds
        return cls(tuple((i * per_hour, r) for i, r in enumerate(rates)))

    def rates(self, horizon_slots: int, slot_seconds: int = 30) -> np.ndarray:
        """Rate in effect at each slot (aircraft per hour)."""
        out = np.zeros(horizon_slots)
        for (start, rate), nxt in zip(self.steps, self.steps[1:] + ((horizon_slots, 0.0),)):
            out[start:nxt[0]] = rate
        return out


def gen_demand(profile: DemandProfile, horizon_slots: int, rng: np.random.Generator,
               slot_seconds: int = 30) -> DemandSequence:
    """Independent Poisson entry counts with mean ``rate * slot_seconds / 3600``."""
    lam = profile.rates(horizon_slots, slot_seconds) * slot_seconds / 3600.0
    return DemandSequence(rng.poisson(lam))


# --- tracks -----------------------------------------------------------------

class TrackKind(str, enum.Enum):
    DIRECT = "Direct"
    STURN = "STurn"
    HIPPODROME = "Hippodrome"


TRUE_LABEL = {
    TrackKind.DIRECT: DIRECT,
    TrackKind.STURN: Classification.rerouted(Detail.STURN),
    TrackKind.HIPPODROME: Classification.rerouted(Detail.HIPPODROME),
}


@dataclass(frozen=True)
class TrackTemplate:
    kind: TrackKind
    entry_bearing: float
    entry_radius: float = 45.0
    speed: float = 220.0
    noise_sd: float = 0.0
    sample_dt: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TrackKind(self.kind))
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        if not 0 < self.entry_radius <= TRACON_RADIUS_NM:
            raise ValueError(f"entry_radius must lie in (0, {TRACON_RADIUS_NM}]")


class _Path:
    """Polyline under construction, flown like a turtle (heading 0 = north)."""

    def __init__(self, x: float, y: float, heading: float):
        self.pts = [(x, y)]
        self.heading = heading

    @property
    def pos(self):
        return self.pts[-1]

    def forward(self, dist: float):
        x, y = self.pos
        h = math.radians(self.heading)
        self.pts.append((x + dist * math.sin(h), y + dist * math.cos(h)))

    def turn(self, angle: float, radius: float, step_deg: float = 5.0):
        # constant-radius arc; positive angle is a right (clockwise) turn
        n = max(1, int(math.ceil(abs(angle) / step_deg)))
        chord_turn = angle / n
        chord = 2 * radius * math.sin(math.radians(abs(chord_turn)) / 2)
        for _ in range(n):
            self.heading += chord_turn / 2
            self.forward(chord)
            self.heading += chord_turn / 2

    def goto(self, x: float, y: float):
        px, py = self.pos
        self.heading = math.degrees(math.atan2(x - px, y - py))
        self.pts.append((x, y))

    def array(self) -> np.ndarray:
        return np.array(self.pts)


def _direct_waypoints(template: TrackTemplate, rng) -> list[tuple[float, float]]:
    b = math.radians(template.entry_bearing)
    r0 = template.entry_radius
    entry = np.array([r0 * math.sin(b), r0 * math.cos(b)])
    while True:
        n_wp = int(rng.integers(1, 3))
        fr = np.sort(rng.uniform(0.25, 0.8, n_wp))
        lateral = np.array([-math.cos(b), math.sin(b)])
        pts = [entry]
        for f in fr:
            off = rng.uniform(-0.08, 0.08) * r0
            pts.append(entry * (1 - f) + lateral * off)
        pts.append(np.zeros(2))
        turns = _turns(np.array(pts))
        if np.abs(turns).max() <= 30.0 and abs(turns.sum()) <= 20.0:
            return [tuple(p) for p in pts]


def _turns(pts: np.ndarray) -> np.ndarray:
    d = np.diff(pts, axis=0)
    h = np.degrees(np.arctan2(d[:, 0], d[:, 1]))
    return (np.diff(h) + 180.0) % 360.0 - 180.0


_CLEARANCE_NM = 6.0


def _build_path(template: TrackTemplate, rng) -> _Path:
    side = 1.0 if rng.random() < 0.5 else -1.0
    radius = rng.uniform(1.0, 1.5)
    excursion = rng.uniform(4.0, 7.0)
    straight = rng.uniform(2.0, 5.0)
    # along-track extent of the S-turn, generous
    extent = excursion + 4 * radius
    while True:
        wps = _direct_waypoints(template, rng)
        segs = list(zip(wps, wps[1:]))
        i_leg = max(range(len(segs)), key=lambda i: math.dist(*segs[i]))
        leg = math.dist(*segs[i_leg])
        if template.kind is not TrackKind.STURN or leg >= extent + 2 * _CLEARANCE_NM:
            break
    path = _Path(*wps[0], heading=0.0)
    if template.kind is TrackKind.DIRECT:
        for _, (x, y) in segs:
            path.goto(x, y)
        return path
    # the manoeuvre is flown on the longest leg, clear of both ends
    for _, (x, y) in segs[:i_leg]:
        path.goto(x, y)
    (ax, ay), (bx, by) = segs[i_leg]
    path.heading = math.degrees(math.atan2(bx - ax, by - ay))
    if template.kind is TrackKind.STURN:
        path.forward(rng.uniform(_CLEARANCE_NM, leg - extent - _CLEARANCE_NM))
        path.turn(side * 60, radius)
        path.forward(excursion)
        path.turn(-side * 120, radius)
        path.forward(excursion)
        path.turn(side * 60, radius)
    else:
        path.forward(leg * rng.uniform(0.2, 0.6))
        for _ in range(int(rng.integers(2, 4))):
            path.turn(side * 180, radius)
            path.forward(straight)
            path.turn(side * 180, radius)
            path.forward(straight)
    path.goto(bx, by)
    for _, (x, y) in segs[i_leg + 1:]:
        path.goto(x, y)
    return path


def _sample_polyline(pts: np.ndarray, spacing: float) -> np.ndarray:
    seg = np.hypot(*np.diff(pts, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    n = max(2, int(s[-1] // spacing) + 1)
    grid = np.linspace(0.0, s[-1], n)
    return np.column_stack([np.interp(grid, s, pts[:, 0]), np.interp(grid, s, pts[:, 1])])


def _fit_inside(xy: np.ndarray, limit: float) -> np.ndarray:
    r = np.hypot(xy[:, 0], xy[:, 1])
    over = r > limit
    if over.any():
        xy = xy.copy()
        xy[over] *= (limit / r[over])[:, None]
    return xy


def gen_track(template: TrackTemplate, rng: np.random.Generator,
              flight_id: str = "synthetic", t0: float = 0.0) -> tuple[Track, Classification]:
    """One synthetic arrival track and its ground-truth label."""
    path = _build_path(template, rng).array()
    spacing = template.speed / 3600.0 * template.sample_dt
    xy = _sample_polyline(path, spacing)
    if template.noise_sd > 0:
        xy = xy + rng.normal(0.0, template.noise_sd, xy.shape)
    xy = _fit_inside(xy, TRACON_RADIUS_NM)
    t = t0 + template.sample_dt * np.arange(len(xy))
    return Track(flight_id, t, xy[:, 0], xy[:, 1], "R1"), TRUE_LABEL[template.kind]


def gen_track_corpus(n: int, rng: np.random.Generator, noise_sd: float = 0.2,
                     kinds: Sequence[TrackKind] = tuple(TrackKind)) -> list[tuple[Track, Classification]]:
    """``n`` tracks cycling through ``kinds`` with random bearing, radius and speed."""
    out = []
    for i in range(n):
        tpl = TrackTemplate(
            kinds[i % len(kinds)],
            entry_bearing=float(rng.uniform(0, 360)),
            entry_radius=float(rng.uniform(35, 50)),
            speed=float(rng.uniform(180, 260)),
            noise_sd=noise_sd,
        )
        out.append(gen_track(tpl, rng, flight_id=f"F{i:05d}", t0=float(i * 60)))
    return out


# --- scenario presets -------------------------------------------------------

# hourly arrival rates over one day (24 values)
_SATURATED = [4, 2, 2, 2, 4, 8, 18, 26, 34, 38, 38, 34, 30, 28, 32, 36, 38, 34, 28, 22, 16, 10, 6, 4]
_PEAK = [4, 2, 2, 2, 6, 12, 28, 40, 50, 54, 50, 44, 40, 44, 50, 54, 50, 40, 30, 22, 16, 10, 6, 4]

PRESETS = ("quiet_day", "saturated_one_runway", "fog_day_runway_closure", "two_runway_peak")


@dataclass(frozen=True)
class Scenario:
    config: SimConfig
    demand: DemandSequence
    schedule: RunwaySchedule
    distribution: TravelTimeDistribution


def stratified_demand(horizon_slots: int, block_slots: int, rng: np.random.Generator) -> DemandSequence:
    """One arrival at a uniformly drawn slot in each block of ``block_slots``."""
    counts = np.zeros(horizon_slots, dtype=np.int64)
    starts = np.arange(0, horizon_slots, block_slots)
    offsets = rng.integers(0, np.minimum(block_slots, horizon_slots - starts))
    counts[starts + offsets] = 1
    return DemandSequence(counts)


# quiet day: one arrival per 15 minutes. Arrivals two blocks apart are at
# least 31 slots apart, more than the spread of nominal transit times, so at
# most two planes ever compete for the runways and none has to hold.
_QUIET_BLOCK = 30


def _daily(rates: Sequence[float], days: int) -> DemandProfile:
    return DemandProfile.hourly(list(rates) * days)


def gen_scenario(name: str, rng: np.random.Generator, days: int = 1, seed: int = 0) -> Scenario:
    """Named preset; demand drawn from ``rng``, ``seed`` stored in the config."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if days < 1:
        raise ValueError("days must be >= 1")
    H = days * SLOTS_PER_DAY
    config = SimConfig(horizon_slots=H, seed=seed, n_runways=2)
    if name == "quiet_day":
        demand = stratified_demand(H, _QUIET_BLOCK, rng)
        return Scenario(config, demand, RunwaySchedule.all_open(2, H), default_distribution())
    if name == "saturated_one_runway":
        profile, schedule = _daily(_SATURATED, days), RunwaySchedule.runways_open([True, False], H)
    elif name == "fog_day_runway_closure":
        # second runway closed for the first half of the horizon
        profile = _daily(_SATURATED, days)
        schedule = RunwaySchedule((((0, H),), ((H // 2, H),)))
    else:
        profile, schedule = _daily(_PEAK, days), RunwaySchedule.all_open(2, H)
    demand = gen_demand(profile, H, rng)
    return Scenario(config, demand, schedule, default_distribution())
