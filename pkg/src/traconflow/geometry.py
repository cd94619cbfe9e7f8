"""2D radar tracks and direct/rerouted classification.

Tracks live in a local tangent plane: ``x`` is nautical miles east and ``y``
nautical miles north of the airport reference point, ``t`` is seconds since
the scenario epoch.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

CONTAINMENT_RADIUS_NM = 60.0
# endpoints closer than this are treated as this far apart in the path ratio
ENDPOINT_FLOOR_NM = 0.1
# reference ground speed used to re-time tracks before resampling
REFERENCE_SPEED_KT = 210.0
STURN_NET_TOLERANCE_DEG = 30.0


class InvalidTrackError(ValueError):
    pass


class Kind(str, enum.Enum):
    DIRECT = "Direct"
    REROUTED = "Rerouted"


class Detail(str, enum.Enum):
    STURN = "STurn"
    HIPPODROME = "Hippodrome"
    OTHER = "Other"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    rerouted_detail: Optional[Detail] = None

    def __post_init__(self):
        if (self.kind is Kind.REROUTED) != (self.rerouted_detail is not None):
            raise ValueError("rerouted_detail must be set iff kind is Rerouted")

    @property
    def is_rerouted(self) -> bool:
        return self.kind is Kind.REROUTED

    @classmethod
    def direct(cls) -> "Classification":
        return cls(Kind.DIRECT)

    @classmethod
    def rerouted(cls, detail: Detail = Detail.OTHER) -> "Classification":
        return cls(Kind.REROUTED, Detail(detail))

    def token(self) -> str:
        """Compact text form: ``Direct`` or ``Rerouted:<detail>``."""
        if self.kind is Kind.DIRECT:
            return "Direct"
        return f"Rerouted:{self.rerouted_detail.value}"

    @classmethod
    def from_token(cls, token: str) -> "Classification":
        token = token.strip()
        if token == "Direct":
            return cls.direct()
        if token == "Rerouted":
            return cls.rerouted(Detail.OTHER)
        head, _, detail = token.partition(":")
        if head == "Rerouted" and detail:
            return cls.rerouted(Detail(detail))
        raise ValueError(f"unknown classification {token!r}")


DIRECT = Classification.direct()


@dataclass(frozen=True)
class TrackPoint:
    t: float
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise InvalidTrackError(f"bad time {self.t!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidTrackError("non-finite position")
        if math.hypot(self.x, self.y) > CONTAINMENT_RADIUS_NM:
            raise InvalidTrackError(
                f"point ({self.x:.2f}, {self.y:.2f}) outside {CONTAINMENT_RADIUS_NM} NM"
            )


@dataclass(frozen=True, eq=False)
class Track:
    """Time-ordered trajectory of one arrival, stored as parallel arrays."""

    flight_id: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    runway: Optional[str] = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if not (t.ndim == x.ndim == y.ndim == 1 and len(t) == len(x) == len(y)):
            raise InvalidTrackError("t, x, y must be 1-D arrays of equal length")
        if len(t) < 2:
            raise InvalidTrackError(f"track {self.flight_id!r} has fewer than 2 points")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidTrackError("non-finite values in track")
        if np.any(t < 0):
            raise InvalidTrackError("negative timestamps")
        if np.any(np.diff(t) <= 0):
            raise InvalidTrackError(f"track {self.flight_id!r} times not strictly increasing")
        if np.any(np.hypot(x, y) > CONTAINMENT_RADIUS_NM):
            raise InvalidTrackError(f"track {self.flight_id!r} leaves the containment disk")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_points(cls, flight_id, points: Sequence[TrackPoint], runway=None) -> "Track":
        return cls(
            flight_id,
            np.array([p.t for p in points]),
            np.array([p.x for p in points]),
            np.array([p.y for p in points]),
            runway,
        )

    @property
    def points(self) -> list[TrackPoint]:
        return [TrackPoint(float(a), float(b), float(c)) for a, b, c in zip(self.t, self.x, self.y)]

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class ClassifierParams:
    resample_dt: float = 10.0
    excess_path_ratio_threshold: float = 1.3
    net_turn_threshold: float = 150.0
    loop_winding_threshold: float = 540.0
    smoothing_window: int = 5

    def __post_init__(self):
        for name in ("resample_dt", "excess_path_ratio_threshold", "net_turn_threshold",
                     "loop_winding_threshold", "smoothing_window"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.loop_winding_threshold < self.net_turn_threshold:
            raise ValueError("loop_winding_threshold must be >= net_turn_threshold")


@dataclass(frozen=True)
class TrackFeatures:
    excess_ratio: float
    net_turn: float
    total_winding: float


def resample_track(track: Track, dt: float) -> Track:
    """Linearly interpolate ``track`` at ``t0, t0 + dt, ...``.

    The last original point is kept as the final sample even when the
    duration is not a multiple of ``dt``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0, t1 = track.t[0], track.t[-1]
    n = int(math.floor((t1 - t0) / dt + 1e-9))
    times = t0 + dt * np.arange(n + 1)
    if t1 - times[-1] > 1e-9 * max(1.0, dt):
        times = np.append(times, t1)
    else:
        times[-1] = t1
    x = np.interp(times, track.t, track.x)
    y = np.interp(times, track.t, track.y)
    return Track(track.flight_id, times, x, y, track.runway)


def heading_series(track: Track) -> list[tuple[float, float]]:
    """Compass heading (degrees, 0 = north, clockwise) of each displacement.

    Each heading is stamped with the start time of its displacement.
    Zero-length displacements are skipped.
    """
    dx = np.diff(track.x)
    dy = np.diff(track.y)
    keep = np.hypot(dx, dy) > 1e-12
    hdg = np.degrees(np.arctan2(dx[keep], dy[keep])) % 360.0
    return list(zip(track.t[:-1][keep].tolist(), hdg.tolist()))


def _wrapped_deltas(headings: np.ndarray) -> np.ndarray:
    # smallest signed angle in (-180, 180]
    d = np.diff(headings) % 360.0
    return np.where(d > 180.0, d - 360.0, d)


def cumulative_turn(headings) -> tuple[float, float]:
    """Return ``(net_turn, total_winding)`` in degrees.

    ``headings`` is a sequence of headings in degrees, or of
    ``(t, heading)`` pairs as produced by :func:`heading_series`. Positive
    turns are clockwise (right turns).
    """
    h = _as_heading_array(headings)
    if len(h) < 2:
        raise ValueError("need at least 2 heading samples")
    d = _wrapped_deltas(h)
    return float(d.sum()), float(np.abs(d).sum())


def _as_heading_array(headings) -> np.ndarray:
    h = np.asarray(headings, dtype=float)
    if h.ndim == 2:
        h = h[:, 1]
    return h


def excess_path_ratio(track: Track) -> float:
    length = float(np.hypot(np.diff(track.x), np.diff(track.y)).sum())
    chord = math.hypot(track.x[-1] - track.x[0], track.y[-1] - track.y[0])
    return max(1.0, length / max(chord, ENDPOINT_FLOOR_NM))


def _moving_average(a: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average; the window shrinks near the ends."""
    if window <= 1 or len(a) < 2:
        return a
    kernel = np.ones(window)
    num = np.convolve(a, kernel, mode="full")
    den = np.convolve(np.ones(len(a)), kernel, mode="full")
    start = (window - 1) // 2
    return (num / den)[start:start + len(a)]


def _normalized_time(track: Track) -> Track:
    # re-time to a fixed mean ground speed so features depend on geometry only
    seg = np.hypot(np.diff(track.x), np.diff(track.y))
    length = seg.sum()
    if length <= 0:
        raise InvalidTrackError(f"track {track.flight_id!r} has zero length")
    t = track.t - track.t[0]
    t = t * (length / (REFERENCE_SPEED_KT / 3600.0)) / t[-1]
    return Track(track.flight_id, t, track.x, track.y, track.runway)


def track_features(track: Track, params: ClassifierParams = ClassifierParams()) -> TrackFeatures:
    """Path-ratio and turn features of the smoothed track.

    The track is re-timed to a reference speed, resampled every
    ``resample_dt``, smoothed with a ``smoothing_window``-sample moving
    average and thinned to one point per window before headings are taken,
    so radar jitter does not accumulate into the winding sum.
    """
    w = int(params.smoothing_window)
    timed = _normalized_time(track)
    if len(timed) > w:
        timed = Track(track.flight_id, timed.t, _moving_average(timed.x, w), _moving_average(timed.y, w))
    rs = resample_track(timed, params.resample_dt)
    sx, sy = _moving_average(rs.x, w), _moving_average(rs.y, w)
    n_keep = max(2, int(round((len(sx) - 1) / w)) + 1)
    keep = np.unique(np.round(np.linspace(0, len(sx) - 1, n_keep)).astype(int))
    smooth = Track(track.flight_id, rs.t[keep], sx[keep], sy[keep])
    ratio = excess_path_ratio(smooth)
    hdg = heading_series(smooth)
    if len(hdg) < 2:
        return TrackFeatures(ratio, 0.0, 0.0)
    net, winding = cumulative_turn(hdg)
    return TrackFeatures(ratio, net, winding)


def classify_features(f: TrackFeatures, params: ClassifierParams = ClassifierParams()) -> Classification:
    turned = f.total_winding > params.net_turn_threshold
    if not (turned or f.excess_ratio > params.excess_path_ratio_threshold):
        return DIRECT
    if f.total_winding >= params.loop_winding_threshold:
        return Classification.rerouted(Detail.HIPPODROME)
    if turned and abs(f.net_turn) <= STURN_NET_TOLERANCE_DEG:
        return Classification.rerouted(Detail.STURN)
    return Classification.rerouted(Detail.OTHER)


def classify_track(track: Track, params: ClassifierParams = ClassifierParams()) -> Classification:
    return classify_features(track_features(track, params), params)
