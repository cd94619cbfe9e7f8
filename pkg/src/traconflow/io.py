"""CSV, config and manifest formats.

Floats are written with ``repr`` so every file re-parses to the values it
was written from. Integral times are written without a decimal point.
"""
from __future__ import annotations

import csv
import math
import shlex
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .admission import CapConfig, DelayReport
from .flow import FlightRecord, OccupancyProfile, PeriodCounts, ProfileBin, AircraftMetrics
from .geometry import Classification, Detail, Kind, Track, TrackFeatures
from .sim import DemandSequence, RunwaySchedule, SimConfig, SimOutput, runway_label
from .travel_time import TravelTimeDistribution


class FormatError(ValueError):
    """Malformed input file; the message names the file and line."""


class ConfigError(ValueError):
    pass


def _num(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def _write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_rows(path, header: Sequence[str]):
    """Yield ``(line_number, row)`` after checking the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        got = next(r, None)
        if got is None:
            raise FormatError(f"{path}: empty file, expected header {','.join(header)}")
        if [g.strip() for g in got] != list(header):
            raise FormatError(f"{path}:1: expected header {','.join(header)}, got {','.join(got)}")
        for row in r:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}:{r.line_num}: expected {len(header)} fields, got {len(row)}")
            yield r.line_num, [c.strip() for c in row]


def _parse(conv, text, path, line, name):
    try:
        v = conv(text)
    except (TypeError, ValueError):
        raise FormatError(f"{path}:{line}: bad {name} {text!r}") from None
    if isinstance(v, float) and not math.isfinite(v):
        raise FormatError(f"{path}:{line}: non-finite {name}")
    return v


def _int(text):
    f = float(text)
    if not f.is_integer():
        raise ValueError(text)
    return int(f)


# --- tracks -----------------------------------------------------------------

TRACK_HEADER = ("flight_id", "t", "x", "y")


def write_tracks(path, tracks: Iterable[Track]) -> None:
    _write_rows(path, TRACK_HEADER, (
        (tr.flight_id, _num(t), repr(float(x)), repr(float(y)))
        for tr in tracks for t, x, y in zip(tr.t, tr.x, tr.y)
    ))


def read_tracks(path) -> list[Track]:
    groups: dict[str, list] = {}
    first_line: dict[str, int] = {}
    last = None
    for line, (fid, t, x, y) in _read_rows(path, TRACK_HEADER):
        if not fid:
            raise FormatError(f"{path}:{line}: empty flight_id")
        pt = (_parse(float, t, path, line, "t"), _parse(float, x, path, line, "x"),
              _parse(float, y, path, line, "y"))
        if fid != last and fid in groups:
            raise FormatError(f"{path}:{line}: rows of flight {fid!r} are not contiguous")
        if fid in groups and pt[0] <= groups[fid][-1][0]:
            raise FormatError(f"{path}:{line}: times of flight {fid!r} not strictly increasing")
        groups.setdefault(fid, []).append(pt)
        first_line.setdefault(fid, line)
        last = fid
    out = []
    for fid, pts in groups.items():
        a = np.array(pts)
        try:
            out.append(Track(fid, a[:, 0], a[:, 1], a[:, 2]))
        except ValueError as e:
            raise FormatError(f"{path}:{first_line[fid]}: {e}") from None
    return out


# --- classifications ----------------------------------------------------------

CLASSIFICATION_HEADER = ("flight_id", "kind", "detail", "excess_ratio", "net_turn", "total_winding")


def write_classifications(path, rows: Iterable[tuple[str, Classification, TrackFeatures]]) -> None:
    _write_rows(path, CLASSIFICATION_HEADER, (
        (fid, c.kind.value, c.rerouted_detail.value if c.rerouted_detail else "",
         repr(f.excess_ratio), repr(f.net_turn), repr(f.total_winding))
        for fid, c, f in rows
    ))


def read_classifications(path) -> list[tuple[str, Classification, TrackFeatures]]:
    out = []
    for line, (fid, kind, detail, ratio, net, wind) in _read_rows(path, CLASSIFICATION_HEADER):
        try:
            c = Classification(Kind(kind), Detail(detail) if detail else None)
        except ValueError as e:
            raise FormatError(f"{path}:{line}: {e}") from None
        f = TrackFeatures(_parse(float, ratio, path, line, "excess_ratio"),
                          _parse(float, net, path, line, "net_turn"),
                          _parse(float, wind, path, line, "total_winding"))
        out.append((fid, c, f))
    return out


LABEL_HEADER = ("flight_id", "kind", "detail")


def write_labels(path, rows: Iterable[tuple[str, Classification]]) -> None:
    _write_rows(path, LABEL_HEADER, (
        (fid, c.kind.value, c.rerouted_detail.value if c.rerouted_detail else "") for fid, c in rows
    ))


def read_labels(path) -> list[tuple[str, Classification]]:
    out = []
    for line, (fid, kind, detail) in _read_rows(path, LABEL_HEADER):
        try:
            out.append((fid, Classification(Kind(kind), Detail(detail) if detail else None)))
        except ValueError as e:
            raise FormatError(f"{path}:{line}: {e}") from None
    return out


# --- flight records -------------------------------------------------------------

RECORD_HEADER = ("flight_id", "entry_t", "landing_t", "runway", "kind")


def write_records(path, records: Iterable[FlightRecord]) -> None:
    _write_rows(path, RECORD_HEADER, (
        (r.flight_id, _num(r.entry_t), _num(r.landing_t), r.runway, r.classification.token())
        for r in records
    ))


def read_records(path) -> list[FlightRecord]:
    out = []
    for line, (fid, entry, landing, runway, kind) in _read_rows(path, RECORD_HEADER):
        e = _parse(float, entry, path, line, "entry_t")
        l = _parse(float, landing, path, line, "landing_t")
        if not l > e:
            raise FormatError(f"{path}:{line}: flight {fid}: landing_t {landing} <= entry_t {entry}")
        c = _parse(Classification.from_token, kind, path, line, "kind")
        out.append(FlightRecord(fid, e, l, runway, c))
    return out


# --- analysis outputs ---------------------------------------------------------------

def _dataclass_writer(cls):
    names = [f.name for f in fields(cls)]

    def write(path, items):
        _write_rows(path, names, ([_num(getattr(it, n)) if isinstance(getattr(it, n), (int, float))
                                   and not isinstance(getattr(it, n), bool) else getattr(it, n)
                                   for n in names] for it in items))
    return write


def _dataclass_reader(cls, types):
    names = [f.name for f in fields(cls)]

    def read(path):
        return [cls(*(_parse(conv, v, path, line, n) for conv, v, n in zip(types, row, names)))
                for line, row in _read_rows(path, names)]
    return read


write_periods = _dataclass_writer(PeriodCounts)
read_periods = _dataclass_reader(PeriodCounts, [_int] * 6)
write_metrics = _dataclass_writer(AircraftMetrics)
read_metrics = _dataclass_reader(AircraftMetrics, [str, _int, float, float, _int, _int])
_write_bins = _dataclass_writer(ProfileBin)
_read_bins = _dataclass_reader(ProfileBin, [_int, _int, _int] + [float] * 5)


def write_profile(path, profile: OccupancyProfile) -> None:
    _write_bins(path, profile.bins)


def read_profile(path) -> OccupancyProfile:
    return OccupancyProfile(tuple(_read_bins(path)))


# --- travel-time distribution -----------------------------------------------------

DISTRIBUTION_HEADER = ("slots", "probability")


def write_distribution(path, dist: TravelTimeDistribution) -> None:
    _write_rows(path, DISTRIBUTION_HEADER,
                ((int(s), repr(float(p))) for s, p in zip(dist.slots, dist.probabilities)))


def read_distribution(path) -> TravelTimeDistribution:
    slots, probs = [], []
    for line, (s, p) in _read_rows(path, DISTRIBUTION_HEADER):
        slots.append(_parse(_int, s, path, line, "slots"))
        probs.append(_parse(float, p, path, line, "probability"))
    if any(b <= a for a, b in zip(slots, slots[1:])):
        raise FormatError(f"{path}: rows must be sorted by slots without repeats")
    try:
        return TravelTimeDistribution(np.array(slots, dtype=np.int64), np.array(probs))
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from None


# --- demand and schedule ------------------------------------------------------------

DEMAND_HEADER = ("slot", "entries")
SCHEDULE_HEADER = ("runway", "open_from_slot", "open_to_slot")


def write_demand(path, demand: DemandSequence) -> None:
    _write_rows(path, DEMAND_HEADER, sorted(demand.entries.items()))


def read_demand(path, horizon: Optional[int] = None) -> DemandSequence:
    entries: dict[int, int] = {}
    for line, (s, k) in _read_rows(path, DEMAND_HEADER):
        slot = _parse(_int, s, path, line, "slot")
        n = _parse(_int, k, path, line, "entries")
        if slot < 0 or n < 0:
            raise FormatError(f"{path}:{line}: slot and entries must be >= 0")
        if horizon is not None and slot >= horizon:
            raise FormatError(f"{path}:{line}: slot {slot} beyond horizon {horizon}")
        entries[slot] = entries.get(slot, 0) + n
    return DemandSequence.from_mapping(entries, horizon)


def _runway_index(label: str) -> int:
    if len(label) < 2 or label[0] != "R" or not label[1:].isdigit() or int(label[1:]) < 1:
        raise ValueError(label)
    return int(label[1:]) - 1


def write_schedule(path, schedule: RunwaySchedule) -> None:
    _write_rows(path, SCHEDULE_HEADER, (
        (runway_label(r), a, b) for r, ivs in enumerate(schedule.intervals) for a, b in ivs
    ))


def read_schedule(path, n_runways: int = 2) -> RunwaySchedule:
    ivs: list[list[tuple[int, int]]] = [[] for _ in range(n_runways)]
    for line, (rw, a, b) in _read_rows(path, SCHEDULE_HEADER):
        r = _parse(_runway_index, rw, path, line, "runway")
        if r >= n_runways:
            raise FormatError(f"{path}:{line}: runway {rw} but only {n_runways} configured")
        ivs[r].append((_parse(_int, a, path, line, "open_from_slot"),
                       _parse(_int, b, path, line, "open_to_slot")))
    try:
        return RunwaySchedule(tuple(tuple(v) for v in ivs))
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from None


# --- simulator output ----------------------------------------------------------------

PLANE_HEADER = ("plane_id", "arrival_slot", "entry_slot", "nominal_slots", "nominal_landing_slot",
                "actual_landing_slot", "runway", "waiting_slots", "rerouting_slots")


def _slot_header(n_runways: int) -> tuple[str, ...]:
    return ("slot", "n_in_tracon", "n_rerouted", "n_waiting") + tuple(
        f"{runway_label(r)}_occupied" for r in range(n_runways))


def write_sim_output(plane_path, slot_path, out: SimOutput) -> None:
    cols = [out.plane_id, out.arrival_slot, out.entry_slot, out.nominal_slots,
            out.nominal_landing_slot, out.actual_landing_slot, out.runway,
            out.waiting_slots, out.rerouting_slots]
    rows = []
    for v in zip(*(c.tolist() for c in cols)):
        v = list(v)
        v[6] = runway_label(v[6]) if v[6] >= 0 else ""
        rows.append(v)
    _write_rows(plane_path, PLANE_HEADER, rows)
    occ = out.runway_occupied().astype(np.int64)
    per_slot = np.column_stack([np.arange(out.config.horizon_slots), out.n_in_tracon,
                                out.n_rerouted, out.n_waiting, occ.T])
    _write_rows(slot_path, _slot_header(out.config.n_runways), per_slot.tolist())


def read_sim_output(plane_path, slot_path, seed: int = 0) -> SimOutput:
    planes = []
    for line, row in _read_rows(plane_path, PLANE_HEADER):
        v = [_parse(_int, c, plane_path, line, n) if n != "runway" else c
             for c, n in zip(row, PLANE_HEADER)]
        v[6] = _parse(_runway_index, v[6], plane_path, line, "runway") if v[6] else -1
        if v[0] != len(planes):
            raise FormatError(f"{plane_path}:{line}: plane ids must run 0, 1, 2, ...")
        planes.append(v)
    with open(slot_path, newline="", encoding="utf-8") as fh:
        head = next(csv.reader(fh), [])
    n_runways = sum(h.endswith("_occupied") for h in head)
    slots = [[_parse(_int, c, slot_path, line, "value") for c in row]
             for line, row in _read_rows(slot_path, _slot_header(n_runways))]
    p = np.array(planes, dtype=np.int64).reshape(-1, len(PLANE_HEADER))
    s = np.array(slots, dtype=np.int64).reshape(-1, 4 + n_runways)
    cfg = SimConfig(horizon_slots=len(s), seed=seed, n_runways=n_runways)
    return SimOutput(cfg, p[:, 1], p[:, 2], p[:, 3], p[:, 5], p[:, 6], s[:, 1], s[:, 2], s[:, 3])


# --- sweep ----------------------------------------------------------------------------

SWEEP_HEADER = ("cap", "mean_waiting_s", "mean_rerouting_s", "percent_delayed", "n_planes", "n_unlanded")


@dataclass(frozen=True)
class SweepRow:
    cap: CapConfig
    mean_waiting_s: float
    mean_rerouting_s: float
    percent_delayed: float
    n_planes: int
    n_unlanded: int

    @classmethod
    def from_report(cls, cap: CapConfig, rep: DelayReport) -> "SweepRow":
        return cls(cap, rep.mean_waiting_s, rep.mean_rerouting_s, rep.percent_delayed,
                   rep.n_planes, rep.n_unlanded)


def write_sweep(path, rows: Iterable[SweepRow]) -> None:
    _write_rows(path, SWEEP_HEADER, (
        (str(r.cap), repr(r.mean_waiting_s), repr(r.mean_rerouting_s), repr(r.percent_delayed),
         r.n_planes, r.n_unlanded) for r in rows
    ))


def read_sweep(path) -> list[SweepRow]:
    return [
        SweepRow(_parse(CapConfig.parse, c, path, line, "cap"),
                 _parse(float, w, path, line, "mean_waiting_s"),
                 _parse(float, r, path, line, "mean_rerouting_s"),
                 _parse(float, p, path, line, "percent_delayed"),
                 _parse(_int, n, path, line, "n_planes"), _parse(_int, u, path, line, "n_unlanded"))
        for line, (c, w, r, p, n, u) in _read_rows(path, SWEEP_HEADER)
    ]


# --- key=value files -------------------------------------------------------------------

def read_key_values(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for i, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ConfigError(f"{path}:{i}: expected key=value")
            if key in out:
                raise ConfigError(f"{path}:{i}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


def write_key_values(path, items: Iterable[tuple[str, object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in items:
            text = str(v)
            if "\n" in text:
                raise ValueError(f"value of {k!r} spans lines")
            fh.write(f"{k}={text}\n")


_CONFIG_KEYS = {"horizon_slots", "seed", "distribution_file", "demand_file", "schedule_file", "n_runways"}
_REQUIRED_KEYS = _CONFIG_KEYS - {"n_runways"}


@dataclass(frozen=True)
class ScenarioConfig:
    """A scenario config file; file paths are resolved against its directory."""

    horizon_slots: int
    seed: int
    distribution_file: Path
    demand_file: Path
    schedule_file: Path
    n_runways: int = 2

    def sim_config(self, seed: Optional[int] = None) -> SimConfig:
        return SimConfig(self.horizon_slots, self.seed if seed is None else seed,
                         n_runways=self.n_runways)

    def load(self):
        """Read the referenced files: ``(distribution, demand, schedule)``."""
        for p in (self.distribution_file, self.demand_file, self.schedule_file):
            if not p.is_file():
                raise ConfigError(f"referenced file not found: {p}")
        dist = read_distribution(self.distribution_file)
        demand = read_demand(self.demand_file)
        if demand.entries and max(demand.entries) >= self.horizon_slots:
            raise ConfigError(f"{self.demand_file}: demand slot {max(demand.entries)} "
                              f"beyond horizon_slots={self.horizon_slots}")
        schedule = read_schedule(self.schedule_file, self.n_runways)
        for r, ivs in enumerate(schedule.intervals):
            if ivs and ivs[-1][1] > self.horizon_slots:
                raise ConfigError(f"{self.schedule_file}: runway {runway_label(r)} open until "
                                  f"slot {ivs[-1][1]}, beyond horizon_slots={self.horizon_slots}")
        return dist, DemandSequence(demand.padded(self.horizon_slots)), schedule


def read_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    kv = read_key_values(path)
    unknown = sorted(set(kv) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown key {unknown[0]!r}")
    missing = sorted(_REQUIRED_KEYS - set(kv))
    if missing:
        raise ConfigError(f"{path}: missing key {missing[0]!r}")
    ints = {}
    for k in ("horizon_slots", "seed", "n_runways"):
        if k in kv:
            try:
                ints[k] = int(kv[k])
            except ValueError:
                raise ConfigError(f"{path}: {k} must be an integer, got {kv[k]!r}") from None
    if ints["horizon_slots"] < 1 or ints.get("n_runways", 2) < 1:
        raise ConfigError(f"{path}: horizon_slots and n_runways must be >= 1")
    base = path.parent
    return ScenarioConfig(ints["horizon_slots"], ints["seed"],
                          base / kv["distribution_file"], base / kv["demand_file"],
                          base / kv["schedule_file"], ints.get("n_runways", 2))


def write_config(path, horizon_slots: int, seed: int, distribution_file: str, demand_file: str,
                 schedule_file: str, n_runways: int = 2) -> None:
    write_key_values(path, [
        ("horizon_slots", horizon_slots), ("seed", seed), ("n_runways", n_runways),
        ("distribution_file", distribution_file), ("demand_file", demand_file),
        ("schedule_file", schedule_file),
    ])


# --- run manifest -------------------------------------------------------------------------

@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    argv: tuple[str, ...]
    cwd: str
    seed: Optional[int]
    version: str
    inputs: tuple[tuple[str, str], ...] = ()
    params: tuple[tuple[str, str], ...] = ()
    outputs: tuple[tuple[str, str], ...] = ()

    def write(self, path) -> None:
        items = [("subcommand", self.subcommand), ("argv", shlex.join(self.argv)),
                 ("cwd", self.cwd), ("seed", "" if self.seed is None else self.seed),
                 ("version", self.version)]
        items += [(f"input.{k}", v) for k, v in self.inputs]
        items += [(f"param.{k}", v) for k, v in self.params]
        items += [(f"output.{k}", v) for k, v in self.outputs]
        write_key_values(path, items)

    @classmethod
    def read(cls, path) -> "RunManifest":
        kv = read_key_values(path)
        for k in ("subcommand", "argv", "cwd", "version"):
            if k not in kv:
                raise ConfigError(f"{path}: manifest lacks {k!r}")

        def group(prefix):
            return tuple((k[len(prefix):], v) for k, v in kv.items() if k.startswith(prefix))

        seed = kv.get("seed", "")
        return cls(kv["subcommand"], tuple(shlex.split(kv["argv"])), kv["cwd"],
                   int(seed) if seed else None, kv["version"],
                   group("input."), group("param."), group("output."))
