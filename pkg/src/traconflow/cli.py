"""Command-line front end: ``traconflow <subcommand> ...``."""
from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from collections import Counter
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import io as tio
from . import svg
from .admission import CapConfig, run_capped, sweep_caps
from .flow import AnalysisParams, aircraft_based_metrics, occupancy_profile, time_based_counts
from .geometry import ClassifierParams, Kind, classify_features, track_features
from .sim import to_flight_records
from .synthetic import PRESETS, TrackKind, gen_scenario, gen_track_corpus
from .travel_time import fit_from_direct_tracks, mean_slots

log = logging.getLogger("traconflow")


class _Run:
    """Collects the inputs, parameters and outputs of one invocation."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = tuple(argv)
        self.out_dir = Path(args.out_dir)
        self.inputs: list[tuple[str, str]] = []
        self.params: list[tuple[str, str]] = []
        self.outputs: list[tuple[str, str]] = []
        self.seed: Optional[int] = None

    @property
    def svg(self) -> bool:
        return self.args.format == "csv+svg"

    def input(self, name, path) -> Path:
        p = Path(path)
        if not p.is_file():
            raise tio.ConfigError(f"input file not found: {p}")
        self.inputs.append((name, str(p.resolve())))
        return p

    def param(self, name, value):
        self.params.append((name, str(value)))
        return value

    def output(self, name) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        p = self.out_dir / name
        self.outputs.append((name, str(p)))
        return p

    def write_text(self, name, text: str):
        with open(self.output(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def finish(self):
        m = tio.RunManifest(self.args.command, self.argv, os.getcwd(), self.seed, __version__,
                            tuple(self.inputs), tuple(self.params), tuple(self.outputs))
        path = self.output(f"manifest_{self.args.command}.txt")
        m.write(path)


# --- subcommands ---------------------------------------------------------------

def cmd_classify(run: _Run) -> int:
    a = run.args
    params = ClassifierParams(
        run.param("resample_dt", a.resample_dt), run.param("excess_path_ratio_threshold", a.ratio),
        run.param("net_turn_threshold", a.turn), run.param("loop_winding_threshold", a.loop),
        run.param("smoothing_window", a.window))
    tracks = tio.read_tracks(run.input("tracks", a.tracks))
    rows = []
    for tr in tracks:
        f = track_features(tr, params)
        rows.append((tr.flight_id, classify_features(f, params), f))
    tio.write_classifications(run.output("classifications.csv"), rows)
    n_direct = sum(c.kind is Kind.DIRECT for _, c, _ in rows)
    details = Counter(c.rerouted_detail.value for _, c, _ in rows if c.is_rerouted)
    print(f"direct={n_direct} rerouted={len(rows) - n_direct} "
          f"sturn={details['STurn']} hippodrome={details['Hippodrome']} other={details['Other']}")
    return 0


def _analysis_params(run: _Run) -> AnalysisParams:
    a = run.args
    return AnalysisParams(run.param("T", a.window_s), run.param("period", a.period_s),
                          run.param("one_runway_share", a.share))


def cmd_analyze(run: _Run) -> int:
    params = _analysis_params(run)
    records = tio.read_records(run.input("records", run.args.records))
    # canonical order, so outputs do not depend on row order
    records.sort(key=lambda r: (r.entry_t, r.landing_t, r.flight_id))
    periods = time_based_counts(records, params)
    metrics = sorted(aircraft_based_metrics(records, params), key=lambda m: m.flight_id)
    profile = occupancy_profile(metrics)
    tio.write_periods(run.output("periods.csv"), periods)
    tio.write_metrics(run.output("aircraft.csv"), metrics)
    tio.write_profile(run.output("occupancy.csv"), profile)
    if run.svg:
        run.write_text("periods.svg", svg.period_chart(periods))
    print(f"flights={len(records)} periods={len(periods)} occupancy_bins={len(profile)}")
    return 0


def cmd_calibrate(run: _Run) -> int:
    records = tio.read_records(run.input("records", run.args.records))
    records.sort(key=lambda r: (r.entry_t, r.landing_t, r.flight_id))
    dist = fit_from_direct_tracks(records)
    tio.write_distribution(run.output("distribution.csv"), dist)
    m = mean_slots(dist)
    print(f"support={len(dist.slots)} mean_slots={m:.3f} mean_minutes={m * 0.5:.2f}")
    return 0


def _load_scenario(run: _Run):
    cfg = tio.read_config(run.input("config", run.args.config))
    for name, p in (("distribution", cfg.distribution_file), ("demand", cfg.demand_file),
                    ("schedule", cfg.schedule_file)):
        run.input(name, p)
    dist, demand, schedule = cfg.load()
    sim_cfg = cfg.sim_config(run.args.seed)
    run.seed = sim_cfg.seed
    run.param("horizon_slots", sim_cfg.horizon_slots)
    run.param("n_runways", sim_cfg.n_runways)
    return sim_cfg, demand, schedule, dist


def cmd_simulate(run: _Run) -> int:
    config, demand, schedule, dist = _load_scenario(run)
    cap = run.param("cap", run.args.cap)
    out, rep = run_capped(config, cap, demand, schedule, dist)
    tio.write_sim_output(run.output("planes.csv"), run.output("slots.csv"), out)
    tio.write_records(run.output("records.csv"), to_flight_records(out))
    print(f"planes={rep.n_planes} unlanded={rep.n_unlanded} "
          f"mean_waiting_s={rep.mean_waiting_s:.1f} mean_rerouting_s={rep.mean_rerouting_s:.1f} "
          f"percent_delayed={rep.percent_delayed:.1f}")
    return 0


def cmd_sweep(run: _Run) -> int:
    config, demand, schedule, dist = _load_scenario(run)
    caps = run.args.caps
    run.param("caps", ",".join(str(c) for c in caps))
    table = sweep_caps(config, caps, demand, schedule, dist)
    rows = [tio.SweepRow.from_report(c, r) for c, r in table.items()]
    tio.write_sweep(run.output("sweep.csv"), rows)
    if run.svg:
        run.write_text("sweep.svg", svg.sweep_chart(rows))
    for r in rows:
        print(f"cap={r.cap} mean_waiting_s={r.mean_waiting_s:.1f} "
              f"mean_rerouting_s={r.mean_rerouting_s:.1f} percent_delayed={r.percent_delayed:.1f}")
    return 0


def cmd_generate(run: _Run) -> int:
    a = run.args
    run.seed = 0 if a.seed is None else a.seed
    rng = np.random.default_rng(run.seed)
    if a.preset:
        sc = gen_scenario(run.param("preset", a.preset), rng, days=run.param("days", a.days),
                          seed=run.seed)
        tio.write_demand(run.output("demand.csv"), sc.demand)
        tio.write_schedule(run.output("schedule.csv"), sc.schedule)
        tio.write_distribution(run.output("distribution.csv"), sc.distribution)
        tio.write_config(run.output("scenario.cfg"), sc.config.horizon_slots, sc.config.seed,
                         "distribution.csv", "demand.csv", "schedule.csv", sc.config.n_runways)
        print(f"preset={a.preset} horizon_slots={sc.config.horizon_slots} planes={sc.demand.total}")
    else:
        kinds = tuple(TrackKind(k) for k in a.kinds.split(",")) if a.kinds else tuple(TrackKind)
        corpus = gen_track_corpus(run.param("tracks", a.tracks), rng,
                                  noise_sd=run.param("noise", a.noise), kinds=kinds)
        run.param("kinds", ",".join(k.value for k in kinds))
        tio.write_tracks(run.output("tracks.csv"), [t for t, _ in corpus])
        tio.write_labels(run.output("truth.csv"), [(t.flight_id, lab) for t, lab in corpus])
        labels = Counter(lab.token() for _, lab in corpus)
        print(" ".join(f"{k}={v}" for k, v in sorted(labels.items())))
    return 0


def cmd_replay(run: _Run) -> int:
    m = tio.RunManifest.read(run.args.manifest)
    if m.subcommand == "replay":
        raise tio.ConfigError("cannot replay a replay")
    argv = list(m.argv)
    if run.args.out_dir_given:
        argv += ["--out-dir", str(Path(run.args.out_dir).resolve())]
    with _chdir(m.cwd):
        return main(argv)


@contextlib.contextmanager
def _chdir(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


# --- argument parsing ------------------------------------------------------------

def _caps_arg(text: str) -> list[CapConfig]:
    caps = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            try:
                caps += [CapConfig(c) for c in range(int(lo), int(hi) + 1)]
            except ValueError as e:
                raise argparse.ArgumentTypeError(str(e)) from None
            continue
        try:
            caps.append(CapConfig.parse(part))
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    if not caps:
        raise argparse.ArgumentTypeError("no caps given")
    return caps


def _cap_arg(text: str) -> CapConfig:
    try:
        return CapConfig.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="random seed (overrides the scenario config seed)")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--format", choices=("csv", "csv+svg"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="traconflow", parents=[common],
                                description="TRACON arrival-flow analysis and simulation.")
    p.add_argument("--version", action="version", version=f"traconflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="classify tracks as direct or rerouted")
    c.add_argument("tracks", help="track CSV (flight_id,t,x,y)")
    d = ClassifierParams()
    c.add_argument("--resample-dt", type=float, default=d.resample_dt)
    c.add_argument("--ratio", type=float, default=d.excess_path_ratio_threshold,
                   help="excess path ratio threshold")
    c.add_argument("--turn", type=float, default=d.net_turn_threshold, help="winding threshold, degrees")
    c.add_argument("--loop", type=float, default=d.loop_winding_threshold,
                   help="hippodrome winding threshold, degrees")
    c.add_argument("--window", type=int, default=d.smoothing_window, help="smoothing window, samples")
    c.set_defaults(func=cmd_classify)

    ap = AnalysisParams()
    a = sub.add_parser("analyze", parents=[common], help="time-based and aircraft-based counts")
    a.add_argument("records", help="flight record CSV")
    a.add_argument("--window-s", type=float, default=ap.T, help="flow window T, seconds")
    a.add_argument("--period-s", type=float, default=ap.period, help="period length, seconds")
    a.add_argument("--share", type=float, default=ap.one_runway_share,
                   help="landing share above which one runway is in use")
    a.set_defaults(func=cmd_analyze)

    k = sub.add_parser("calibrate", parents=[common], help="fit the travel-time law from direct flights")
    k.add_argument("records", help="flight record CSV")
    k.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("simulate", parents=[common], help="run the slot model on a scenario config")
    s.add_argument("config", help="scenario config (key=value)")
    s.add_argument("--cap", type=_cap_arg, default=CapConfig(None),
                   help="maximum planes inside the TRACON, or 'inf'")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[common], help="delay statistics across TRACON caps")
    w.add_argument("config", help="scenario config (key=value)")
    w.add_argument("--caps", type=_caps_arg, default=_caps_arg("6..12,inf"),
                   help="comma-separated caps, ranges like 6..12, or 'inf'")
    w.set_defaults(func=cmd_sweep)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic scenario or track corpus")
    what = g.add_mutually_exclusive_group(required=True)
    what.add_argument("--preset", choices=PRESETS)
    what.add_argument("--tracks", type=_positive_int, help="number of tracks")
    g.add_argument("--days", type=_positive_int, default=1)
    g.add_argument("--noise", type=float, default=0.2, help="position noise sd, NM")
    g.add_argument("--kinds", default=None, help="comma-separated subset of Direct,STurn,Hippodrome")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("replay", parents=[common], help="re-run the invocation recorded in a manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out_dir_given = hasattr(args, "out_dir")
    for name, default in (("seed", None), ("out_dir", "."), ("format", "csv"), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    run = _Run(args, argv)
    try:
        status = args.func(run)
        if args.command != "replay":
            run.finish()
    except (ValueError, OSError) as e:
        print(f"traconflow {args.command}: error: {e}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
