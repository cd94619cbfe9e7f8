import os
import subprocess
import sys

import numpy as np
import pytest

from helpers import random_instance
from traconflow.sim import _engine, core
from traconflow.synthetic import gen_scenario
from traconflow.travel_time import sample_many

ckernel = pytest.importorskip("traconflow.sim._ckernel")


def both(cfg, demand, sched, dist, cap):
    H = cfg.horizon_slots
    args = (H, cfg.n_runways, cfg.lockout_slots, demand.padded(H),
            sample_many(dist, np.random.default_rng(cfg.seed), demand.total),
            sched.open_mask(cfg.n_runways, H), -1 if cap is None else cap)
    return ckernel.run_kernel(*args), _engine.run_engine(*args)


def test_backends_agree_small():
    rng = np.random.default_rng(23)
    for _ in range(500):
        a, b = both(*random_instance(rng, 200, 40))
        assert a.keys() == b.keys()
        for k in a:
            assert np.array_equal(a[k], b[k]), k


@pytest.mark.parametrize("name", ["saturated_one_runway", "fog_day_runway_closure", "two_runway_peak"])
@pytest.mark.parametrize("cap", [None, 9])
def test_backends_agree_presets(name, cap):
    sc = gen_scenario(name, np.random.default_rng(2), days=1, seed=2)
    a, b = both(sc.config, sc.demand, sc.schedule, sc.distribution, cap)
    for k in a:
        assert np.array_equal(a[k], b[k]), k


def test_compiled_backend_selected():
    assert core.BACKEND == "cython"


def test_pure_python_override():
    env = dict(os.environ, TRACONFLOW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from traconflow.sim import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernel.py")
    out = subprocess.run([sys.executable, script, "--days", "1", "--repeat", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert out.count("x\n") == 8
