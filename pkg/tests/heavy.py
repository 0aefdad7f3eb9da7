"""Expensive computations shared by several test modules.

Each function is cached for the lifetime of the test session and records its
own wall time, so criteria that reuse a result still report the cost of
producing it.
"""

from __future__ import annotations

import functools
import tempfile
import time
from pathlib import Path

from mvlb import eigen
from mvlb.experiments import (
    ExperimentConfig,
    _pair_for,
    run_case1_scaling,
    run_case2_scaling,
    run_l_sweep,
)
from mvlb.oseen import OseenParams
from mvlb.spectral import Grid
from mvlb.steady import VortexSpec, single_vortex_state

AMPLITUDE = 150.0
_TMP = Path(tempfile.mkdtemp(prefix="mvlb-tests-"))


def _timed(fn):
    @functools.cache
    def wrapper(*args):
        t0 = time.perf_counter()
        out = fn(*args)
        return out, time.perf_counter() - t0

    return wrapper


@_timed
def small_pair():
    """Unstable eigen-triple of one vortex (a = 150) at the centre of a 64^2 box with d = 8."""
    state = single_vortex_state(Grid(64, 8.0), VortexSpec(amplitude=AMPLITUDE, center=(4.0, 4.0)))
    params = OseenParams(state.velocity, 1.0)
    rep = eigen.leading_spectrum(eigen.EigenRequest(params, how_many=4, tol=1e-9))
    top = rep.pairs[0]
    pair = eigen.adjoint_pair(top.lam, top.vec, params, center=(4.0, 4.0))
    return state, params, rep, pair


@_timed
def amplitude_search():
    """Smallest safely unstable ring amplitude on a 256^2 grid with d = 16 r0."""
    return eigen.find_unstable_vortex("counter-rotating-ring", 1.0, Grid(256, 16.0), (80.0, 200.0))


@_timed
def isolated_pair_d32():
    """Eigen-triple of one vortex at the centre of a 512^2 box with d = 32 r0."""
    cfg = ExperimentConfig(case="lsweep", plan=["1:8:512:32"], a=AMPLITUDE)
    return _pair_for(cfg, AMPLITUDE, Grid(512, 32.0), 0)


INDEX_PLAN = [
    "1:4:128:8", "2:4:128:8", "4:4:128:8",
    "1:8:256:16", "2:8:256:16", "4:8:256:16",
]


@_timed
def index_sweep():
    """One, two and four vortices in a box of side 2L for L = 4 and 8."""
    cfg = ExperimentConfig(case="lsweep", plan=INDEX_PLAN, a=AMPLITUDE, output_dir=str(_TMP / "index"))
    return run_l_sweep(cfg)


@_timed
def case2_study():
    cfg = ExperimentConfig(case="ekman-II", plan=["1:8", "2:8", "4:8", "8:8"], a=AMPLITUDE, mu=1.0,
                           output_dir=str(_TMP / "case2"))
    return run_case2_scaling(cfg)


@_timed
def case1_study():
    cfg = ExperimentConfig(case="torus-proxy-I", plan=["1:8", "4:8", "9:8"], a=AMPLITUDE,
                           output_dir=str(_TMP / "case1"))
    return run_case1_scaling(cfg)


def small_config(case: str, run: int) -> ExperimentConfig:
    """Cheap study at reduced core resolution, for bookkeeping checks."""
    plans = {
        "torus-proxy-I": ["1:8", "4:8"],
        "ekman-II": ["1:8", "2:8"],
        "lsweep": ["4:8:128:16"],
    }
    return ExperimentConfig(case=case, plan=plans[case], a=AMPLITUDE, mu=1.0 if case == "ekman-II" else 0.0,
                            points_per_r0=8, output_dir=str(_TMP / f"small-{case}-{run}"))


@_timed
def small_study(case: str, run: int = 0):
    cfg = small_config(case, run)
    runner = {"torus-proxy-I": run_case1_scaling, "ekman-II": run_case2_scaling, "lsweep": run_l_sweep}[case]
    return runner(cfg)


def tmp_root() -> Path:
    return _TMP
