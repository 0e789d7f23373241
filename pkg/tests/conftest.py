import time
from types import SimpleNamespace

import numpy as np
import pytest

from ris_mcrb.channel import model_pair, realify, sample_loads
from ris_mcrb.experiments import (
    DEFAULT_SIZES,
    DEFAULT_SPACING_GRID,
    SweepRequest,
    run_bias_vs_spacing,
    run_crlb_vs_spacing,
)
from ris_mcrb.impedance import build_impedance_set
from ris_mcrb.scenario import scenario_from_config


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture(scope="session")
def default_scenario_s():
    return scenario_from_config({})


@pytest.fixture
def model_factory():
    """Random mismatched/true realified model pairs of modest size."""

    def make(seed=0, g=12, n=3, mismatch=0.3):
        rng = np.random.default_rng(seed)
        b_true = crandn(rng, (g, n))
        b_est = b_true + mismatch * crandn(rng, (g, n))
        d_true = realify(b_true, includes_mutual_coupling=True)
        d_est = realify(b_est, includes_mutual_coupling=False)
        x_true = rng.standard_normal(2 * n)
        return d_est, d_true, x_true

    return make


def build_point(scenario):
    impedances = build_impedance_set(
        scenario.tx, scenario.rx, scenario.ris_radiators(), scenario.constants
    )
    loads = sample_loads(scenario)
    d_true, d_est, x_true = model_pair(impedances, loads)
    return SimpleNamespace(
        scenario=scenario,
        impedances=impedances,
        loads=loads,
        d_true=d_true,
        d_est=d_est,
        x_true=x_true,
    )


@pytest.fixture(scope="session")
def point_002():
    """Default 4x4 setup at the tight 0.02-wavelength spacing."""
    return build_point(scenario_from_config({"ris_spacing_over_lambda": 0.02}))


@pytest.fixture(scope="session")
def bias_sweep(default_scenario_s):
    request = SweepRequest(
        kind="bias_vs_spacing",
        scenario=default_scenario_s,
        spacing_grid=list(DEFAULT_SPACING_GRID),
        sizes=list(DEFAULT_SIZES),
    )
    started = time.perf_counter()
    result = run_bias_vs_spacing(request)
    return result, time.perf_counter() - started


@pytest.fixture(scope="session")
def crlb_sweep(default_scenario_s):
    request = SweepRequest(
        kind="crlb_vs_spacing",
        scenario=default_scenario_s,
        power_grid=[40.0],
        spacing_grid=list(DEFAULT_SPACING_GRID),
        sizes=list(DEFAULT_SIZES),
    )
    started = time.perf_counter()
    result = run_crlb_vs_spacing(request)
    return result, time.perf_counter() - started
