import math

import numpy as np
import pytest

from paracyl import analysis, germ, regions, rotation
from paracyl.errors import DomainError, SamplingError
from paracyl.germ import ChartPoint

ROT = rotation.golden_mean()
MODEL = germ.model_family(ROT)


def test_equidistribution_golden_orbit():
    n = np.arange(1, 10**4 + 1)
    angles = (4 * np.pi * ROT.phi * n) % (2 * np.pi)
    assert analysis.equidistribution(angles) < 0.01


def test_equidistribution_constant_sequence():
    angles = np.full(10**4, 1.0)
    d = analysis.equidistribution(angles, n_bins=1000)
    # everything lands in a single bin at frac 1/(2*pi) ~ 0.159
    assert d == pytest.approx(1.0 - (math.floor(1000 / (2 * np.pi)) + 1) / 1000,
                              abs=1e-9)


def test_equidistribution_uniform_grid():
    k = 10**4
    angles = 2 * np.pi * np.arange(k) / k
    assert analysis.equidistribution(angles) < 1.0 / 1000 + 1.0 / k + 1e-9


def test_equidistribution_needs_enough_angles():
    with pytest.raises(DomainError):
        analysis.equidistribution(np.zeros(100))


def test_verify_asymptotics_model():
    diag = analysis.verify_asymptotics(MODEL, (1.0, 0.1), N=10**4)
    assert diag.ratio_ok
    assert abs(diag.ratio_final - 1.0) < 0.05
    # on the exact model |x_n| is constant, so the tail band collapses
    assert diag.band_x[1] - diag.band_x[0] < 1e-9
    with pytest.raises(DomainError):
        analysis.verify_asymptotics(MODEL, (1.0, 0.1), N=10)


def test_limit_circle_model_radius():
    rep = analysis.limit_circle(MODEL, (0.5, 0.1), N=10**4, tau_tol=1e-8)
    assert abs(rep.radius_hat - 0.5) < 1e-9
    assert abs(rep.product - 1.0) < 5e-2
    assert rep.discrepancy < 0.05
    with pytest.raises(DomainError):
        analysis.limit_circle(MODEL, (0.5, 0.1), N=100)


def test_invariance_suite_sizes_and_thresholds():
    params = regions.BasinParams(r=0.05, theta=0.4, beta=0.3)
    rep0 = analysis.invariance_suite(MODEL, params, n_samples=0, seed=1)
    assert rep0.n_samples == 0 and rep0.one_step_failures == []
    rep = analysis.invariance_suite(
        MODEL, params, n_samples=50, seed=1, threshold=1e-12
    )
    assert rep.one_step_ok
    assert not rep.attraction_ok  # threshold far below achievable norm


def test_invariance_suite_empty_region():
    bad = regions.BasinParams(r=100.0, theta=0.4, beta=0.3)
    with pytest.raises(SamplingError):
        analysis.invariance_suite(MODEL, bad, n_samples=10, seed=1)


def test_stable_set_probe_labels():
    params = regions.BasinParams(r=0.5, theta=0.4, beta=0.3)
    inside = analysis.stable_set_probe(
        MODEL, ChartPoint("down", 0.1, 0.1), N=10**3, params=params
    )
    assert inside.label == "enters_basin"
    assert inside.entry_time == 0

    curve = analysis.stable_set_probe(
        MODEL, ChartPoint("up", 1.0, 0.0), N=10**3, params=params
    )
    assert curve.label == "rotation_on_curve"

    origin = analysis.stable_set_probe(
        MODEL, ChartPoint("up", 0.0, 0.0), N=10**3, params=params
    )
    assert origin.label == "converges_to_fixed_point_only"

    far = analysis.stable_set_probe(
        MODEL, ChartPoint("down", 5.0, 5.0), N=10**3, params=params
    )
    assert far.label in {"escaping", "chart_exit", "non_convergent"}


def test_rotation_freedom_model():
    rep = analysis.rotation_freedom(MODEL, (1.0, 0.1), N=10**4, modulus=7)
    assert len(rep["subsequence_values"]) == 7
    assert rep["max_pairwise_deviation"] < 1e-3
