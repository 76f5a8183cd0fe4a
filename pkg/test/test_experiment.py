# encoding: utf-8

from math import cos, radians

import numpy as np
import pytest

from qcheshire.elements import SlideGeometry
from qcheshire.errors import DomainError
from qcheshire.experiment import (ExperimentConfig, Pipeline, SweepCurve, final_state,
                                  mean_probability, phase_grid, postselector, preselect,
                                  run_pipeline, sweep)
from qcheshire.weak import exact_detection_probability, exact_visibility, ideal_pair

T_SLIDE = SlideGeometry().transmission


@pytest.mark.parametrize('phi', np.linspace(0, 2 * np.pi, 13))
def test_ideal_probability(phi):
    assert abs(run_pipeline(ExperimentConfig(), phi) - 0.25) < 1e-12


def test_phase_grid():
    grid = phase_grid(120)
    assert len(grid) == 120
    assert grid[0] == 0.0
    assert grid[60] == pytest.approx(np.pi)
    assert grid[-1] < 2 * np.pi
    with pytest.raises(DomainError):
        phase_grid(0)


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(t1=1.5)
    with pytest.raises(DomainError):
        ExperimentConfig(phase_grid=(0.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        ExperimentConfig(phase_grid=())
    with pytest.raises(DomainError):
        ExperimentConfig(visibility_scale=0)
    with pytest.raises(DomainError):
        ExperimentConfig(actuator_scale=0)


def test_config_replace():
    cfg = ExperimentConfig()
    other = cfg.replace(t2=0.5)
    assert other.t2 == 0.5 and cfg.t2 == 1.0


def test_actuator_position():
    cfg = ExperimentConfig(actuator_offset=1.0, actuator_scale=2.0)
    assert cfg.actuator_position(3.0) == pytest.approx(1.0)


@pytest.mark.parametrize('phi', [0.0, 0.7, np.pi])
@pytest.mark.parametrize('d1,d2', [(0.0, 0.0), (0.02, 0.0), (-0.01, 0.03)])
def test_preselection_matches_closed_form(phi, d1, d2):
    cfg = ExperimentConfig(delta1=d1, delta2=d2)
    pair = ideal_pair(phi, d1, d2)
    assert preselect(cfg, phi) == pair.pre
    assert postselector(cfg) == pair.post
    assert run_pipeline(cfg, phi) == pytest.approx(abs(pair.overlap) ** 2, abs=1e-12)


def random_config(rng):
    return ExperimentConfig(
        t1=rng.uniform(0, 1), t2=rng.uniform(0, 1),
        theta1=rng.uniform(-0.5, 0.5), theta2=rng.uniform(-0.5, 0.5),
        phase_grid=phase_grid(8))


@pytest.mark.parametrize('seed', range(10))
def test_pipeline_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    cfg = random_config(rng)
    for phi in cfg.phase_grid:
        expected = exact_detection_probability(cfg.t1, cfg.t2, cfg.theta1, cfg.theta2, phi)
        assert run_pipeline(cfg, phi) == pytest.approx(expected, abs=1e-12)


def test_final_state_norm_not_increasing():
    cfg = ExperimentConfig(t1=0.6, t2=0.852, theta1=0.2)
    assert final_state(cfg, 0.5).norm2() <= 1 + 1e-12
    assert final_state(cfg, 0.5).norm2() == pytest.approx(0.5 * 0.6 + 0.5 * 0.852)


@pytest.mark.parametrize('arm', [1, 2])
def test_absorber_monotone(arm):
    cfg = ExperimentConfig(theta1=radians(10))
    ts = np.linspace(0, 1, 11)
    values = [mean_probability(cfg.replace(**{'t{}'.format(arm): t})) for t in ts]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize('t2', [1.0, T_SLIDE])
def test_mean_nondecreasing_in_theta1(t2):
    thetas = np.radians(np.linspace(0, 45, 46))
    means = [sweep(ExperimentConfig(theta1=t, t2=t2)).mean for t in thetas]
    assert all(b >= a - 1e-15 for a, b in zip(means, means[1:]))


@pytest.mark.parametrize('arm', [1, 2])
@pytest.mark.parametrize('seed', range(5))
def test_same_arm_rotation_and_absorber(arm, seed):
    rng = np.random.default_rng(seed)
    t, theta, phi = rng.uniform(0.1, 1), rng.uniform(-0.5, 0.5), rng.uniform(0, 2 * np.pi)
    if arm == 1:
        cfg = ExperimentConfig(t1=t, theta1=theta)
        amplitude = 0.5 * (np.exp(1j * phi) - np.sqrt(t) * np.sin(theta))
    else:
        cfg = ExperimentConfig(t2=t, theta2=theta)
        amplitude = 0.5 * np.sqrt(t) * np.cos(theta) * np.exp(1j * phi)
    assert run_pipeline(cfg, phi) == pytest.approx(abs(amplitude) ** 2, abs=1e-12)


def test_filter_arm2_drop():
    base = mean_probability(ExperimentConfig())
    filtered = mean_probability(ExperimentConfig(t2=T_SLIDE))
    assert (base - filtered) / base == pytest.approx(1 - T_SLIDE, abs=1e-12)
    assert round((base - filtered) / base, 3) == 0.148


def test_filter_arm1_no_drop():
    base = mean_probability(ExperimentConfig())
    assert mean_probability(ExperimentConfig(t1=T_SLIDE)) == pytest.approx(base, abs=1e-12)


@pytest.mark.parametrize('theta', [radians(10), radians(20)])
def test_rotation_arm1_fringe(theta):
    curve = sweep(ExperimentConfig(theta1=theta))
    assert curve.visibility == pytest.approx(exact_visibility(theta1=theta), abs=1e-9)
    assert curve.mean == pytest.approx(0.25 * (1 + np.sin(theta) ** 2), abs=1e-12)


@pytest.mark.parametrize('theta', [radians(10), radians(20)])
def test_rotation_arm2_no_fringe(theta):
    curve = sweep(ExperimentConfig(theta2=theta))
    assert curve.visibility <= 1e-9
    assert curve.mean == pytest.approx(0.25 * cos(theta) ** 2, abs=1e-9)


def test_filtered_rotation_fringe():
    curve = sweep(ExperimentConfig(theta1=radians(20), t2=T_SLIDE))
    expected = exact_visibility(t2=T_SLIDE, theta1=radians(20))
    assert curve.visibility == pytest.approx(expected, abs=1e-9)
    assert round(0.72 * curve.visibility, 2) == 0.47


def test_filter_arm1_rotation_arm2():
    ref = sweep(ExperimentConfig(theta2=radians(20)))
    curve = sweep(ExperimentConfig(theta2=radians(20), t1=T_SLIDE))
    assert np.allclose(curve.probabilities, ref.probabilities, atol=1e-12)


def test_sweep_workers_same_order():
    cfg = ExperimentConfig(theta1=0.2, phase_grid=phase_grid(24))
    assert sweep(cfg, workers=4) == sweep(cfg)


def test_mean_probability_is_grid_average():
    cfg = ExperimentConfig(theta1=0.3, t2=0.7)
    assert Pipeline(cfg).mean_probability() == pytest.approx(sweep(cfg).mean, abs=1e-12)


def test_sweep_curve_validation():
    with pytest.raises(DomainError):
        SweepCurve(((0.0, 1.5),))
