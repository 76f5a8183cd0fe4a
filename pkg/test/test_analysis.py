# encoding: utf-8

import logging
from math import radians, sin, sqrt

import numpy as np
import pytest

from qcheshire.analysis import (Estimate, EnsembleSummary, FringeFit, WeakValueReport,
                                ensemble, estimate_pi_weak, estimate_sigma_weak,
                                fit_arrays, fit_fringe, intensity_change_uncertainty,
                                intensity_drop, mean_counts, propagate_delta_uncertainty,
                                protocol_configs, simulate_protocol, visibility_uncertainty,
                                weak_value_report)
from qcheshire.elements import SlideGeometry
from qcheshire.errors import DomainError, FitError, NoSolutionError
from qcheshire.experiment import ExperimentConfig, phase_grid
from qcheshire.montecarlo import CountRecord, JitterModel, SourceModel, simulate_sweep
from qcheshire.weak import exact_visibility

R = SlideGeometry().reflectance
REFERENCE_CFG = ExperimentConfig(visibility_scale=0.72, phase_grid=phase_grid(60))


@pytest.mark.parametrize('A,V,phi0', [
    (2526.0, 0.44, 0.3),
    (1000.0, 0.0001, -2.0),
    (10.0, 0.99, 3.0),
    (2146.0, 0.26, -0.5),
])
def test_fit_recovers_parameters(A, V, phi0):
    phases = np.array(phase_grid(60))
    fit = fit_arrays(phases, A * (1 - V * np.cos(phases - phi0)))
    assert abs(fit.mean_level - A) <= 1e-9 * A
    assert abs(fit.visibility - V) <= 1e-9
    assert abs(fit.phase_offset - phi0) <= 1e-9
    assert fit.residual_rms <= 1e-9 * A


def test_fit_phase_offset_canonical():
    phases = np.array(phase_grid(24))
    fit = fit_arrays(phases, 5 * (1 - 0.5 * np.cos(phases - 2 * np.pi - 1.0)))
    assert fit.phase_offset == pytest.approx(1.0)


def test_fit_needs_points():
    with pytest.raises(FitError):
        fit_arrays([0, 2, 4, 6], [1, 2, 3, 4])


def test_fit_needs_full_period():
    phases = np.linspace(0, np.pi, 10)
    with pytest.raises(FitError):
        fit_arrays(phases, 1 + np.cos(phases))


def test_fit_unknown_method():
    with pytest.raises(DomainError):
        fit_arrays(phase_grid(10), np.ones(10), method='spline')


def test_fit_clips_visibility(caplog):
    phases = np.array(phase_grid(24))
    with caplog.at_level(logging.WARNING):
        fit = fit_arrays(phases, 100 * (1 - 1.2 * np.cos(phases)))
    assert fit.visibility == 1.0
    assert 'clipped' in caplog.text


def test_fit_no_fringe():
    fit = fit_arrays(phase_grid(12), np.full(12, 50.0))
    assert fit.visibility == pytest.approx(0, abs=1e-12)
    assert fit.param_stderr[2] == pytest.approx(np.pi)


def test_fringe_fit_validation():
    with pytest.raises(FitError):
        FringeFit(-1.0, 0.5, 0.0, 0.0, (0, 0, 0))
    with pytest.raises(FitError):
        FringeFit(1.0, 1.5, 0.0, 0.0, (0, 0, 0))


def simulated(cfg, seed):
    return simulate_sweep(cfg, SourceModel.from_experiment(cfg), JitterModel.off(), seed)


def test_fit_simulated_counts():
    cfg = REFERENCE_CFG.replace(theta1=radians(20))
    fit = fit_fringe(simulated(cfg, 4))
    expected = 0.72 * exact_visibility(theta1=radians(20))
    assert abs(fit.visibility - expected) < 4 * fit.visibility_stderr
    assert 0 < fit.visibility_stderr < 0.02


def test_visibility_estimate_removes_noise_bias():
    value, stderr = FringeFit(100.0, 0.05, 0.0, 1.0, (1.0, 0.02, 0.4),
                              noise_floor=0.03).visibility_estimate()
    assert value == pytest.approx(0.04)
    assert stderr == 0.03
    value, stderr = FringeFit(100.0, 0.44, 0.0, 1.0, (1.0, 0.01, 0.02),
                              noise_floor=0.014).visibility_estimate()
    assert value == pytest.approx(sqrt(0.44 ** 2 - 0.014 ** 2))
    assert stderr == 0.01


def test_no_fringe_estimate_covers_zero():
    cfg = REFERENCE_CFG.replace(theta2=radians(20))
    hits = []
    for seed in range(100):
        fit = fit_fringe(simulated(cfg, seed))
        value, stderr = fit.visibility_estimate()
        assert fit.noise_floor > 0
        assert value <= fit.visibility
        hits.append(value <= stderr)
    assert sum(hits) >= 75


@pytest.mark.parametrize('seed', range(10))
def test_fit_visibility_below_raw_contrast(seed):
    for cfg in (REFERENCE_CFG.replace(theta1=radians(20)),
                REFERENCE_CFG.replace(theta2=radians(20))):
        records = simulated(cfg, seed)
        counts = np.array([r.counts for r in records], dtype=float)
        raw = (counts.max() - counts.min()) / (counts.max() + counts.min())
        fit = fit_fringe(records)
        assert fit.visibility <= raw + fit.visibility_stderr


def test_ideal_config_shows_no_fringe():
    small = [fit_fringe(simulated(REFERENCE_CFG, seed)).visibility <= 0.02
             for seed in range(100)]
    assert sum(small) >= 95


def test_fit_poisson_close_to_linear():
    records = simulated(REFERENCE_CFG.replace(theta1=radians(10)), 5)
    linear = fit_fringe(records)
    poisson = fit_fringe(records, method='poisson')
    assert poisson.method == 'poisson'
    assert poisson.visibility == pytest.approx(linear.visibility, abs=0.01)


def test_fit_fringe_rescales_durations():
    phases = phase_grid(12)
    records = [CountRecord(p, int(round(100 * d * (1 - 0.5 * np.cos(p)))), d)
               for p, d in zip(phases, [1.0, 2.0] * 6)]
    fit = fit_fringe(records)
    assert fit.visibility == pytest.approx(0.5, abs=0.01)


def test_mean_counts():
    records = [CountRecord(0.0, c, 5.0) for c in (10, 12, 14)]
    assert mean_counts(records) == pytest.approx((12.0, 2 / np.sqrt(3)))
    assert mean_counts(records[:1]) == pytest.approx((10.0, np.sqrt(10)))
    with pytest.raises(DomainError):
        mean_counts([])


def test_intensity_drop():
    drop = intensity_drop(2526, 2146, 7, 6)
    assert drop.value == pytest.approx(0.1504, abs=1e-4)
    assert drop.stat == pytest.approx(0.00334, abs=1e-4)
    assert intensity_drop(2526, 2146, 7, 6, sdm_factor=2).stat == pytest.approx(2 * drop.stat)
    with pytest.raises(DomainError):
        intensity_drop(0, 1)


def test_estimate_pi_weak():
    assert estimate_pi_weak(2526, 2146, 0.148).value == pytest.approx(1.0165, abs=1e-4)
    assert estimate_pi_weak(2526, 2537, 0.148).value == pytest.approx(-0.0294, abs=1e-4)
    assert estimate_pi_weak(2526, 2526, R).value == 0
    with pytest.raises(DomainError):
        estimate_pi_weak(2526, 2146, 0)


def test_estimate_pi_weak_systematic():
    est = estimate_pi_weak(2526, 2146, 0.148, 7, 6, delta_sigma=radians(2))
    assert est.sys == pytest.approx(0.0349, abs=1e-4)
    assert est.uncertainty > est.stat


def test_delta_uncertainty():
    assert propagate_delta_uncertainty(radians(2)) == pytest.approx(0.035, abs=0.001)
    assert propagate_delta_uncertainty(radians(2), exact=True) == pytest.approx(0.0337, abs=1e-4)
    assert intensity_change_uncertainty(radians(2), reflectance=0.148) == pytest.approx(
        0.148 * radians(2))
    with pytest.raises(DomainError):
        propagate_delta_uncertainty(-1)


@pytest.mark.parametrize('theta', [radians(5), radians(10), radians(20)])
@pytest.mark.parametrize('scale', [1.0, 0.72])
def test_quadratic_inverts_exact_visibility(theta, scale):
    vis = scale * exact_visibility(theta1=theta)
    est = estimate_sigma_weak(vis, theta, scale, pi_weak=0.0)
    assert est.value == pytest.approx(1.0, abs=1e-12)


def test_first_order_sigma():
    est = estimate_sigma_weak(0.24, radians(10), 0.72, method='first_order')
    assert est.value == pytest.approx(0.955, abs=1e-3)
    assert estimate_sigma_weak(0.0, radians(10)).value == 0


def test_sigma_stat_uncertainty():
    est = estimate_sigma_weak(0.24, radians(10), 0.72, method='first_order',
                              visibility_stderr=0.05)
    assert est.stat == pytest.approx(0.05 / 0.72 / (2 * radians(10)))


def test_sigma_no_solution():
    with pytest.raises(NoSolutionError):
        estimate_sigma_weak(0.9, radians(20), 0.72)


def test_sigma_domain():
    with pytest.raises(DomainError):
        estimate_sigma_weak(0.2, 0.0)
    with pytest.raises(DomainError):
        estimate_sigma_weak(-0.1, 0.1)
    with pytest.raises(DomainError):
        estimate_sigma_weak(0.2, 0.1, method='exact')


def test_residual_floor():
    plain = estimate_sigma_weak(0.5, radians(20), method='first_order')
    floored = estimate_sigma_weak(0.5, radians(20), method='first_order', residual_floor=0.3)
    assert floored.value == pytest.approx(plain.value * 0.8)


def test_visibility_uncertainty():
    cfg = ExperimentConfig(theta1=radians(10), visibility_scale=0.72)
    u = visibility_uncertainty(cfg, radians(2))
    assert 0.02 < u < 0.1
    assert visibility_uncertainty(cfg, 0.0) == 0


def exact_inputs():
    absorption = {None: (2526.0, 7.0), 1: (2526.0, 7.0), 2: (2526.0 * (1 - R), 6.0)}
    rotations = {
        1: [(t, 0.72 * exact_visibility(theta1=t), 0.01) for t in (radians(10), radians(20))],
        2: [(t, 0.0, 0.01) for t in (radians(10), radians(20))],
    }
    return absorption, rotations


def test_weak_value_report_exact():
    report = weak_value_report(*exact_inputs(), R=R, visibility_scale=0.72)
    assert report.re_pi_1.value == pytest.approx(0, abs=1e-12)
    assert report.re_pi_2.value == pytest.approx(1, abs=1e-12)
    assert report.abs_sigma_1.value == pytest.approx(1, abs=1e-12)
    assert report.abs_sigma_2.value == 0
    assert report.first_order['abs_sigma_1'].value < 1
    d = report.to_dict()
    assert d['method_tag'] == 'quadratic'
    assert set(d['first_order']) == {'abs_sigma_1', 'abs_sigma_2'}


def test_weak_value_report_falls_back(caplog):
    absorption, rotations = exact_inputs()
    rotations[1] = [(radians(20), 0.9, 0.01)]
    with caplog.at_level(logging.WARNING):
        report = weak_value_report(absorption, rotations, R=R, visibility_scale=0.72)
    assert report.abs_sigma_1.value == pytest.approx(report.first_order['abs_sigma_1'].value)
    assert 'first-order' in caplog.text


def test_report_method_tag():
    with pytest.raises(DomainError):
        WeakValueReport(*[Estimate(0.0)] * 4, method_tag='third_order')


def test_protocol_configs():
    configs = protocol_configs(REFERENCE_CFG.replace(theta1=0.3), R)
    assert len(configs) == 7
    assert configs[('absorb', None)].theta1 == 0
    assert configs[('absorb', 2)].t2 == pytest.approx(1 - R)
    assert configs[('rotate', 2, radians(20))].theta2 == radians(20)


def test_simulate_protocol_deterministic():
    a = simulate_protocol(3, cfg=REFERENCE_CFG)
    assert a == simulate_protocol(3, cfg=REFERENCE_CFG)
    assert a != simulate_protocol(4, cfg=REFERENCE_CFG)


def test_ensemble_recovers_weak_values():
    summary = ensemble(range(200), cfg=REFERENCE_CFG)
    for name, truth in zip(EnsembleSummary.NAMES, (0, 1, 1, 0)):
        quoted = np.mean([getattr(r, name).uncertainty for r in summary.reports])
        assert abs(summary.mean(name) - truth) < 0.05, name
        assert abs(summary.mean(name) - truth) <= quoted, name
        assert summary.coverage(name, truth) >= 0.6, name
    assert 0.01 < summary.std('re_pi_2') < 0.05
    assert set(summary.to_dict()) == set(EnsembleSummary.NAMES)


def test_ensemble_with_jitter_covers_measured_values():
    summary = ensemble(range(50), cfg=REFERENCE_CFG, jitter=JitterModel())
    measured = {'re_pi_1': -0.03, 're_pi_2': 1.02, 'abs_sigma_1': 0.86, 'abs_sigma_2': 0.06}
    for name, value in measured.items():
        assert abs(value - summary.mean(name)) <= 2 * summary.std(name), name
