# encoding: utf-8

import os
from datetime import datetime, timezone
from math import radians

import pytest

from qcheshire.config import (config_digest, dump_config, load_config, loads_config,
                              make_manifest, reference_configs, parse_config, to_tree)
from qcheshire.errors import ConfigError
from qcheshire.montecarlo import JitterModel

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_load_fixture():
    run = load_config(fixture('theta1_20.yaml'))
    assert run.name == 'theta1 20 deg'
    assert run.experiment.theta1 == pytest.approx(radians(20))
    assert run.experiment.visibility_scale == 0.72
    assert len(run.experiment.phase_grid) == 60
    assert run.source.baseline_mean == pytest.approx(2526)
    assert run.jitter == JitterModel.off()
    assert run.slide is None


def test_load_slide_and_jitter():
    run = load_config(fixture('filter_arm2.yaml'))
    assert run.experiment.t2 == pytest.approx(0.852, abs=1e-3)
    assert run.experiment.t1 == 1.0
    assert run.experiment.theta1 == pytest.approx(radians(20))
    assert run.jitter.waveplate_sigma == pytest.approx(radians(2))
    assert run.jitter.apply_to == frozenset({'theta1', 'theta2'})


def test_empty_config_is_ideal():
    run = parse_config({})
    assert run.experiment.t1 == run.experiment.t2 == 1.0
    assert len(run.experiment.phase_grid) == 120
    assert run.residual_visibility_floor == 0


@pytest.mark.parametrize('text,expected', [
    ('theta1: 0.1 rad', 0.1),
    ('theta1: 20', radians(20)),
    ('theta1: 20 deg', radians(20)),
    ('theta1: 1200 arcminute', radians(20)),
])
def test_angle_units(text, expected):
    assert loads_config(text).experiment.theta1 == pytest.approx(expected)


def test_duration_units():
    run = loads_config('source:\n  bin_seconds: 5000 ms\n')
    assert run.source.bin_seconds == pytest.approx(5.0)
    assert run.experiment.bin_seconds == pytest.approx(5.0)


def test_singles_rates():
    run = loads_config('source:\n  coincidence_window: 10 ns\n'
                       '  singles_rates: [100000, 200000 / s]\n')
    assert run.source.accidental_rate == pytest.approx(200.0)
    assert run.source.baseline_mean == pytest.approx(2526)


def test_error_points_at_line():
    with pytest.raises(ConfigError) as e:
        load_config(fixture('bad_angle.yaml'))
    assert e.value.line == 5
    assert str(e.value).startswith(fixture('bad_angle.yaml') + ':5: theta2')


@pytest.mark.parametrize('text,line', [
    ('theta1: 10\nslide:\n  filtered_arm: 2\n  colour: red\n', 4),
    ('t2: 0.9\nslide:\n  filtered_arm: 2\n', 1),
    ('theta1: 20 m\n', 1),
    ('phase:\n  points: 0\n', 2),
    ('theta1: [1, 2\n', None),
    ('t1: 1.5\n', None),
    ('source:\n  accidental_rate: 5\n  singles_rates: [100000, 100000]\n', 3),
    ('source:\n  singles_rates: [100000]\n', 2),
])
def test_config_errors(text, line):
    with pytest.raises(ConfigError) as e:
        loads_config(text, 'run.yaml')
    assert e.value.path == 'run.yaml'
    if line is not None:
        assert e.value.line == line


def test_config_not_found(tmpdir):
    with pytest.raises(ConfigError) as e:
        load_config(tmpdir.join('missing.yaml').strpath)
    assert 'config not found' in str(e.value)


def test_unknown_top_key():
    with pytest.raises(ConfigError) as e:
        loads_config('name: x\nthetaa: 10\n')
    assert e.value.line == 2
    assert 'unknown key' in str(e.value)


def test_explicit_grid():
    run = loads_config('phase:\n  grid: [0 deg, 90 deg, 180 deg, 270 deg, 300 deg]\n')
    assert run.experiment.phase_grid[-1] == pytest.approx(radians(300))
    assert to_tree(run)['phase'] == {'grid': ['0 deg', '90 deg', '180 deg', '270 deg',
                                              '300 deg']}


@pytest.mark.parametrize('name', ['theta1_20.yaml', 'filter_arm2.yaml'])
def test_dump_reload_same_digest(tmpdir, name):
    run = load_config(fixture(name))
    path = tmpdir.join('dumped.yaml').strpath
    dump_config(run, path)
    again = load_config(path)
    assert config_digest(again) == config_digest(run)
    assert again.experiment.t2 == pytest.approx(run.experiment.t2)


def test_reference_configs_roundtrip():
    for name, run in reference_configs().items():
        again = loads_config(dump_config(run))
        assert again.name == name
        assert config_digest(again) == config_digest(run)


def test_digest_changes_with_config():
    a = loads_config('theta1: 10')
    b = loads_config('theta1: 20')
    assert config_digest(a) != config_digest(b)
    assert config_digest(a) == config_digest(loads_config('theta1: 600 arcminute'))


def test_reference_configs():
    runs = reference_configs()
    assert len(runs) == 11
    assert runs['filter arm 1'].experiment.t1 == pytest.approx(0.852, abs=1e-3)
    assert runs['filter arm 2, theta1 20 deg'].experiment.theta1 == pytest.approx(radians(20))
    assert all(run.experiment.visibility_scale == 0.72 for run in runs.values())


def test_manifest():
    run = parse_config({})
    now = datetime(2017, 5, 16, 12, 0, tzinfo=timezone.utc)
    manifest = make_manifest(run, 7, now)
    d = manifest.to_dict()
    assert d['seed'] == 7
    assert d['timestamp'] == '2017-05-16T12:00:00Z'
    assert d['config_digest'] == config_digest(run)
