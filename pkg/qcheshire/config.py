# encoding: utf-8

"""
Configuration
=============

A run is described by one YAML file.
Every angle carries a unit (``20 deg``, ``0.1 rad``);
a bare number is read as degrees.
Durations and rates work the same way, bare numbers being seconds and 1/s.
Units are converted by pint_ at load time and the library only sees
radians and seconds.

Example::

    theta1: 20 deg
    phase:
      start: 0 deg
      stop: 360 deg
      points: 120
    visibility_scale: 0.72
    source:
      baseline_mean: 2526
      bin_seconds: 5 s
    slide:
      filtered_arm: 2
    jitter:
      sigma: 2 deg

Diagnostics point at the offending line of the file.

.. _pint: https://pint.readthedocs.io

.. code-block:: py

   import qcheshire.config as config

"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from math import degrees, pi, radians

import numpy as np
import pint
import yaml

from . import __version__
from .elements import SlideGeometry
from .errors import ConfigError, DomainError
from .experiment import (REFERENCE_BASELINE_MEAN, REFERENCE_BIN_SECONDS, REFERENCE_VISIBILITY_SCALE,
                         ExperimentConfig, phase_grid)
from .montecarlo import JITTER_TARGETS, JitterModel, SourceModel

logger = logging.getLogger(__name__)

ureg = pint.UnitRegistry()

TOP_KEYS = {'name', 't1', 't2', 'theta1', 'theta2', 'delta1', 'delta2', 'phase',
            'visibility_scale', 'source', 'jitter', 'slide', 'actuator',
            'residual_visibility_floor'}
PHASE_KEYS = {'start', 'stop', 'points', 'grid'}
SOURCE_KEYS = {'baseline_mean', 'pair_rate', 'efficiency_idler', 'efficiency_signal',
               'coincidence_window', 'accidental_rate', 'singles_rates', 'bin_seconds'}
JITTER_KEYS = {'sigma', 'apply_to'}
SLIDE_KEYS = {'refractive_index', 'incidence_angle', 'filtered_arm', 'interfaces'}
ACTUATOR_KEYS = {'offset', 'scale'}


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig
    source: SourceModel
    jitter: JitterModel
    slide: SlideGeometry = None
    residual_visibility_floor: float = 0.0
    name: str = ''


@dataclass(frozen=True)
class RunManifest:
    config_digest: str
    seed: int
    tool_version: str
    timestamp: str

    def to_dict(self):
        return {'config_digest': self.config_digest, 'seed': self.seed,
                'tool_version': self.tool_version, 'timestamp': self.timestamp}


class _Reader:
    'Typed access to a parsed tree with line numbers for diagnostics.'

    def __init__(self, path, lines):
        self.path = path
        self.lines = lines

    def fail(self, keys, message):
        line = None
        for n in range(len(keys), -1, -1):
            line = self.lines.get(tuple(keys[:n]))
            if line is not None:
                break
        label = '.'.join(str(k) for k in keys)
        raise ConfigError('{}: {}'.format(label, message) if label else message,
                          self.path, line)

    def mapping(self, tree, keys, allowed):
        node = tree
        if node is None:
            return {}
        if not isinstance(node, dict):
            self.fail(keys, 'expected a mapping')
        for k in node:
            if k not in allowed:
                self.fail(keys + [k], 'unknown key')
        return node

    def quantity(self, value, keys, unit, default_unit):
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            self.fail(keys, 'expected a quantity in {}'.format(unit))
        try:
            q = ureg.Quantity(value) if isinstance(value, str) else ureg.Quantity(float(value))
            if q.unitless:
                q = ureg.Quantity(float(q.magnitude), default_unit)
            return float(q.to(unit).magnitude)
        except (pint.errors.PintError, AttributeError, ValueError, TypeError) as e:
            self.fail(keys, 'not a quantity in {} ({})'.format(unit, e))

    def angle(self, tree, keys, default=0.0):
        value = tree.get(keys[-1])
        if value is None:
            return default
        return self.quantity(value, keys, 'radian', 'degree')

    def seconds(self, tree, keys, default):
        value = tree.get(keys[-1])
        if value is None:
            return default
        return self.quantity(value, keys, 'second', 'second')

    def rate(self, tree, keys, default):
        value = tree.get(keys[-1])
        if value is None:
            return default
        return self.quantity(value, keys, '1/second', '1/second')

    def number(self, tree, keys, default, kind=float):
        value = tree.get(keys[-1])
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(keys, 'expected a number, got {!r}'.format(value))
        if kind is int and float(value) != int(value):
            self.fail(keys, 'expected an integer, got {!r}'.format(value))
        return kind(value)


def _line_map(node, prefix=(), lines=None):
    lines = {} if lines is None else lines
    lines.setdefault(prefix, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = key_node.value
            if key.isdigit():
                key = int(key)
            lines[prefix + (key,)] = key_node.start_mark.line + 1
            _line_map(value_node, prefix + (key,), lines)
    return lines


def _phase(r, tree):
    spec = r.mapping(tree.get('phase'), ['phase'], PHASE_KEYS)
    if 'grid' in spec:
        if set(spec) - {'grid'}:
            r.fail(['phase'], 'grid excludes start/stop/points')
        grid = spec['grid']
        if not isinstance(grid, list) or not grid:
            r.fail(['phase', 'grid'], 'expected a non-empty list of angles')
        return tuple(r.quantity(v, ['phase', 'grid'], 'radian', 'degree') for v in grid)
    start = r.angle(spec, ['phase', 'start'], 0.0)
    stop = r.angle(spec, ['phase', 'stop'], 2 * pi)
    points = r.number(spec, ['phase', 'points'], 120, int)
    if points < 1:
        r.fail(['phase', 'points'], 'need at least one point')
    if stop <= start:
        r.fail(['phase', 'stop'], 'stop must exceed start')
    return phase_grid(points, start, stop)


def _source(r, tree):
    spec = r.mapping(tree.get('source'), ['source'], SOURCE_KEYS)
    if 'baseline_mean' in spec and 'pair_rate' in spec:
        r.fail(['source', 'pair_rate'], 'give either baseline_mean or pair_rate')
    kw = dict(
        efficiency_idler=r.number(spec, ['source', 'efficiency_idler'], 0.30),
        efficiency_signal=r.number(spec, ['source', 'efficiency_signal'], 0.30),
        coincidence_window=r.seconds(spec, ['source', 'coincidence_window'], 8e-9),
        accidental_rate=r.rate(spec, ['source', 'accidental_rate'], 0.0),
        bin_seconds=r.seconds(spec, ['source', 'bin_seconds'], REFERENCE_BIN_SECONDS),
    )
    singles = spec.get('singles_rates')
    if singles is not None:
        if 'accidental_rate' in spec:
            r.fail(['source', 'singles_rates'], 'give either accidental_rate or singles_rates')
        if not isinstance(singles, list) or len(singles) != 2:
            r.fail(['source', 'singles_rates'], 'expected [idler rate, signal rate]')
        singles = [r.quantity(v, ['source', 'singles_rates'], '1/second', '1/second')
                   for v in singles]
    try:
        if 'pair_rate' in spec:
            src = SourceModel(pair_rate=r.rate(spec, ['source', 'pair_rate'], None), **kw)
        else:
            mean = r.number(spec, ['source', 'baseline_mean'], REFERENCE_BASELINE_MEAN)
            src = SourceModel.from_baseline(mean, **kw)
        return src if singles is None else src.with_singles(*singles)
    except DomainError as e:
        r.fail(['source'], str(e))


def _jitter(r, tree):
    if tree.get('jitter') is None:
        return JitterModel.off()
    spec = r.mapping(tree['jitter'], ['jitter'], JITTER_KEYS)
    sigma = r.angle(spec, ['jitter', 'sigma'], radians(2))
    apply_to = spec.get('apply_to', list(JITTER_TARGETS))
    if not isinstance(apply_to, list) or any(a not in JITTER_TARGETS for a in apply_to):
        r.fail(['jitter', 'apply_to'], 'expected a list out of {}'.format(', '.join(JITTER_TARGETS)))
    try:
        return JitterModel(sigma, frozenset(apply_to))
    except DomainError as e:
        r.fail(['jitter'], str(e))


def _slide(r, tree):
    if tree.get('slide') is None:
        return None
    spec = r.mapping(tree['slide'], ['slide'], SLIDE_KEYS)
    n = r.number(spec, ['slide', 'refractive_index'], 1.5)
    arm = spec.get('filtered_arm', 2)
    if arm not in (1, 2, None, 'none'):
        r.fail(['slide', 'filtered_arm'], 'expected 1, 2 or none')
    try:
        return SlideGeometry(
            refractive_index=n,
            incidence_angle=r.angle(spec, ['slide', 'incidence_angle'], np.arctan(n)),
            filtered_arm=None if arm in (None, 'none') else arm,
            interfaces=r.number(spec, ['slide', 'interfaces'], 1, int),
        )
    except DomainError as e:
        r.fail(['slide'], str(e))


def parse_config(tree, path=None, lines=None):
    '''
    Build a |RunConfig| from a parsed YAML tree.

    ::

        >>> run = parse_config({'theta1': 20, 'slide': {'filtered_arm': 2}})
        >>> round(run.experiment.t2, 3)
        0.852

    '''
    r = _Reader(path, lines or {})
    tree = r.mapping(tree, [], TOP_KEYS)
    slide = _slide(r, tree)
    t = {1: r.number(tree, ['t1'], 1.0), 2: r.number(tree, ['t2'], 1.0)}
    if slide is not None and slide.filtered_arm is not None:
        arm = int(slide.filtered_arm)
        if 't{}'.format(arm) in tree:
            r.fail(['t{}'.format(arm)], 'arm {} is filtered by the slide'.format(arm))
        t[arm] = slide.transmission
    source = _source(r, tree)
    actuator = r.mapping(tree.get('actuator'), ['actuator'], ACTUATOR_KEYS)
    try:
        experiment = ExperimentConfig(
            t1=t[1], t2=t[2],
            theta1=r.angle(tree, ['theta1']),
            theta2=r.angle(tree, ['theta2']),
            delta1=r.angle(tree, ['delta1']),
            delta2=r.angle(tree, ['delta2']),
            phase_grid=_phase(r, tree),
            visibility_scale=r.number(tree, ['visibility_scale'], 1.0),
            source_mean=source.baseline_mean,
            bin_seconds=source.bin_seconds,
            actuator_offset=r.number(actuator, ['actuator', 'offset'], 0.0),
            actuator_scale=r.number(actuator, ['actuator', 'scale'], 1.0),
        )
    except DomainError as e:
        r.fail([], str(e))
    name = tree.get('name', '')
    if not isinstance(name, str):
        r.fail(['name'], 'expected a string')
    return RunConfig(experiment, source, _jitter(r, tree), slide,
                     r.number(tree, ['residual_visibility_floor'], 0.0), name)


def loads_config(text, path=None):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        tree = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise ConfigError('invalid YAML: {}'.format(getattr(e, 'problem', e)), path,
                          mark.line + 1 if mark else None) from None
    lines = _line_map(node) if node is not None else {}
    return parse_config(tree, path, lines)


def load_config(path):
    if not os.path.isfile(path):
        raise ConfigError('config not found', path)
    with open(path, encoding='utf-8') as f:
        run = loads_config(f.read(), path)
    logger.debug('loaded %s', path)
    return run


def _deg(rad):
    return '{:.12g} deg'.format(degrees(rad))


def _phase_tree(grid):
    g = np.asarray(grid)
    if len(g) > 1:
        step = (g[-1] - g[0]) / (len(g) - 1)
        if np.allclose(np.diff(g), step, rtol=0, atol=1e-12):
            return {'start': _deg(g[0]), 'stop': _deg(g[0] + step * len(g)), 'points': len(g)}
    return {'grid': [_deg(x) for x in g]}


def to_tree(run):
    'The normalized tree of ``run``: explicit units, degrees for angles.'
    e, s, j = run.experiment, run.source, run.jitter
    tree = {
        'name': run.name,
        'theta1': _deg(e.theta1), 'theta2': _deg(e.theta2),
        'delta1': _deg(e.delta1), 'delta2': _deg(e.delta2),
        'phase': _phase_tree(e.phase_grid),
        'visibility_scale': e.visibility_scale,
        'source': {
            'baseline_mean': s.baseline_mean,
            'efficiency_idler': s.efficiency_idler,
            'efficiency_signal': s.efficiency_signal,
            'coincidence_window': '{:.12g} ns'.format(s.coincidence_window * 1e9),
            'accidental_rate': '{:.12g} / s'.format(s.accidental_rate),
            'bin_seconds': '{:.12g} s'.format(s.bin_seconds),
        },
        'actuator': {'offset': e.actuator_offset, 'scale': e.actuator_scale},
        'residual_visibility_floor': run.residual_visibility_floor,
    }
    filtered = None
    if run.slide is not None:
        g = run.slide
        filtered = None if g.filtered_arm is None else int(g.filtered_arm)
        tree['slide'] = {'refractive_index': g.refractive_index,
                         'incidence_angle': _deg(g.incidence_angle),
                         'filtered_arm': 'none' if filtered is None else filtered,
                         'interfaces': g.interfaces}
    for arm, t in ((1, e.t1), (2, e.t2)):
        if arm != filtered:
            tree['t{}'.format(arm)] = t
    if j.waveplate_sigma > 0 and j.apply_to:
        tree['jitter'] = {'sigma': _deg(j.waveplate_sigma),
                          'apply_to': [a for a in JITTER_TARGETS if a in j.apply_to]}
    return tree


def dump_config(run, path=None):
    text = yaml.safe_dump(to_tree(run), sort_keys=True, allow_unicode=True)
    if path is not None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    return text


def _canonical(value):
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, float):
        return '%.12g' % value
    return value


def config_digest(run):
    '''
    sha1 of the canonical JSON of the normalized tree.
    Equal for a configuration and its dumped and reloaded copy.
    '''
    text = json.dumps(_canonical(to_tree(run)), sort_keys=True, separators=(',', ':'))
    return hashlib.sha1(text.encode('utf-8')).hexdigest()


def make_manifest(run, seed, now=None):
    now = now or datetime.now(timezone.utc)
    return RunManifest(config_digest(run), int(seed), __version__,
                       now.strftime('%Y-%m-%dT%H:%M:%SZ'))


def _run(name, slide=None, **changes):
    source = SourceModel.from_baseline(REFERENCE_BASELINE_MEAN)
    exp = ExperimentConfig(visibility_scale=REFERENCE_VISIBILITY_SCALE, **changes)
    if slide is not None:
        exp = exp.replace(**{'t{}'.format(int(slide.filtered_arm)): slide.transmission})
    return RunConfig(exp, source, JitterModel.off(), slide, 0.0, name)


def reference_configs():
    '''
    The measurement configurations of the reproduction, in table order:
    absorbers, rotations, then the two simultaneous combinations
    at each rotation angle.
    '''
    arm1, arm2 = SlideGeometry(filtered_arm=1), SlideGeometry(filtered_arm=2)
    runs = [_run('no filter'), _run('filter arm 1', arm1), _run('filter arm 2', arm2)]
    for deg in (10, 20):
        runs.append(_run('theta1 {} deg'.format(deg), theta1=radians(deg)))
    for deg in (10, 20):
        runs.append(_run('theta2 {} deg'.format(deg), theta2=radians(deg)))
    for deg in (10, 20):
        runs.append(_run('filter arm 1, theta2 {} deg'.format(deg), arm1, theta2=radians(deg)))
    for deg in (10, 20):
        runs.append(_run('filter arm 2, theta1 {} deg'.format(deg), arm2, theta1=radians(deg)))
    return {run.name: run for run in runs}

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
