# encoding: utf-8

"""
Interferometer
==============

The photon enters as |1,H>, is split by a 50-50 beam splitter, has its
arm-1 polarization turned from H to V by a half-wave plate (tilted by δ1
when imperfect) and picks up the variable phase φ in arm 2.
That is the preselection.

Inside the interferometer each arm then sees, in this order,
its polarization rotation θ_k and its absorber T_k.
Rotation and absorber in one arm commute for this family of states;
the order is fixed anyway.

The beams recombine and horizontal polarization (tilted by δ2 when
imperfect) is kept at output port 1. That is the postselection.

Sweeps are parameterized by φ directly. The actuator offset/scale
in |ExperimentConfig| only labels plot axes.

.. code-block:: py

   import qcheshire.experiment as experiment

"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import pi

import numpy as np

from .elements import (absorber_channel, beam_splitter_channel, phase_channel,
                       postselect_H_port1, rotation_channel)
from .errors import DomainError, UndefinedVisibilityError
from .state import ATOL, H, ket

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 120
REFERENCE_VISIBILITY_SCALE = 0.72
REFERENCE_BASELINE_MEAN = 2526.0
REFERENCE_BIN_SECONDS = 5.0


def phase_grid(points=DEFAULT_POINTS, start=0.0, stop=2 * pi):
    '''
    ``points`` equally spaced phases from ``start``, ``stop`` excluded.

    ::

        >>> phase_grid(4, 0.0, 4.0)
        (0.0, 1.0, 2.0, 3.0)

    '''
    if points < 1:
        raise DomainError('phase grid needs at least one point')
    return tuple(float(x) for x in np.linspace(start, stop, int(points), endpoint=False))


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    All physical knobs. Angles are in radians.

    ``visibility_scale`` (V_m) is the largest fringe contrast the real
    apparatus reaches. It never enters the quantum state.
    ``source_mean`` is the expected coincidence count per bin of the ideal
    unfiltered configuration.
    '''

    t1: float = 1.0
    t2: float = 1.0
    theta1: float = 0.0
    theta2: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    phase_grid: tuple = field(default_factory=phase_grid)
    visibility_scale: float = 1.0
    source_mean: float = REFERENCE_BASELINE_MEAN
    bin_seconds: float = REFERENCE_BIN_SECONDS
    actuator_offset: float = 0.0
    actuator_scale: float = 1.0

    def __post_init__(self):
        for name in ('t1', 't2'):
            t = getattr(self, name)
            if not 0 <= t <= 1:
                raise DomainError('{} = {} outside [0, 1]'.format(name, t))
        grid = tuple(float(x) for x in self.phase_grid)
        if not grid:
            raise DomainError('phase grid is empty')
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError('phase grid is not strictly increasing')
        object.__setattr__(self, 'phase_grid', grid)
        if not 0 < self.visibility_scale <= 1:
            raise DomainError('visibility_scale {} outside (0, 1]'.format(self.visibility_scale))
        if not self.source_mean > 0:
            raise DomainError('source_mean {} must be positive'.format(self.source_mean))
        if not self.bin_seconds > 0:
            raise DomainError('bin_seconds {} must be positive'.format(self.bin_seconds))
        if self.actuator_scale == 0:
            raise DomainError('actuator_scale must not be zero')

    def replace(self, **changes):
        return replace(self, **changes)

    def actuator_position(self, phase):
        'Axis label for ``phase``; cosmetic only.'
        return (np.asarray(phase) - self.actuator_offset) / self.actuator_scale


def preselect(cfg, phi):
    '''
    (1/√2)[|1>(cos δ1|V> + sin δ1|H>) + e^{iφ}|2>|H>], built by sending
    |1,H> through the beam splitter, the arm-1 half-wave plate and the
    arm-2 phase shifter.
    '''
    return phase_channel(2, phi).apply(_prepared(cfg))


def _prepared(cfg):
    split = beam_splitter_channel().apply(ket(1, H))
    return rotation_channel(1, pi / 2 - cfg.delta1).apply(split)


def postselector(cfg):
    '(1/√2)(|1> + |2>)(cos δ2|H> + sin δ2|V>)'
    split = beam_splitter_channel().apply(ket(1, H))
    split = rotation_channel(1, cfg.delta2).apply(split)
    return rotation_channel(2, cfg.delta2).apply(split)


def weak_channels(cfg):
    'The canonical order: rotations, then absorbers.'
    return (
        rotation_channel(1, cfg.theta1),
        rotation_channel(2, cfg.theta2),
        absorber_channel(1, cfg.t1),
        absorber_channel(2, cfg.t2),
    )


class Pipeline:
    '''
    The φ-independent parts of the interferometer, built once per
    configuration and reused for every phase of a sweep.
    '''

    def __init__(self, cfg):
        self.cfg = cfg
        self._prepared = _prepared(cfg)
        self._weak = weak_channels(cfg)
        self._post = postselector(cfg)

    def final_state(self, phi):
        s = phase_channel(2, phi).apply(self._prepared)
        for ch in self._weak:
            s = ch.apply(s)
        return s

    def probability(self, phi):
        return postselect_H_port1(self.final_state(phi), self._post)[1]

    def mean_probability(self):
        'Average over φ: the curve is a + b cos(φ + c), so two opposite phases suffice.'
        return 0.5 * (self.probability(0.0) + self.probability(pi))


def final_state(cfg, phi):
    'The state just before recombination.'
    return Pipeline(cfg).final_state(phi)


def run_pipeline(cfg, phi):
    '''
    Probability |<φ_post|ψ'>|² of detecting the photon with horizontal
    polarization at output port 1.

    ::

        >>> round(run_pipeline(ExperimentConfig(), 0.3), 12)
        0.25

    '''
    return Pipeline(cfg).probability(phi)


def mean_probability(cfg):
    return Pipeline(cfg).mean_probability()


@dataclass(frozen=True)
class SweepCurve:
    points: tuple

    def __post_init__(self):
        points = tuple((float(phase), float(p)) for phase, p in self.points)
        for phase, p in points:
            if not -ATOL <= p <= 1 + ATOL:
                raise DomainError('probability {} at phase {} outside [0, 1]'.format(p, phase))
        object.__setattr__(self, 'points', points)

    @property
    def phases(self):
        return np.array([x for x, _ in self.points])

    @property
    def probabilities(self):
        return np.array([p for _, p in self.points])

    @property
    def mean(self):
        return float(np.mean(self.probabilities))

    @property
    def visibility(self):
        'Raw (max - min)/(max + min) over the grid.'
        p = self.probabilities
        top, bottom = p.max(), p.min()
        if top + bottom <= 0:
            raise UndefinedVisibilityError('curve is identically zero')
        return float((top - bottom) / (top + bottom))


def sweep(cfg, workers=None):
    '''
    Noiseless detection probability at every grid phase.
    With ``workers`` > 1 the phases are evaluated in a thread pool;
    the curve is always in grid order.
    '''
    pipe = Pipeline(cfg)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            probabilities = list(pool.map(pipe.probability, cfg.phase_grid))
    else:
        probabilities = [pipe.probability(phi) for phi in cfg.phase_grid]
    logger.debug('swept %d phases', len(probabilities))
    return SweepCurve(tuple(zip(cfg.phase_grid, probabilities)))

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
