# encoding: utf-8

"""
Photon counting
===============

Turns noiseless detection probabilities into heralded coincidence counts.

Counts are anchored to a baseline: the ideal unfiltered configuration
(P_H = ``P_REFERENCE`` = 1/4) yields ``baseline_mean`` coincidences per bin.
Each bin is an independent Poisson draw.

Random numbers come from ``numpy.random.default_rng`` seeded with a
``SeedSequence`` whose spawn key is the bin index (``derive_seed``).
Stream 0 of a sweep draws the wave-plate jitter, streams 1..n the bins.
So a sweep gives the same records whatever the number of workers.

The apparatus contrast V_m only enters here, as

    p_obs(φ) = p̄ + V_m (p(φ) - p̄)

where p̄ is the phase average of the noiseless probability.

.. code-block:: py

   import qcheshire.montecarlo as montecarlo

"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from math import radians

import numpy as np

from .elements import (absorber_channel, beam_splitter_channel, phase_channel,
                       rotation_channel)
from .errors import DomainError, SchemaError
from .experiment import REFERENCE_BASELINE_MEAN, REFERENCE_BIN_SECONDS, Pipeline, postselector
from .state import ATOL, H, ket

logger = logging.getLogger(__name__)

P_REFERENCE = 0.25
DEFAULT_EFFICIENCY = 0.30
DEFAULT_WINDOW = 8e-9
JITTER_TARGETS = ('theta1', 'theta2', 'delta1', 'delta2')
COUNTS_HEADER = ('phase_rad', 'counts', 'duration_s')


@dataclass(frozen=True)
class SourceModel:
    '''
    Heralded single-photon source and detection.

    ::

        >>> src = SourceModel.from_baseline(2526)
        >>> round(src.expected_counts(0.25), 6)
        2526.0

    '''

    pair_rate: float
    efficiency_idler: float = DEFAULT_EFFICIENCY
    efficiency_signal: float = DEFAULT_EFFICIENCY
    coincidence_window: float = DEFAULT_WINDOW
    accidental_rate: float = 0.0
    bin_seconds: float = REFERENCE_BIN_SECONDS

    def __post_init__(self):
        for name in ('pair_rate', 'coincidence_window', 'accidental_rate'):
            if getattr(self, name) < 0:
                raise DomainError('{} = {} must not be negative'.format(name, getattr(self, name)))
        for name in ('efficiency_idler', 'efficiency_signal'):
            if not 0 <= getattr(self, name) <= 1:
                raise DomainError('{} = {} outside [0, 1]'.format(name, getattr(self, name)))
        if not self.bin_seconds > 0:
            raise DomainError('bin_seconds {} must be positive'.format(self.bin_seconds))

    @classmethod
    def from_baseline(cls, mean=REFERENCE_BASELINE_MEAN, efficiency_idler=DEFAULT_EFFICIENCY,
                      efficiency_signal=DEFAULT_EFFICIENCY, bin_seconds=REFERENCE_BIN_SECONDS,
                      **kw):
        '''
        The pair rate that makes the ideal configuration give ``mean``
        coincidences per bin.
        '''
        if not mean > 0:
            raise DomainError('baseline mean {} must be positive'.format(mean))
        detection = efficiency_idler * efficiency_signal
        if detection <= 0:
            raise DomainError('zero detection efficiency cannot reach a baseline')
        return cls(pair_rate=mean / (bin_seconds * detection),
                   efficiency_idler=efficiency_idler,
                   efficiency_signal=efficiency_signal,
                   bin_seconds=bin_seconds, **kw)

    @classmethod
    def from_experiment(cls, cfg, **kw):
        return cls.from_baseline(cfg.source_mean, bin_seconds=cfg.bin_seconds, **kw)

    @property
    def baseline_mean(self):
        return self.expected_counts(P_REFERENCE) - self.accidental_rate * self.bin_seconds

    def with_singles(self, rate_idler, rate_signal):
        '''
        This source with the accidental rate of the given singles rates
        within its ``coincidence_window``.

        ::

            >>> src = SourceModel.from_baseline(2526).with_singles(1e5, 1e5)
            >>> round(src.accidental_rate, 9)
            80.0

        '''
        return replace(self, accidental_rate=accidental_rate_from_singles(
            rate_idler, rate_signal, self.coincidence_window))

    def expected_counts(self, p_detect):
        return (self.pair_rate * self.bin_seconds * self.efficiency_idler
                * self.efficiency_signal * p_detect / P_REFERENCE
                + self.accidental_rate * self.bin_seconds)


def accidental_rate_from_singles(rate_idler, rate_signal, window=DEFAULT_WINDOW):
    '''
    Rate of uncorrelated coincidences R_i·R_s·τ for singles rates in 1/s.

    ::

        >>> round(accidental_rate_from_singles(1e5, 1e5, 8e-9), 9)
        80.0

    '''
    if rate_idler < 0 or rate_signal < 0 or window < 0:
        raise DomainError('singles rates and window must not be negative')
    return rate_idler * rate_signal * window


@dataclass(frozen=True)
class CountRecord:
    phase: float
    counts: int
    duration: float
    seed_tag: int = 0

    def __post_init__(self):
        if self.counts < 0:
            raise DomainError('negative count {}'.format(self.counts))
        if not self.duration > 0:
            raise DomainError('bin duration {} must be positive'.format(self.duration))


@dataclass(frozen=True)
class JitterModel:
    '''
    Static wave-plate setting error: each listed angle is offset by one
    normal draw of width ``waveplate_sigma`` per sweep.
    '''

    waveplate_sigma: float = radians(2)
    apply_to: frozenset = frozenset(JITTER_TARGETS)

    def __post_init__(self):
        if self.waveplate_sigma < 0:
            raise DomainError('waveplate_sigma {} must not be negative'.format(self.waveplate_sigma))
        targets = frozenset(self.apply_to)
        unknown = targets - set(JITTER_TARGETS)
        if unknown:
            raise DomainError('cannot jitter {}'.format(', '.join(sorted(unknown))))
        object.__setattr__(self, 'apply_to', targets)

    @classmethod
    def off(cls):
        return cls(0.0, frozenset())

    def draw(self, cfg, rng):
        'A copy of ``cfg`` with the jittered angles.'
        if self.waveplate_sigma == 0 or not self.apply_to:
            return cfg
        changes = {name: getattr(cfg, name) + float(rng.normal(0.0, self.waveplate_sigma))
                   for name in JITTER_TARGETS if name in self.apply_to}
        logger.debug('jitter %s', changes)
        return cfg.replace(**changes)


def derive_seed(rng_seed, index):
    '''
    Independent stream ``index`` of ``rng_seed``.

    ::

        >>> derive_seed(7, 3).spawn_key
        (3,)

    '''
    if int(rng_seed) < 0 or int(index) < 0:
        raise DomainError('seed {} and stream {} must not be negative'.format(rng_seed, index))
    return np.random.SeedSequence(int(rng_seed), spawn_key=(int(index),))


def simulate_bin(p_detect, src, rng_seed, phase=0.0, seed_tag=None):
    '''
    One bin of coincidence counts at detection probability ``p_detect``.
    ``rng_seed`` is an integer or a ``SeedSequence``.
    '''
    if not -ATOL <= p_detect <= 1 + ATOL:
        raise DomainError('detection probability {} outside [0, 1]'.format(p_detect))
    p_detect = min(max(p_detect, 0.0), 1.0)
    if seed_tag is None:
        seed_tag = rng_seed if isinstance(rng_seed, int) else 0
    rng = np.random.default_rng(rng_seed)
    counts = int(rng.poisson(src.expected_counts(p_detect)))
    return CountRecord(float(phase), counts, src.bin_seconds, int(seed_tag))


def observed_probability(cfg, phi, pipeline=None):
    '''
    The noiseless probability with its fringe contrast reduced to
    ``cfg.visibility_scale``.
    '''
    pipe = pipeline or Pipeline(cfg)
    mean = pipe.mean_probability()
    return mean + cfg.visibility_scale * (pipe.probability(phi) - mean)


def simulate_sweep(cfg, src, jitter, rng_seed, workers=None):
    '''
    One ``CountRecord`` per grid phase, in grid order.
    The jitter is drawn once for the whole sweep.

    ::

        >>> from qcheshire.experiment import ExperimentConfig, phase_grid
        >>> cfg = ExperimentConfig(phase_grid=phase_grid(6))
        >>> src = SourceModel.from_experiment(cfg)
        >>> a = simulate_sweep(cfg, src, JitterModel(), 11)
        >>> a == simulate_sweep(cfg, src, JitterModel(), 11, workers=3)
        True

    '''
    jittered = jitter.draw(cfg, np.random.default_rng(derive_seed(rng_seed, 0)))
    pipe = Pipeline(jittered)
    mean = pipe.mean_probability()
    grid = cfg.phase_grid

    def one(i):
        phi = grid[i]
        p = mean + cfg.visibility_scale * (pipe.probability(phi) - mean)
        return simulate_bin(p, src, derive_seed(rng_seed, i + 1), phase=phi, seed_tag=i + 1)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(len(grid))))
    else:
        records = [one(i) for i in range(len(grid))]
    logger.debug('seed %s: %d bins, %d counts', rng_seed, len(records),
                 sum(r.counts for r in records))
    return records


def density_evolution(cfg, phi):
    '''
    The full density matrix after the weak interactions, every Kraus branch
    applied. Returns ``(rho, absorbed)``, where ``absorbed`` is the trace
    carried off by the absorbers.
    '''
    channels = (
        beam_splitter_channel(),
        rotation_channel(1, np.pi / 2 - cfg.delta1),
        phase_channel(2, phi),
        rotation_channel(1, cfg.theta1),
        rotation_channel(2, cfg.theta2),
        absorber_channel(1, cfg.t1),
        absorber_channel(2, cfg.t2),
    )
    rho = ket(1, H).density()
    absorbed = 0.0
    for ch in channels:
        rho, lost = ch.apply_density(rho)
        absorbed += lost
    return rho, absorbed


def density_oracle(cfg, phi):
    '''
    Tr(|φ_post><φ_post| ρ'), computed independently of the pure-state path.

    ::

        >>> from qcheshire.experiment import ExperimentConfig
        >>> round(density_oracle(ExperimentConfig(), 1.0), 10)
        0.25

    '''
    rho, _ = density_evolution(cfg, phi)
    return rho.overlap(postselector(cfg))


def write_records(records, path):
    'Counts CSV with header ``phase_rad,counts,duration_s``.'
    with open(path, 'w', encoding='utf-8', newline='') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(COUNTS_HEADER)
        for r in records:
            w.writerow((repr(r.phase), r.counts, repr(r.duration)))
    logger.info('wrote %d bins to %s', len(records), path)


def read_records(path):
    '''
    Parse a counts CSV. Any deviation from the schema raises
    ``SchemaError`` naming the row.
    '''
    records = []
    with open(path, encoding='utf-8', newline='') as f:
        rows = csv.reader(f)
        header = next(rows, None)
        if header is None or tuple(h.strip() for h in header) != COUNTS_HEADER:
            raise SchemaError('expected header {}'.format(','.join(COUNTS_HEADER)), path, 1)
        for row_number, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(COUNTS_HEADER):
                raise SchemaError('expected {} fields, got {}'.format(
                    len(COUNTS_HEADER), len(row)), path, row_number)
            try:
                phase = float(row[0])
                counts = int(row[1])
                duration = float(row[2])
            except ValueError as e:
                raise SchemaError(str(e), path, row_number) from None
            if not np.isfinite(phase):
                raise SchemaError('phase is not finite', path, row_number)
            try:
                records.append(CountRecord(phase, counts, duration, row_number - 1))
            except DomainError as e:
                raise SchemaError(str(e), path, row_number) from None
    if not records:
        raise SchemaError('no data rows', path, 2)
    return records

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
