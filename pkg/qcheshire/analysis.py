# encoding: utf-8

"""
Analysis
========

Recovers weak values from count data.

Fringe fits use the model

    N(φ) = A (1 - V cos(φ - φ0))

which is linear in (A, A V cos φ0, A V sin φ0).
The linear least-squares solution is exact, so no scan over φ0 is needed.
``method='poisson'`` refines it with Pearson-weighted residuals
(``scipy.optimize.least_squares``).

Presence weak values come from relative intensity drops,
polarization weak values from fringe visibilities.
The visibilities are divided by the apparatus contrast V_m here,
never in the simulated state.

.. code-block:: py

   import qcheshire.analysis as analysis

"""

import logging
from dataclasses import asdict, dataclass, field
from math import atan2, hypot, pi, radians, sin, sqrt

import numpy as np
from scipy.optimize import least_squares

from .elements import SlideGeometry
from .errors import DomainError, FitError, NoSolutionError
from .experiment import ExperimentConfig
from .montecarlo import JitterModel, SourceModel, derive_seed, simulate_sweep
from .weak import ImperfectionAngles, exact_visibility, generalized_weak_values

logger = logging.getLogger(__name__)

MIN_RECORDS = 5
METHODS = ('first_order', 'quadratic')
FIT_METHODS = ('linear', 'poisson')
REFERENCE_THETAS = (radians(10), radians(20))


@dataclass(frozen=True)
class FringeFit:
    '''
    ``param_stderr`` holds the standard errors of
    (``mean_level``, ``visibility``, ``phase_offset``).
    ``noise_floor`` is the spread of the fringe amplitude over both
    quadratures, √(var(A V cos φ0) + var(A V sin φ0))/A.
    '''

    mean_level: float
    visibility: float
    phase_offset: float
    residual_rms: float
    param_stderr: tuple
    method: str = 'linear'
    noise_floor: float = 0.0

    def __post_init__(self):
        if not self.mean_level > 0:
            raise FitError('fitted mean level {} is not positive'.format(self.mean_level))
        if not 0 <= self.visibility <= 1:
            raise FitError('fitted visibility {} outside [0, 1]'.format(self.visibility))
        if not -pi < self.phase_offset <= pi:
            raise FitError('phase offset {} outside (-pi, pi]'.format(self.phase_offset))

    @property
    def visibility_stderr(self):
        return self.param_stderr[1]

    def visibility_estimate(self):
        '''
        Visibility with its noise bias removed, and its uncertainty.

        The fitted amplitude is never negative, so noise alone gives
        E[V²] = V_true² + ``noise_floor``². That bias is subtracted from V².
        Within two noise floors of zero the uncertainty is the noise floor,
        otherwise the linearized ``visibility_stderr``.

        ::

            >>> fit = FringeFit(100.0, 0.03, 0.0, 1.0, (1.0, 0.02, 0.7), noise_floor=0.03)
            >>> fit.visibility_estimate()
            (0.0, 0.03)

        '''
        value = sqrt(max(self.visibility ** 2 - self.noise_floor ** 2, 0.0))
        if self.visibility < 2 * self.noise_floor:
            return value, self.noise_floor
        return value, self.visibility_stderr

    def curve(self, phases):
        phases = np.asarray(phases, dtype=float)
        return self.mean_level * (1 - self.visibility * np.cos(phases - self.phase_offset))

    def to_dict(self):
        d = asdict(self)
        d['param_stderr'] = dict(zip(('mean_level', 'visibility', 'phase_offset'),
                                     self.param_stderr))
        return d


@dataclass(frozen=True)
class Estimate:
    '''
    A value with statistical and systematic uncertainty.

    ::

        >>> Estimate(1.0, 0.3, 0.4).uncertainty
        0.5

    '''

    value: float
    stat: float = 0.0
    sys: float = 0.0

    def __post_init__(self):
        if self.stat < 0 or self.sys < 0:
            raise DomainError('uncertainties must not be negative')

    @property
    def uncertainty(self):
        return hypot(self.stat, self.sys)

    def to_dict(self):
        return {'value': self.value, 'stat': self.stat, 'sys': self.sys,
                'uncertainty': self.uncertainty}


@dataclass(frozen=True)
class WeakValueReport:
    re_pi_1: Estimate
    re_pi_2: Estimate
    abs_sigma_1: Estimate
    abs_sigma_2: Estimate
    method_tag: str = 'quadratic'
    first_order: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method_tag not in METHODS:
            raise DomainError('unknown method {}'.format(self.method_tag))

    def to_dict(self):
        d = {name: getattr(self, name).to_dict()
             for name in ('re_pi_1', 're_pi_2', 'abs_sigma_1', 'abs_sigma_2')}
        d['method_tag'] = self.method_tag
        d['first_order'] = {k: v.to_dict() for k, v in self.first_order.items()}
        return d


def _canonical_phase(phi):
    phi = (phi + pi) % (2 * pi) - pi
    return pi if phi <= -pi else phi


def _check_grid(phases):
    if len(phases) < MIN_RECORDS:
        raise FitError('need at least {} points, got {}'.format(MIN_RECORDS, len(phases)))
    ordered = np.sort(phases)
    steps = np.diff(ordered)
    if not np.any(steps > 0):
        raise FitError('degenerate phase grid: all phases equal')
    span = ordered[-1] - ordered[0] + np.median(steps[steps > 0])
    if span < 2 * pi * (1 - 1e-9):
        raise FitError('phases span {:.3f} rad, less than one period'.format(span))


def _from_linear(c, cov):
    'Map (c0, c1, c2) and their covariance to (A, V, φ0), standard errors and noise floor.'
    c0, c1, c2 = c
    r = hypot(c1, c2)
    if r > 1e-12 * abs(c0):
        jac = np.array([
            [1.0, 0.0, 0.0],
            [-r / c0 ** 2, c1 / (r * c0), c2 / (r * c0)],
            [0.0, -c2 / r ** 2, c1 / r ** 2],
        ])
        stderr = np.sqrt(np.clip(np.diag(jac @ cov @ jac.T), 0, None))
        phase_offset = _canonical_phase(atan2(c2, c1))
    else:
        # no fringe: the phase is undetermined
        stderr = np.array([sqrt(max(cov[0, 0], 0)),
                           sqrt(max((cov[1, 1] + cov[2, 2]) / 2, 0)) / c0,
                           pi])
        phase_offset = 0.0
    noise = sqrt(max(cov[1, 1] + cov[2, 2], 0)) / c0
    return c0, r / c0, phase_offset, tuple(float(x) for x in stderr), float(noise)


def _design(phases):
    return np.column_stack([np.ones_like(phases), -np.cos(phases), -np.sin(phases)])


def fit_arrays(phases, values, method='linear'):
    '''
    Fit ``A(1 - V cos(φ - φ0))`` to the points (``phases``, ``values``).

    ::

        >>> phases = np.linspace(0, 2 * np.pi, 24, endpoint=False)
        >>> fit = fit_arrays(phases, 100 * (1 - 0.5 * np.cos(phases - 1.0)))
        >>> round(fit.visibility, 9), round(fit.phase_offset, 9)
        (0.5, 1.0)

    '''
    if method not in FIT_METHODS:
        raise DomainError('unknown fit method {}'.format(method))
    phases = np.asarray(phases, dtype=float)
    values = np.asarray(values, dtype=float)
    if phases.shape != values.shape:
        raise FitError('phases and values differ in length')
    _check_grid(phases)
    X = _design(phases)
    c, _, rank, _ = np.linalg.lstsq(X, values, rcond=None)
    if rank < 3:
        raise FitError('phase grid does not determine a sinusoid')
    dof = max(len(phases) - 3, 1)
    if method == 'poisson':
        def pearson(p):
            model = X @ p
            return (values - model) / np.sqrt(np.clip(model, 1.0, None))
        result = least_squares(pearson, c, method='lm')
        if not result.success:
            raise FitError('poisson refinement failed: {}'.format(result.message))
        c = result.x
        chi2 = float(np.sum(result.fun ** 2))
        jtj = result.jac.T @ result.jac
        cov = np.linalg.pinv(jtj) * chi2 / dof
    else:
        residual = values - X @ c
        cov = np.linalg.pinv(X.T @ X) * float(residual @ residual) / dof
    if not c[0] > 0:
        raise FitError('fitted mean level {} is not positive'.format(c[0]))
    A, V, phase_offset, stderr, noise = _from_linear(c, cov)
    if V > 1:
        logger.warning('fitted visibility %.4f exceeds 1, clipped', V)
        V = 1.0
    rms = float(np.sqrt(np.mean((values - X @ c) ** 2)))
    logger.debug('fit %s: A=%.6g V=%.6g phi0=%.6g', method, A, V, phase_offset)
    return FringeFit(float(A), float(V), float(phase_offset), rms, stderr, method, noise)


def fit_fringe(records, method='linear'):
    '''
    Fit count records. Bins of unequal duration are rescaled
    to the mean duration first.
    '''
    records = list(records)
    if len(records) < MIN_RECORDS:
        raise FitError('need at least {} records, got {}'.format(MIN_RECORDS, len(records)))
    phases = np.array([r.phase for r in records])
    durations = np.array([r.duration for r in records])
    counts = np.array([r.counts for r in records], dtype=float)
    counts = counts * durations.mean() / durations
    return fit_arrays(phases, counts, method)


def mean_counts(records):
    '''
    Mean count per bin and its standard deviation of the mean.
    A single bin falls back to the Poisson √N.
    '''
    counts = np.array([r.counts for r in records], dtype=float)
    if counts.size == 0:
        raise DomainError('no records')
    mean = float(counts.mean())
    if counts.size == 1:
        return mean, sqrt(mean)
    return mean, float(counts.std(ddof=1) / sqrt(counts.size))


def intensity_drop(n0, nk, sdm0=0.0, sdmk=0.0, sdm_factor=1.0):
    '''
    Relative intensity decrease (⟨N0⟩ - ⟨Nk⟩)/⟨N0⟩.

    ::

        >>> round(intensity_drop(2526, 2146).value, 4)
        0.1504

    '''
    if not n0 > 0:
        raise DomainError('reference count {} must be positive'.format(n0))
    value = (n0 - nk) / n0
    stat = sdm_factor * hypot(sdmk / n0, nk * sdm0 / n0 ** 2)
    return Estimate(float(value), float(stat))


def propagate_delta_uncertainty(delta_sigma, phi=0.0, exact=False):
    '''
    Systematic bound on Re<Π_k>_w from an orthogonality error ``delta_sigma``:
    |<Π1>_w| at δ = ``delta_sigma``. The small-angle form gives ``delta_sigma``
    itself, ``exact=True`` evaluates the closed form with δ2 = 0.

    ::

        >>> round(propagate_delta_uncertainty(radians(2)), 4)
        0.0349

    '''
    if delta_sigma < 0:
        raise DomainError('delta_sigma {} must not be negative'.format(delta_sigma))
    if not exact:
        return float(delta_sigma)
    pi1, _ = generalized_weak_values(ImperfectionAngles(delta_sigma, 0.0), phi)
    return abs(pi1)


def intensity_change_uncertainty(delta_sigma, phi=0.0, reflectance=None):
    '''
    Uncertainty of a measured intensity change caused by ``delta_sigma``:
    relative to the change, or absolute when ``reflectance`` is given.
    '''
    bound = propagate_delta_uncertainty(delta_sigma, phi)
    return bound if reflectance is None else reflectance * bound


def estimate_pi_weak(mean_no_filter, mean_filtered, R, sdm_no_filter=0.0, sdm_filtered=0.0,
                     sdm_factor=1.0, delta_sigma=0.0, phi=0.0):
    '''
    Re<Π_k>_w as measured absorption over predicted absorption R.

    ::

        >>> round(estimate_pi_weak(2526, 2146, 0.148).value, 4)
        1.0165

    '''
    if R == 0:
        raise DomainError('reflectance R = 0: no absorption to compare with')
    if not 0 < R <= 1:
        raise DomainError('reflectance {} outside (0, 1]'.format(R))
    drop = intensity_drop(mean_no_filter, mean_filtered, sdm_no_filter, sdm_filtered, sdm_factor)
    return Estimate(drop.value / R, drop.stat / R, propagate_delta_uncertainty(delta_sigma, phi))


def _quadratic_sigma(vis, s, re_pi):
    c = 1 - s * s * re_pi
    disc = 1 - vis * vis * c
    if disc < 0:
        raise NoSolutionError(
            'visibility {:.4f} at coupling {:.4f} and Re<Pi> = {:.4f} has no real |W| '
            '(discriminant {:.3g})'.format(vis, s, re_pi, disc))
    w = vis * c / (s * (1 + sqrt(disc)))
    slope_denominator = 2 * s * (1 - vis * s * w)
    slope = (s * s * w * w + c) / slope_denominator if slope_denominator > 0 else float('inf')
    return w, slope


def estimate_sigma_weak(visibility, theta, visibility_scale=1.0, pi_weak=0.0, method='quadratic',
                        visibility_stderr=0.0, residual_floor=0.0):
    '''
    |<σ_circ Π_k>_w| from a fringe visibility measured at rotation ``theta``.

    ``first_order`` returns (V/V_m)/(2θ). ``quadratic`` solves

        V' = 2 s|W| / (1 - s² Re<Π> + s²|W|²),   s = sin θ,   V' = V/V_m

    for the root that goes to zero with V'. With s = sin θ the inversion
    is exact for ideal states.

    ``residual_floor`` is a visibility subtracted in quadrature
    before scaling; 0 disables it.

    ::

        >>> round(estimate_sigma_weak(0.24, radians(10), 0.72, method='first_order').value, 3)
        0.955

    '''
    if theta == 0:
        raise DomainError('theta = 0 carries no polarization information')
    if not 0 < visibility_scale <= 1:
        raise DomainError('visibility_scale {} outside (0, 1]'.format(visibility_scale))
    if visibility < 0:
        raise DomainError('visibility {} must not be negative'.format(visibility))
    if method not in METHODS:
        raise DomainError('unknown method {}'.format(method))
    if residual_floor > 0:
        visibility = sqrt(max(visibility ** 2 - residual_floor ** 2, 0.0))
    vis = visibility / visibility_scale
    theta = abs(theta)
    if method == 'first_order':
        w, slope = vis / (2 * theta), 1 / (2 * theta)
    else:
        w, slope = _quadratic_sigma(vis, sin(theta), complex(pi_weak).real)
    stat = abs(slope) * visibility_stderr / visibility_scale
    return Estimate(float(w), float(stat))


def _average(estimates):
    'Unweighted mean; the uncertainty is the mean of the uncertainties.'
    n = len(estimates)
    return Estimate(sum(e.value for e in estimates) / n,
                    sum(e.stat for e in estimates) / n,
                    sum(e.sys for e in estimates) / n)


def visibility_uncertainty(cfg, sigma):
    '''
    Largest change of the scaled visibility when θ1 and θ2 are each
    off by ±``sigma``.
    '''
    if sigma < 0:
        raise DomainError('sigma {} must not be negative'.format(sigma))
    nominal = exact_visibility(cfg.t1, cfg.t2, cfg.theta1, cfg.theta2)
    spread = max(abs(exact_visibility(cfg.t1, cfg.t2, cfg.theta1 + a, cfg.theta2 + b) - nominal)
                 for a in (-sigma, 0, sigma) for b in (-sigma, 0, sigma))
    return cfg.visibility_scale * spread


def _sigma_for_arm(rotations, visibility_scale, pi_weak, method, residual_floor):
    chosen, first = [], []
    for theta, vis, stderr in rotations:
        first.append(estimate_sigma_weak(vis, theta, visibility_scale, pi_weak, 'first_order',
                                         stderr, residual_floor))
        if method == 'first_order':
            chosen.append(first[-1])
            continue
        try:
            chosen.append(estimate_sigma_weak(vis, theta, visibility_scale, pi_weak, method,
                                              stderr, residual_floor))
        except NoSolutionError as e:
            logger.warning('%s; using the first-order value', e)
            chosen.append(first[-1])
    return _average(chosen), _average(first)


def weak_value_report(absorption, rotations, R, visibility_scale=1.0, method='quadratic',
                      delta_sigma=0.0, sdm_factor=1.0, residual_floor=0.0):
    '''
    Combine intensity and visibility measurements into a |WeakValueReport|.

    :param absorption: ``{None: (mean, sdm), 1: (mean, sdm), 2: (mean, sdm)}``,
        the mean counts without filter and with the filter in arm 1 or 2
    :param rotations: ``{1: [(theta, V, V_stderr), ...], 2: [...]}``,
        the fitted visibilities with a rotation in arm 1 or 2
    :param R: reflectance of the filter
    '''
    n0, sdm0 = absorption[None]
    pis = {}
    for arm in (1, 2):
        nk, sdmk = absorption[arm]
        pis[arm] = estimate_pi_weak(n0, nk, R, sdm0, sdmk, sdm_factor, delta_sigma)
    sigmas, first = {}, {}
    for arm in (1, 2):
        sigmas[arm], first['abs_sigma_{}'.format(arm)] = _sigma_for_arm(
            rotations[arm], visibility_scale, pis[arm].value, method, residual_floor)
    return WeakValueReport(pis[1], pis[2], sigmas[1], sigmas[2], method, first)


def protocol_configs(cfg, reflectance, thetas=REFERENCE_THETAS):
    '''
    The measurement series of one experiment, keyed
    ``('absorb', None|1|2)`` and ``('rotate', arm, theta)``.
    '''
    t = 1 - reflectance
    neutral = cfg.replace(t1=1.0, t2=1.0, theta1=0.0, theta2=0.0)
    configs = {
        ('absorb', None): neutral,
        ('absorb', 1): neutral.replace(t1=t),
        ('absorb', 2): neutral.replace(t2=t),
    }
    for theta in thetas:
        configs[('rotate', 1, theta)] = neutral.replace(theta1=theta)
        configs[('rotate', 2, theta)] = neutral.replace(theta2=theta)
    return configs


def _sub_seed(seed, index):
    return int(derive_seed(seed, 1000 + index).generate_state(1)[0])


def simulate_protocol(seed, cfg=None, src=None, jitter=None, reflectance=None,
                      thetas=REFERENCE_THETAS, method='quadratic', delta_sigma=0.0,
                      fit_method='linear', workers=None):
    '''
    One complete simulated experiment: the three absorption runs and a
    rotation run per arm and angle, each a Monte Carlo sweep with its own
    seed and jitter draw, analysed into a |WeakValueReport|.
    '''
    cfg = cfg or ExperimentConfig(visibility_scale=0.72)
    src = src or SourceModel.from_experiment(cfg)
    jitter = jitter or JitterModel.off()
    if reflectance is None:
        reflectance = SlideGeometry().reflectance
    configs = protocol_configs(cfg, reflectance, thetas)
    absorption, rotations = {}, {1: [], 2: []}
    for i, (key, c) in enumerate(sorted(configs.items(), key=lambda kv: str(kv[0]))):
        records = simulate_sweep(c, src, jitter, _sub_seed(seed, i), workers)
        if key[0] == 'absorb':
            absorption[key[1]] = mean_counts(records)
        else:
            fit = fit_fringe(records, fit_method)
            rotations[key[1]].append((key[2], *fit.visibility_estimate()))
    return weak_value_report(absorption, rotations, reflectance, cfg.visibility_scale, method,
                             delta_sigma)


@dataclass(frozen=True)
class EnsembleSummary:
    reports: tuple

    NAMES = ('re_pi_1', 're_pi_2', 'abs_sigma_1', 'abs_sigma_2')

    def values(self, name):
        return np.array([getattr(r, name).value for r in self.reports])

    def mean(self, name):
        return float(self.values(name).mean())

    def std(self, name):
        return float(self.values(name).std(ddof=1)) if len(self.reports) > 1 else 0.0

    def coverage(self, name, truth):
        'Fraction of runs whose quoted uncertainty reaches ``truth``.'
        hits = [abs(getattr(r, name).value - truth) <= getattr(r, name).uncertainty
                for r in self.reports]
        return sum(hits) / len(hits)

    def to_dict(self):
        return {name: {'mean': self.mean(name), 'std': self.std(name)} for name in self.NAMES}


def ensemble(seeds, **kw):
    'Repeat ``simulate_protocol`` for each seed.'
    reports = tuple(simulate_protocol(seed, **kw) for seed in seeds)
    logger.info('ensemble of %d experiments done', len(reports))
    return EnsembleSummary(reports)

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
