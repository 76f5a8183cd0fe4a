# encoding: utf-8

"""
Weak values
===========

Weak values are always computed exactly from

    <A>_w = <φ|A|ψ> / <φ|ψ>

The perturbative predictors (absorber shift, rotation probability) are
separate functions, so that they can be compared with the exact closed
forms ``exact_detection_probability`` and ``exact_visibility``.

The predictors are meant for R ≤ ``VALID_R`` and |θ| ≤ ``VALID_THETA``.
Outside of that they still return a value and log a warning.

.. code-block:: py

   import qcheshire.weak as weak

"""

import logging
from dataclasses import dataclass
import cmath
from math import asin, cos, pi, sin, sqrt

import numpy as np

from .errors import DegeneratePostselectionError, DomainError, UndefinedVisibilityError
from .state import (H, PI1, PI2, SIGMA_CIRC_PI1, SIGMA_CIRC_PI2, V, Observable,
                    PolPathState, inner_product)

logger = logging.getLogger(__name__)

VALID_R = 0.2
VALID_THETA = 0.5
ORTHOGONAL_TOL = 1e-9
NORM_TOL = 1e-9
SMALL_IMPERFECTION = pi / 8


@dataclass(frozen=True)
class PrePostPair:
    pre: PolPathState
    post: PolPathState

    def __post_init__(self):
        for name, s in (('pre', self.pre), ('post', self.post)):
            if abs(s.norm2() - 1) > NORM_TOL:
                raise DomainError('{}selected state is not normalized (norm² {})'.format(
                    name, s.norm2()))
        if abs(self.overlap) <= ORTHOGONAL_TOL:
            raise DegeneratePostselectionError(
                'pre- and postselected states are orthogonal (|<post|pre>| = {:.3g})'.format(
                    abs(self.overlap)))

    @property
    def overlap(self):
        return inner_product(self.post, self.pre)


@dataclass(frozen=True)
class ImperfectionAngles:
    '''
    δ1 tilts the arm-1 preselected polarization towards H,
    δ2 tilts the postselected polarization towards V.
    '''

    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        for name in ('delta1', 'delta2'):
            value = getattr(self, name)
            if not abs(value) < SMALL_IMPERFECTION:
                raise DomainError('{} = {} rad is outside |delta| < pi/8'.format(name, value))

    @property
    def delta(self):
        return self.delta1 + self.delta2


def weak_value(obs, pair):
    '''
    <φ|A|ψ> / <φ|ψ>.

    ::

        >>> pair = ideal_pair(0.0)
        >>> weak_value(PI2, pair).real
        1.0

    '''
    m = obs.matrix if isinstance(obs, Observable) else np.asarray(obs, dtype=complex)
    overlap = pair.overlap
    if abs(overlap) <= ORTHOGONAL_TOL:
        raise DegeneratePostselectionError('weak value undefined for orthogonal pair')
    return complex(np.vdot(pair.post.amplitudes, m @ pair.pre.amplitudes)) / overlap


def preselected_state(phi, delta1=0.0):
    '(|1>(cos δ1|V> + sin δ1|H>) + e^{iφ}|2>|H>)/√2 in closed form.'
    arm1 = cos(delta1) * V + sin(delta1) * H
    arm2 = cmath.exp(1j * phi) * H
    return PolPathState(np.concatenate([arm1, arm2]) / sqrt(2))


def postselected_state(delta2=0.0):
    '(|1> + |2>)(cos δ2|H> + sin δ2|V>)/√2 in closed form.'
    pol = cos(delta2) * H + sin(delta2) * V
    return PolPathState(np.concatenate([pol, pol]) / sqrt(2))


def ideal_pair(phi, delta1=0.0, delta2=0.0):
    return PrePostPair(preselected_state(phi, delta1), postselected_state(delta2))


def ideal_weak_values(phi, delta1=0.0, delta2=0.0):
    '''
    The four weak values that make the Cheshire cat, keyed
    ``pi1``, ``pi2``, ``sigma_pi1``, ``sigma_pi2``.
    '''
    pair = ideal_pair(phi, delta1, delta2)
    return {
        'pi1': weak_value(PI1, pair),
        'pi2': weak_value(PI2, pair),
        'sigma_pi1': weak_value(SIGMA_CIRC_PI1, pair),
        'sigma_pi2': weak_value(SIGMA_CIRC_PI2, pair),
    }


def predicted_absorber_shift(pi_weak, R, linear=True):
    '''
    Relative drop of the detection probability caused by an absorber
    of reflectance R in the arm whose presence weak value is ``pi_weak``.

    ``linear=True`` gives R·Re<Π>, otherwise 2(1 - √(1-R))·Re<Π>.

    ::

        >>> round(predicted_absorber_shift(1, 0.148), 6)
        0.148

    '''
    if not 0 <= R <= 1:
        raise DomainError('reflectance {} outside [0, 1]'.format(R))
    if R > VALID_R:
        logger.warning('R = %s beyond the weak-absorption window R <= %s', R, VALID_R)
    re = complex(pi_weak).real
    if linear:
        return R * re
    return 2 * (1 - sqrt(1 - R)) * re


def predicted_rotation_probability(sigma_weak, pi_weak, theta, base):
    'base·(1 + 2θ Im<σΠ> - θ² Re<Π> + θ² |<σΠ>|²)'
    if abs(theta) > VALID_THETA:
        logger.warning('theta = %s rad beyond the weak-rotation window %s', theta, VALID_THETA)
    sigma_weak = complex(sigma_weak)
    return base * (1 + 2 * theta * sigma_weak.imag - theta ** 2 * complex(pi_weak).real
                   + theta ** 2 * abs(sigma_weak) ** 2)


def first_order_probability(sigma_weak, theta, base):
    'base·(1 + 2θ Im<σΠ>)'
    return base * (1 + 2 * theta * complex(sigma_weak).imag)


def generalized_weak_values(imp, phi):
    '''
    Exact (<Π1>_w, <Π2>_w) for the tilted pre- and postselection.

    At sin(δ1 + δ2) = 0 the exact limit <Π1>_w = 0 is returned.
    This is the exact value: at δ = 2°, φ = 0 it gives 0.0337, while the
    small-angle bound of ``propagate_delta_uncertainty`` quotes δ = 0.0349.

    ::

        >>> pi1, pi2 = generalized_weak_values(ImperfectionAngles(0, 0), 0.0)
        >>> pi1, pi2
        (0j, (1+0j))

    '''
    s = sin(imp.delta)
    if s == 0:
        pi1 = 0j
    else:
        denominator = 1 + cmath.exp(1j * phi) * cos(imp.delta2) / s
        if abs(denominator) <= ORTHOGONAL_TOL:
            raise DegeneratePostselectionError(
                'pre- and postselection orthogonal at phi = {}'.format(phi))
        pi1 = 1 / denominator
    return complex(pi1), complex(1 - pi1)


def approximate_pi1_weak(imp, phi):
    'The small-angle form δ·e^{-iφ} of <Π1>_w.'
    return imp.delta * cmath.exp(-1j * phi)


def exact_detection_probability(t1=1.0, t2=1.0, theta1=0.0, theta2=0.0, phi=0.0):
    '''
    P_H = (1/4)[T1 sin²θ1 + T2 cos²θ2 - 2√(T1T2) cos θ2 sin θ1 cos φ]

    ::

        >>> exact_detection_probability()
        0.25

    '''
    for t in (t1, t2):
        if not 0 <= t <= 1:
            raise DomainError('transmission {} outside [0, 1]'.format(t))
    return 0.25 * (t1 * sin(theta1) ** 2 + t2 * cos(theta2) ** 2
                   - 2 * sqrt(t1 * t2) * cos(theta2) * sin(theta1) * cos(phi))


def exact_visibility(t1=1.0, t2=1.0, theta1=0.0, theta2=0.0):
    'V = 2√(T1T2) cos θ2 sin θ1 / (T1 sin²θ1 + T2 cos²θ2)'
    denominator = t1 * sin(theta1) ** 2 + t2 * cos(theta2) ** 2
    if denominator <= 0:
        raise UndefinedVisibilityError(
            'no light reaches the postselection (T1 sin²θ1 + T2 cos²θ2 = {})'.format(denominator))
    return abs(2 * sqrt(t1 * t2) * cos(theta2) * sin(theta1)) / denominator


def approx_visibility(t1=1.0, t2=1.0, theta1=0.0, linear=False):
    '''
    2√(T1/T2)·sin θ1, or (2 + T1 - T2)·sin θ1 with ``linear``.
    Only meaningful for small θ1 and T close to 1.
    '''
    if linear:
        return (2 + t1 - t2) * sin(theta1)
    if t2 <= 0:
        raise UndefinedVisibilityError('T2 = 0 leaves nothing to interfere with')
    return 2 * sqrt(t1 / t2) * sin(theta1)


def offset_from_residual_visibility(visibility):
    '''
    The orthogonality offset δ1 ≈ asin(V/2) implied by a residual
    fringe visibility with no rotation applied.
    '''
    if not 0 <= visibility <= 2:
        raise DomainError('visibility {} outside [0, 2]'.format(visibility))
    return asin(visibility / 2)

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
