# encoding: utf-8

"""
Optical elements
================

Every element is a |Channel|: a list of Kraus operators over the
4-dimensional path ⊗ polarization space.

A channel keeps the branches whose photon stays in the beam apart from the
*loss* branches (a photon scattered out of the beam by an absorber).
On pure states only the single kept branch is applied, without
renormalization. The density-matrix path applies all kept branches and
books the weight of the loss branches as absorbed.

The Brewster slide is a single effective glass interface by default.
``SlideGeometry(interfaces=2)`` gives the two-surface transmission
(1 - R_s)² instead.

.. code-block:: py

   import qcheshire.elements as elements

"""

import logging
from dataclasses import dataclass
from math import atan, cos, sin, sqrt

import numpy as np

from .errors import DomainError
from .state import (DIM, H, I2, I4, PSD_TOL, Arm, DensityMatrix, PolPathState,
                    inner_product, is_unitary, local_operator, path_operator,
                    projector)

logger = logging.getLogger(__name__)

DEFAULT_REFRACTIVE_INDEX = 1.5


def _readonly(m):
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Channel:
    '''
    ``kraus_ops`` are the kept branches, ``loss_ops`` the branches whose
    output leaves the beam. Together they must satisfy Σ K†K ≼ 1.
    '''

    kraus_ops: tuple
    loss_ops: tuple = ()
    name: str = ''

    def __post_init__(self):
        kept = tuple(_readonly(k) for k in self.kraus_ops)
        lost = tuple(_readonly(k) for k in self.loss_ops)
        if not kept:
            raise DomainError('channel {!r} has no kept Kraus operator'.format(self.name))
        for k in kept + lost:
            if k.shape != (DIM, DIM):
                raise DomainError('Kraus operator must be {0}x{0}, got {1}'.format(DIM, k.shape))
        object.__setattr__(self, 'kraus_ops', kept)
        object.__setattr__(self, 'loss_ops', lost)
        lowest = np.linalg.eigvalsh(self.completeness_defect())[0]
        if lowest < -PSD_TOL:
            raise DomainError('channel {!r} violates Σ K†K ≼ 1 (eigenvalue {})'.format(
                self.name, lowest))

    def completeness_defect(self):
        'I - Σ K†K over all branches.'
        total = sum(k.conj().T @ k for k in self.kraus_ops + self.loss_ops)
        return I4 - total

    @property
    def branch(self):
        'The kept branch used on the pure-state path.'
        return self.kraus_ops[0]

    @property
    def is_unitary(self):
        return len(self.kraus_ops) == 1 and not self.loss_ops and is_unitary(self.branch)

    def apply(self, state):
        'Pure-state evolution along the kept branch, no renormalization.'
        if len(self.kraus_ops) != 1:
            raise DomainError('channel {!r} has several kept branches; use apply_density'.format(
                self.name))
        return PolPathState(self.branch @ state.amplitudes)

    def apply_density(self, rho):
        '''
        Returns ``(rho', absorbed)``: the kept part of the evolved density
        matrix and the trace carried away by the loss branches.
        '''
        m = rho.matrix
        kept = sum(k @ m @ k.conj().T for k in self.kraus_ops)
        absorbed = sum(float(np.trace(k @ m @ k.conj().T).real) for k in self.loss_ops)
        return DensityMatrix((kept + kept.conj().T) / 2), absorbed


def identity_channel():
    return Channel((I4,), name='identity')


def compose(*channels):
    '''
    Sequential composition, first channel applied first.
    A loss branch stays lost; a kept branch followed by a loss branch is lost.
    '''
    kept = [I4]
    lost = []
    for ch in channels:
        lost.extend(l @ k for k in kept for l in ch.loss_ops)
        kept = [c @ k for k in kept for c in ch.kraus_ops]
    name = ' * '.join(ch.name for ch in channels)
    return Channel(tuple(kept), tuple(lost), name=name)


def _check_transmission(transmission):
    if not 0 <= transmission <= 1:
        raise DomainError('transmission {} outside [0, 1]'.format(transmission))


def absorber_channel(arm, transmission):
    '''
    Weak absorber in ``arm`` with transmission T.

    The kept branch is 1 - (1 - √T) Π_k, the loss branch √(1 - T) Π_k.

    ::

        >>> ch = absorber_channel(2, 1.0)
        >>> ch.is_unitary
        True

    '''
    _check_transmission(transmission)
    p = projector(arm)
    kept = I4 - (1 - sqrt(transmission)) * p
    loss = (sqrt(1 - transmission) * p,) if transmission < 1 else ()
    logger.debug('absorber arm %s T=%s', int(arm), transmission)
    return Channel((kept,), loss, name='absorber{}'.format(int(arm)))


def rotation_matrix(theta):
    'U(θ) = exp(-iθσ_circ), a rotation of linear polarization by θ.'
    c, s = cos(theta), sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotation_channel(arm, theta):
    return Channel((local_operator(arm, rotation_matrix(theta)),),
                   name='rotation{}'.format(int(arm)))


def phase_channel(arm, phi):
    return Channel((local_operator(arm, np.exp(1j * phi) * I2),),
                   name='phase{}'.format(int(arm)))


BEAM_SPLITTER_2 = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)


def beam_splitter_channel():
    '''
    50-50 beam splitter on the path factor.
    Its phase conventions are absorbed into the variable phase φ,
    so it is the real Hadamard matrix, its own inverse.
    '''
    return Channel((path_operator(BEAM_SPLITTER_2),), name='beam splitter')


def brewster_angle(n):
    '''
    arctan(n) in radians.

    ::

        >>> from math import degrees
        >>> round(degrees(brewster_angle(1.5)), 2)
        56.31

    '''
    if n <= 0:
        raise DomainError('refractive index {} must be positive'.format(n))
    return atan(n)


def _refraction_cosines(n, theta_i):
    if n <= 0:
        raise DomainError('refractive index {} must be positive'.format(n))
    sin_t = sin(theta_i) / n
    if sin_t > 1:
        raise DomainError('total internal reflection: sin(theta_i)/n = {} > 1'.format(sin_t))
    return cos(theta_i), sqrt(1 - sin_t ** 2)


def fresnel_s_reflectance(n, theta_i):
    '''
    Power reflectance of s-polarized light entering a medium of index n.

    ::

        >>> round(fresnel_s_reflectance(1.5, 0.0), 4)
        0.04

    '''
    cos_i, cos_t = _refraction_cosines(n, theta_i)
    r = (cos_i - n * cos_t) / (cos_i + n * cos_t)
    return r * r


def fresnel_p_reflectance(n, theta_i):
    cos_i, cos_t = _refraction_cosines(n, theta_i)
    r = (n * cos_i - cos_t) / (n * cos_i + cos_t)
    return r * r


@dataclass(frozen=True)
class SlideGeometry:
    '''
    A tilted glass slide acting as polarization-selective weak absorber.
    ``filtered_arm`` is 1, 2 or ``None``.
    '''

    refractive_index: float = DEFAULT_REFRACTIVE_INDEX
    incidence_angle: float = atan(DEFAULT_REFRACTIVE_INDEX)
    filtered_arm: object = Arm.ARM2
    interfaces: int = 1

    def __post_init__(self):
        if not self.refractive_index > 1:
            raise DomainError('slide refractive index {} must exceed 1'.format(
                self.refractive_index))
        if not 0 <= self.incidence_angle < np.pi / 2:
            raise DomainError('incidence angle {} outside [0, pi/2)'.format(self.incidence_angle))
        if self.filtered_arm is not None:
            object.__setattr__(self, 'filtered_arm', Arm(self.filtered_arm))
        if self.interfaces not in (1, 2):
            raise DomainError('interfaces must be 1 or 2, got {}'.format(self.interfaces))

    @property
    def reflectance(self):
        return fresnel_s_reflectance(self.refractive_index, self.incidence_angle)

    @property
    def transmission(self):
        return (1 - self.reflectance) ** self.interfaces


def brewster_filter_channel(geometry):
    if geometry.filtered_arm is None:
        return identity_channel()
    return absorber_channel(geometry.filtered_arm, geometry.transmission)


def ideal_postselection():
    '(|1> + |2>)|H>/√2'
    return PolPathState(np.kron(np.array([1, 1]) / sqrt(2), H))


def postselect_H_port1(s, post=None):
    '''
    Project ``s`` onto the postselected state (default: horizontal
    polarization at output port 1) and return the projected state together
    with the detection probability |<φ|s>|².
    '''
    phi = ideal_postselection() if post is None else post
    amp = inner_product(phi, s)
    return PolPathState(amp * phi.amplitudes), abs(amp) ** 2


def port1_H_probability(s):
    '''
    The same detection probability obtained by sending ``s`` through the
    recombining beam splitter and keeping |1,H>.
    '''
    out = beam_splitter_channel().apply(s)
    return abs(out.amplitudes[0]) ** 2


def slide_summary(n=DEFAULT_REFRACTIVE_INDEX, theta_i=None):
    '''
    Brewster angle, s and p reflectance and single-interface s transmission
    for a slide of index ``n`` tilted to ``theta_i`` (default Brewster).
    '''
    brewster = brewster_angle(n)
    theta = brewster if theta_i is None else theta_i
    r_s = fresnel_s_reflectance(n, theta)
    return {
        'n': n,
        'brewster_angle_deg': float(np.degrees(brewster)),
        'incidence_angle_deg': float(np.degrees(theta)),
        'r_s': r_s,
        'r_p': fresnel_p_reflectance(n, theta),
        't_single': 1 - r_s,
        't_double': (1 - r_s) ** 2,
    }

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
