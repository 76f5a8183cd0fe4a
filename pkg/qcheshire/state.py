# encoding: utf-8

"""
State layer
===========

Exact linear algebra over path (arms 1, 2) tensored with polarization (H, V).

The basis order is fixed everywhere in ``qcheshire``::

    |1,H>, |1,V>, |2,H>, |2,V>

which is ``numpy.kron(path, polarization)``.

States may be sub-normalized: absorbers only ever remove norm.

.. code-block:: py

   import qcheshire.state as state

"""

import logging
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

ATOL = 1e-12
PSD_TOL = 1e-10
DIM = 4

BASIS = ('1H', '1V', '2H', '2V')


class Arm(IntEnum):
    ARM1 = 1
    ARM2 = 2


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


H = _frozen([1, 0])
V = _frozen([0, 1])
I2 = _frozen(np.eye(2))
I4 = _frozen(np.eye(DIM))
SIGMA_CIRC_2 = _frozen([[0, -1j], [1j, 0]])


def path_vector(arm):
    v = np.zeros(2, dtype=complex)
    v[Arm(arm) - 1] = 1
    return v


def path_projector_2(arm):
    p = path_vector(arm)
    return np.outer(p, p.conj())


def local_operator(arm, m2):
    '''
    Lift a 2×2 polarization matrix ``m2`` to act on arm ``arm`` only,
    identity on the other arm.
    '''
    arm = Arm(arm)
    other = Arm.ARM2 if arm == Arm.ARM1 else Arm.ARM1
    return np.kron(path_projector_2(arm), m2) + np.kron(path_projector_2(other), I2)


def path_operator(m2):
    'Lift a 2×2 path matrix to the full space, identity on polarization.'
    return np.kron(m2, I2)


def projector(arm):
    'Π_k'
    return np.kron(path_projector_2(arm), I2)


SIGMA_CIRC = _frozen(np.kron(I2, SIGMA_CIRC_2))


def sigma_circ_projector(arm):
    'σ_circ Π_k'
    return SIGMA_CIRC @ projector(arm)


@dataclass(frozen=True)
class PolPathState:
    '''
    Amplitudes over ``BASIS``.
    The squared norm must lie in [0, 1 + 1e-12].

    ::

        >>> s = ket(1, V)
        >>> round(s.norm2(), 12)
        1.0

    '''

    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen(self.amplitudes)
        if a.shape != (DIM,):
            raise DomainError('state needs {} amplitudes, got shape {}'.format(DIM, a.shape))
        n2 = float(np.vdot(a, a).real)
        if n2 > 1 + ATOL:
            raise DomainError('state norm² {} exceeds 1'.format(n2))
        object.__setattr__(self, 'amplitudes', a)

    def norm2(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def arm(self, arm):
        'The polarization amplitudes (H, V) in ``arm``.'
        i = 2 * (Arm(arm) - 1)
        return self.amplitudes[i:i + 2]

    def scaled(self, factor):
        return PolPathState(self.amplitudes * factor)

    def normalized(self):
        n2 = self.norm2()
        if n2 <= 0:
            raise DomainError('cannot normalize the zero state')
        return PolPathState(self.amplitudes / np.sqrt(n2))

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __add__(self, other):
        return PolPathState(self.amplitudes + other.amplitudes)

    def __eq__(self, other):
        if not isinstance(other, PolPathState):
            return NotImplemented
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=ATOL))

    def __hash__(self):
        return hash(tuple(np.round(self.amplitudes, 12)))


def product(path, pol):
    'The product state path ⊗ polarization from two 2-vectors.'
    return PolPathState(np.kron(np.asarray(path, dtype=complex), np.asarray(pol, dtype=complex)))


def ket(arm, pol):
    'Basis ket |arm, pol> where ``pol`` is ``H``, ``V`` or any 2-vector.'
    return product(path_vector(arm), pol)


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (DIM, DIM):
            raise DomainError('observable must be {0}x{0}, got {1}'.format(DIM, m.shape))
        if not np.allclose(m, m.conj().T, rtol=0, atol=ATOL):
            raise DomainError('observable is not Hermitian')
        object.__setattr__(self, 'matrix', m)


PI1 = Observable(projector(1))
PI2 = Observable(projector(2))
SIGMA_CIRC_PI1 = Observable(sigma_circ_projector(1))
SIGMA_CIRC_PI2 = Observable(sigma_circ_projector(2))
IDENTITY = Observable(I4)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    '''
    Hermitian, positive semidefinite, trace in [0, 1].
    Used as the brute-force representation of lossy evolution.
    '''

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (DIM, DIM):
            raise DomainError('density matrix must be {0}x{0}'.format(DIM))
        if not np.allclose(m, m.conj().T, rtol=0, atol=ATOL):
            raise DomainError('density matrix is not Hermitian')
        tr = float(np.trace(m).real)
        if tr < -ATOL or tr > 1 + ATOL:
            raise DomainError('density matrix trace {} outside [0, 1]'.format(tr))
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -PSD_TOL:
            raise DomainError('density matrix has negative eigenvalue {}'.format(lowest))
        object.__setattr__(self, 'matrix', m)

    def trace(self):
        return float(np.trace(self.matrix).real)

    def purity(self):
        return float(np.trace(self.matrix @ self.matrix).real)

    def expectation(self, obs):
        m = obs.matrix if isinstance(obs, Observable) else obs
        return complex(np.trace(m @ self.matrix))

    def overlap(self, state):
        '<φ|ρ|φ>, i.e. Tr(|φ><φ| ρ).'
        a = state.amplitudes
        return float(np.vdot(a, self.matrix @ a).real)


def inner_product(a, b):
    '''
    <a|b>, conjugating the first argument.

    ::

        >>> inner_product(ket(1, H), ket(2, V))
        0j

    '''
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply_matrix(m, s):
    'm·s without renormalization.'
    m = m.matrix if isinstance(m, Observable) else np.asarray(m, dtype=complex)
    if m.shape != (DIM, DIM):
        raise DomainError('matrix must be {0}x{0}, got {1}'.format(DIM, m.shape))
    return PolPathState(m @ s.amplitudes)


def sigma_circ_eigenbasis():
    '''
    The polarization factors |+> = (|H> + i|V>)/√2 and |-> = (|H> - i|V>)/√2,
    with σ_circ|±> = ±|±>.
    '''
    plus = (H + 1j * V) / np.sqrt(2)
    minus = (H - 1j * V) / np.sqrt(2)
    return _frozen(plus), _frozen(minus)


def is_unitary(m, atol=ATOL):
    m = np.asarray(m)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=atol))

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
