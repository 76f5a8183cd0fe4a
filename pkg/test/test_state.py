# encoding: utf-8

import numpy as np
import pytest

from qcheshire.errors import DomainError
from qcheshire.state import (H, I4, IDENTITY, PI1, PI2, SIGMA_CIRC, SIGMA_CIRC_2,
                             SIGMA_CIRC_PI1, SIGMA_CIRC_PI2, V, DensityMatrix, Observable,
                             PolPathState, apply_matrix, inner_product, is_unitary, ket,
                             projector, sigma_circ_eigenbasis)
from qcheshire.weak import postselected_state, preselected_state

RNG = np.random.default_rng(20170516)


def random_state(norm2=1.0):
    a = RNG.normal(size=4) + 1j * RNG.normal(size=4)
    return PolPathState(a / np.linalg.norm(a) * np.sqrt(norm2))


def random_unitary():
    q, r = np.linalg.qr(RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4)))
    return q * (np.diag(r) / abs(np.diag(r)))


def test_inner_product_normalized():
    s = random_state()
    assert abs(inner_product(s, s) - 1) < 1e-12


def test_inner_product_pre_post():
    overlap = inner_product(postselected_state(), preselected_state(0.0))
    assert abs(overlap - 0.5) < 1e-12
    assert abs(abs(overlap) ** 2 - 0.25) < 1e-12


def test_inner_product_orthogonal_basis():
    assert inner_product(ket(1, H), ket(2, V)) == 0


def test_inner_product_conjugates_first():
    a = PolPathState(np.array([1j, 0, 0, 0]))
    b = ket(1, H)
    assert inner_product(a, b) == -1j


def test_apply_matrix():
    s = random_state()
    assert apply_matrix(I4, s) == s
    mixed = PolPathState((ket(1, V).amplitudes + ket(2, H).amplitudes) / np.sqrt(2))
    assert apply_matrix(PI1, mixed) == PolPathState(ket(1, V).amplitudes / np.sqrt(2))
    for arm in (1, 2):
        assert apply_matrix(SIGMA_CIRC, ket(arm, H)) == ket(arm, 1j * V)


def test_apply_matrix_keeps_subnormalized():
    s = random_state(0.5)
    assert abs(apply_matrix(PI1.matrix + PI2.matrix, s).norm2() - 0.5) < 1e-12


def test_apply_matrix_shape():
    with pytest.raises(DomainError):
        apply_matrix(np.eye(2), ket(1, H))


def test_sigma_circ_eigenbasis():
    plus, minus = sigma_circ_eigenbasis()
    assert np.allclose(SIGMA_CIRC_2 @ plus, plus, atol=1e-12)
    assert np.allclose(SIGMA_CIRC_2 @ minus, -minus, atol=1e-12)
    assert abs(np.vdot(plus, minus)) < 1e-12


def test_state_norm_bound():
    with pytest.raises(DomainError):
        PolPathState(np.array([1, 1, 0, 0]))
    with pytest.raises(DomainError):
        PolPathState(np.zeros(3))


def test_state_is_immutable():
    s = ket(1, H)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


@pytest.mark.parametrize('repeat', range(20))
def test_unitary_preserves_norm(repeat):
    u = random_unitary()
    s = random_state(RNG.uniform(0.1, 1.0))
    assert is_unitary(u)
    assert abs(apply_matrix(u, s).norm2() - s.norm2()) < 1e-12


def test_projectors():
    assert np.allclose(PI1.matrix + PI2.matrix, I4)
    for p in (PI1, PI2):
        assert np.allclose(p.matrix @ p.matrix, p.matrix)


@pytest.mark.parametrize('arm', [1, 2])
def test_sigma_circ_projector_squares_to_projector(arm):
    sp = (SIGMA_CIRC_PI1 if arm == 1 else SIGMA_CIRC_PI2).matrix
    assert np.array_equal(sp @ sp, projector(arm))


def test_observable_hermitian():
    assert np.array_equal(IDENTITY.matrix, I4)
    with pytest.raises(DomainError):
        Observable(np.triu(np.ones((4, 4))))


def test_density_from_pure_state():
    s = random_state(0.7)
    rho = s.density()
    assert abs(rho.trace() - 0.7) < 1e-12
    assert abs(rho.purity() - rho.trace() ** 2) < 1e-12
    normalized = DensityMatrix(rho.matrix / rho.trace())
    assert abs(normalized.purity() - 1) < 1e-12


def test_density_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([1.0, -0.5, 0.5, 0]))
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(4))


def test_density_overlap():
    rho = ket(2, H).density()
    assert abs(rho.overlap(postselected_state()) - 0.5) < 1e-12
    assert abs(rho.expectation(PI2) - 1) < 1e-12
