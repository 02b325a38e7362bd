import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from mixphase.bloch import (SIGMA_X, BlochVector, QubitState, dagger, fidelity,
                            from_bloch, spectral, sqrt_lift, to_bloch)
from mixphase.errors import BundleUndefinedError, InvalidStateError

HALF_IDENTITY = 0.5 * np.eye(2)


def ball_vectors(max_norm=1.0):
    return st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1),
                     st.floats(0.0, max_norm)).filter(
        lambda t: t[0] ** 2 + t[1] ** 2 + t[2] ** 2 > 1e-6).map(
        lambda t: tuple(t[3] * np.array(t[:3]) / np.linalg.norm(t[:3])))


def random_state(rng, max_norm=1.0):
    v = rng.normal(size=3)
    return from_bloch(v / np.linalg.norm(v) * rng.uniform(0, max_norm))


def test_from_bloch_center_is_maximally_mixed():
    s = from_bloch((0, 0, 0))
    np.testing.assert_allclose(s.matrix, HALF_IDENTITY)
    assert s.p1 == s.p2 == 0.5
    assert s.degenerate


def test_from_bloch_pure_plus_state():
    s = from_bloch((1, 0, 0))
    np.testing.assert_allclose(s.matrix, 0.5 * np.ones((2, 2)))
    assert (s.p1, s.p2) == (1.0, 0.0)


def test_from_bloch_eigenvalues_match_gibbs_formula():
    # Delta_k = 2, T = 1: p1,2 = (1 +- tanh(1)) / 2
    s = from_bloch((math.tanh(1.0), 0, 0))
    assert s.p1 == pytest.approx(0.5 * (1 + math.tanh(1.0)), abs=1e-15)
    assert s.p2 == pytest.approx(0.5 * (1 - math.tanh(1.0)), abs=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(s.matrix), [s.p2, s.p1], atol=1e-14)


def test_from_bloch_rejects_outside_ball():
    with pytest.raises(InvalidStateError):
        from_bloch((1.0 + 1e-9, 0, 0))


def test_to_bloch_examples():
    assert to_bloch(QubitState.from_matrix(HALF_IDENTITY)) == (0.0, 0.0, 0.0)
    assert to_bloch(QubitState.from_matrix(0.5 * (np.eye(2) + SIGMA_X))) == (1.0, 0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(ball_vectors())
def test_bloch_round_trip(v):
    s = from_bloch(v)
    np.testing.assert_allclose(to_bloch(s), v, atol=1e-12)
    np.testing.assert_allclose(from_bloch(to_bloch(s)).matrix, s.matrix, atol=1e-12)


@pytest.mark.parametrize("phi", [0.0, 0.4, 2.0, -2.9, math.pi])
@pytest.mark.parametrize("purity", [0.2, 0.9, 1.0])
def test_equatorial_eigenvectors(phi, purity):
    rho = 0.5 * np.array([[1, purity * np.exp(-1j * phi)], [purity * np.exp(1j * phi), 1]])
    p1, p2, u1, u2 = spectral(QubitState.from_matrix(rho))
    assert p1 - p2 == pytest.approx(purity, abs=1e-14)
    np.testing.assert_allclose(u1, np.array([1, np.exp(1j * phi)]) / math.sqrt(2), atol=1e-14)
    np.testing.assert_allclose(u2, np.array([1, -np.exp(1j * phi)]) / math.sqrt(2), atol=1e-14)


def test_degenerate_spectrum_flagged_with_orthonormal_pair():
    p1, p2, u1, u2 = spectral(QubitState.from_matrix(HALF_IDENTITY))
    assert QubitState.from_matrix(HALF_IDENTITY).degenerate
    assert abs(np.vdot(u1, u2)) < 1e-15


@settings(max_examples=100, deadline=None)
@given(ball_vectors())
def test_spectral_reconstruction_and_phase_convention(v):
    s = from_bloch(v)
    p1, p2, u1, u2 = spectral(s)
    assert p1 >= p2 >= 0 and p1 + p2 == pytest.approx(1.0, abs=1e-15)
    recon = p1 * np.outer(u1, u1.conj()) + p2 * np.outer(u2, u2.conj())
    np.testing.assert_allclose(recon, s.matrix, atol=1e-12)
    gram = np.array([[np.vdot(a, b) for b in (u1, u2)] for a in (u1, u2)])
    np.testing.assert_allclose(gram, np.eye(2), atol=1e-12)
    for u in (u1, u2):
        first = u[np.flatnonzero(np.abs(u) > 1e-14)[0]]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_from_matrix_rejects_non_hermitian_and_bad_trace():
    with pytest.raises(InvalidStateError):
        QubitState.from_matrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(InvalidStateError):
        QubitState.from_matrix(np.eye(2))


def test_sqrt_lift_of_maximally_mixed():
    psi = sqrt_lift(from_bloch((0, 0, 0))).psi
    np.testing.assert_allclose(psi, np.eye(2) / math.sqrt(2), atol=1e-15)


def test_sqrt_lift_rejects_pure_state():
    with pytest.raises(BundleUndefinedError):
        sqrt_lift(from_bloch((0, 1, 0)))


def test_sqrt_lift_equatorial_spectrum():
    s = from_bloch((0.8 * math.cos(1.1), 0.8 * math.sin(1.1), 0))  # p1 = 0.9
    psi = sqrt_lift(s).psi
    np.testing.assert_allclose(psi, dagger(psi), atol=1e-15)
    np.testing.assert_allclose(psi @ s.u1, math.sqrt(0.9) * s.u1, atol=1e-14)
    np.testing.assert_allclose(psi @ s.u2, math.sqrt(0.1) * s.u2, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(ball_vectors(max_norm=0.999))
def test_sqrt_lift_projects_back(v):
    s = from_bloch(v)
    lift = sqrt_lift(s)
    np.testing.assert_allclose(lift.psi @ lift.psi, s.matrix, atol=1e-12)
    np.testing.assert_allclose(lift.density, s.matrix, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(lift.psi) > 0)


def _fidelity_by_matrix_roots(a, b):
    ra = scipy.linalg.sqrtm(a.matrix)
    return float(np.real(np.trace(scipy.linalg.sqrtm(ra @ b.matrix @ ra))))


def test_fidelity_examples():
    s = from_bloch((0.3, -0.2, 0.5))
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(from_bloch((1, 0, 0)), from_bloch((-1, 0, 0))) == pytest.approx(0.0, abs=1e-12)
    a, b = from_bloch((0, 0, 0)), from_bloch((1, 0, 0))
    # closed form: sqrt(1/2) for the maximally mixed vs a pure state
    assert fidelity(a, b) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert fidelity(a, b) == pytest.approx(_fidelity_by_matrix_roots(a, b), abs=1e-10)


def test_fidelity_agrees_with_matrix_square_roots():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b = random_state(rng, 0.999), random_state(rng, 0.999)
        assert fidelity(a, b) == pytest.approx(_fidelity_by_matrix_roots(a, b), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(ball_vectors(), ball_vectors())
def test_fidelity_symmetric_and_bounded(v, w):
    a, b = from_bloch(v), from_bloch(w)
    f = fidelity(a, b)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity(b, a), abs=1e-15)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
