"""Qubit density operators, Bloch vectors, square-root lifts and fidelity.

Matrices are plain ``numpy`` arrays of shape (2, 2) and dtype complex128.
Value objects freeze their arrays so they can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BundleUndefinedError, InvalidStateError

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

NORM_TOL = 1e-12
TRACE_TOL = 1e-10
RANK_TOL = 1e-10
DEGENERACY_TOL = 1e-12

for _m in (IDENTITY, *PAULI):
    _m.flags.writeable = False


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def _phase_normalize(v: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Rotate the global phase so the first nonzero component is real positive."""
    for c in v:
        if abs(c) > tol:
            return v * (abs(c) / c)
    return v


def eigenvectors_from_direction(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of ``n . sigma`` for a unit vector ``n``.

    Returns ``(u_plus, u_minus)`` with eigenvalues +1 and -1, phase-fixed
    so that the first nonzero component of each is real positive.
    """
    nx, ny, nz = (float(t) for t in n)
    # pick the better conditioned of the two equivalent unnormalised forms
    if nz >= 0.0:
        u = np.array([1.0 + nz, nx + 1j * ny])
    else:
        u = np.array([nx - 1j * ny, 1.0 - nz])
    u = u / np.linalg.norm(u)
    w = np.array([-np.conj(u[1]), np.conj(u[0])])
    return _phase_normalize(u), _phase_normalize(w)


@dataclass(frozen=True, eq=False)
class QubitState:
    """A 2x2 density operator with its ordered spectral decomposition."""

    matrix: np.ndarray
    p1: float
    p2: float
    u1: np.ndarray
    u2: np.ndarray
    degenerate: bool

    @classmethod
    def from_matrix(cls, rho, atol: float = TRACE_TOL) -> "QubitState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidStateError("matrix has non-finite entries")
        if np.max(np.abs(rho - dagger(rho))) > atol:
            raise InvalidStateError("matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > atol:
            raise InvalidStateError(f"trace is {np.trace(rho).real!r}, expected 1")
        r = [float(np.real(np.trace(rho @ s))) for s in PAULI]
        return from_bloch(BlochVector(*r), tol=atol)

    @property
    def bloch(self) -> BlochVector:
        return to_bloch(self)

    @property
    def purity(self) -> float:
        return self.p1 - self.p2

    def __eq__(self, other):
        if not isinstance(other, QubitState):
            return NotImplemented
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=1e-12))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Purification:
    """A 2x2 amplitude matrix psi projecting to the state psi psi^dagger."""

    psi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "psi", _frozen(self.psi))
        if self.psi.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got {self.psi.shape}")

    @property
    def density(self) -> np.ndarray:
        return self.psi @ dagger(self.psi)

    @property
    def state(self) -> QubitState:
        return QubitState.from_matrix(self.density)


def from_bloch(v, tol: float = NORM_TOL) -> QubitState:
    """Build the state 1/2 (1 + v . sigma)."""
    v = BlochVector(*(float(t) for t in v))
    r = v.norm
    if not math.isfinite(r) or r > 1.0 + tol:
        raise InvalidStateError(f"Bloch vector norm {r!r} exceeds 1")
    if r > 1.0:
        v = BlochVector(v.x / r, v.y / r, v.z / r)
        r = 1.0
    matrix = 0.5 * (IDENTITY + v.x * SIGMA_X + v.y * SIGMA_Y + v.z * SIGMA_Z)
    p1, p2 = 0.5 * (1.0 + r), 0.5 * (1.0 - r)
    degenerate = r <= DEGENERACY_TOL
    if degenerate:
        u1 = np.array([1.0, 0.0], dtype=complex)
        u2 = np.array([0.0, 1.0], dtype=complex)
    else:
        u1, u2 = eigenvectors_from_direction(v.as_array() / r)
    return QubitState(_frozen(matrix), p1, p2, _frozen(u1), _frozen(u2), degenerate)


def to_bloch(s: QubitState) -> BlochVector:
    m = s.matrix
    return BlochVector(2.0 * m[1, 0].real, 2.0 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real)


def spectral(s: QubitState):
    """Return ``(p1, p2, u1, u2)`` with ``p1 >= p2``.

    Each eigenvector has its first nonzero component real and positive.
    For a degenerate spectrum the computational basis is returned and
    ``s.degenerate`` is set.
    """
    return s.p1, s.p2, s.u1, s.u2


def sqrt_lift(s: QubitState, rank_tol: float = RANK_TOL) -> Purification:
    """The Hermitian positive square root of ``s``, as a purification."""
    if s.p2 <= rank_tol:
        raise BundleUndefinedError(
            f"state has rank deficiency (p2 = {s.p2:.3e}); the Uhlmann bundle "
            "is defined for full-rank states only")
    p1 = np.outer(s.u1, np.conj(s.u1))
    p2 = np.outer(s.u2, np.conj(s.u2))
    return Purification(math.sqrt(s.p1) * p1 + math.sqrt(s.p2) * p2)


def fidelity(a: QubitState, b: QubitState) -> float:
    """Root fidelity Tr sqrt(sqrt(a) b sqrt(a)).

    Uses the qubit identity (Tr sqrt(sqrt(a) b sqrt(a)))^2
    = Tr(ab) + 2 sqrt(det a det b).
    """
    ra, rb = to_bloch(a).as_array(), to_bloch(b).as_array()
    tr_ab = 0.5 * (1.0 + float(ra @ rb))
    det_a = 0.25 * max(0.0, 1.0 - float(ra @ ra))
    det_b = 0.25 * max(0.0, 1.0 - float(rb @ rb))
    f2 = tr_ab + 2.0 * math.sqrt(det_a * det_b)
    return min(1.0, math.sqrt(max(0.0, f2)))
