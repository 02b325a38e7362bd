"""Interferometric geometric phase of closed qubit curves.

For a curve rho(k) = p1 |u1><u1| + p2 |u2><u2| with non-degenerate spectrum
and parallel-transported eigenvectors,

    gamma = arg sum_i sqrt(p_i(0) p_i(k)) <u_i(0)|u_i(k)>.

On a closed curve <u1(0)|u1(kappa)> = exp(i theta1) with theta1 fixed by the
solid angle of the normalised Bloch curve, <u2(0)|u2(kappa)> = exp(-i theta1)
and gamma = arg(cos theta1 + i R(0) sin theta1). Two evaluation routes are
provided: ``interferometric_phase`` (solid angle) and ``phase_from_overlaps``
(eigenvector transport).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numerics
from .bloch import QubitState, from_bloch, to_bloch
from .errors import InvalidParameterError, InvalidStateError, UndefinedPhaseError
from .kitaev import TWO_PI, ChainParams, gibbs_bloch_vectors, unit_bloch_vector

# curves closer than this to the maximally mixed state are rejected
CENTER_MARGIN = 1e-6
CLOSURE_TOL = 1e-10
EQUATORIAL_TOL = 1e-12
RAY_ANGLE_TOL = 1e-9
DEFAULT_DENSITY = 4096


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Sampled curve of qubit states, stored as Bloch vectors.

    ``ks`` has shape (N,) and ``bloch`` shape (N, 3). With ``closed=True``
    the first and last samples must coincide.
    """

    ks: np.ndarray
    bloch: np.ndarray
    closed: bool = True

    def __post_init__(self):
        ks = np.array(self.ks, dtype=float)
        bloch = np.array(self.bloch, dtype=float)
        if ks.ndim != 1 or bloch.shape != (ks.size, 3) or ks.size < 3:
            raise InvalidStateError(
                f"need N >= 3 samples with shapes (N,) and (N, 3); got {ks.shape}, {bloch.shape}")
        if np.any(np.linalg.norm(bloch, axis=1) > 1.0 + 1e-12):
            raise InvalidStateError("Bloch vector outside the unit ball")
        if self.closed and np.max(np.abs(bloch[0] - bloch[-1])) > CLOSURE_TOL:
            raise InvalidStateError("curve flagged closed but end points differ")
        ks.flags.writeable = False
        bloch.flags.writeable = False
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "bloch", bloch)

    @classmethod
    def from_states(cls, samples: Sequence[tuple[float, QubitState]],
                    closed: bool = True) -> "ClosedCurve":
        ks = [k for k, _ in samples]
        bloch = [tuple(to_bloch(s)) for _, s in samples]
        return cls(ks, bloch, closed)

    @property
    def samples(self) -> list[tuple[float, QubitState]]:
        return [(float(k), from_bloch(r)) for k, r in zip(self.ks, self.bloch)]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.bloch, axis=1)

    @property
    def is_equatorial(self) -> bool:
        return bool(np.max(np.abs(self.bloch[:, 2])) <= EQUATORIAL_TOL)

    def center_distance(self) -> float:
        """Distance from the maximally mixed state to the sampled polyline."""
        a, b = self.bloch[:-1], self.bloch[1:]
        seg = b - a
        L2 = np.einsum("ij,ij->i", seg, seg)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(L2 > 0, -np.einsum("ij,ij->i", a, seg) / L2, 0.0)
        t = np.clip(t, 0.0, 1.0)
        closest = a + t[:, None] * seg
        return float(np.min(np.linalg.norm(closest, axis=1)))

    def repeated(self, n: int) -> "ClosedCurve":
        """The same closed curve traversed ``n`` times."""
        if not self.closed or n < 1:
            raise InvalidParameterError("only closed curves can be repeated, n >= 1")
        period = self.ks[-1] - self.ks[0]
        ks = np.concatenate([self.ks[:-1] + j * period for j in range(n)] + [[self.ks[0] + n * period]])
        bloch = np.concatenate([self.bloch[:-1]] * n + [self.bloch[-1:]])
        return ClosedCurve(ks, bloch, True)


@dataclass(frozen=True)
class InterferometricResult:
    theta1: float
    r0: float
    gamma: float


def gibbs_curve(params: ChainParams, n_turns: int = 1,
                density: int = DEFAULT_DENSITY) -> ClosedCurve:
    """Closed curve k -> rho(k) over ``n_turns`` Brillouin-zone turns.

    T = 0 gives the curve of ground-state projectors.
    """
    if n_turns < 1 or density < 8:
        raise InvalidParameterError("need n_turns >= 1 and density >= 8")
    ks = np.linspace(0.0, TWO_PI * n_turns, n_turns * density + 1)
    if params.T > 0:
        bloch = gibbs_bloch_vectors(params, ks)
    else:
        bloch = np.array([tuple(unit_bloch_vector(params, k)) for k in ks])
    bloch[-1] = bloch[0]
    return ClosedCurve(ks, bloch, True)


def _require_admissible(curve: ClosedCurve, closed: bool = True):
    if closed and not curve.closed:
        raise UndefinedPhaseError("solid-angle phase needs a closed curve")
    if curve.center_distance() < CENTER_MARGIN:
        raise UndefinedPhaseError(
            "curve passes the maximally mixed state; the interferometric phase "
            "is undefined there")


def planar_winding(curve: ClosedCurve) -> int:
    """Winding number of an equatorial closed curve around the centre."""
    _require_admissible(curve)
    angles = numerics.unwrap(np.arctan2(curve.bloch[:, 1], curve.bloch[:, 0]))
    return int(round((angles[-1] - angles[0]) / TWO_PI))


_REFERENCES = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0],
                        [0, 0, 1], [0, 0, -1]], dtype=float)


def spherical_excess_phase(curve: ClosedCurve) -> float:
    """-1/2 the signed solid angle of the normalised curve, by triangle fan.

    Each edge contributes the signed solid angle of the geodesic triangle it
    forms with a reference direction (Van Oosterom-Strackee formula). The
    reference is the coordinate axis farthest from the curve. The result is
    defined modulo 2 pi.
    """
    _require_admissible(curve)
    r = curve.bloch / curve.norms[:, None]
    mean = r.mean(axis=0)
    candidates = _REFERENCES
    if np.linalg.norm(mean) > 1e-3:
        candidates = np.vstack([candidates, -mean / np.linalg.norm(mean)])
    clearance = (1.0 + candidates @ r.T).min(axis=1)
    P = candidates[int(np.argmax(clearance))]
    a, b = r[:-1], r[1:]
    num = np.cross(a, b) @ P
    den = 1.0 + a @ P + b @ P + np.einsum("ij,ij->i", a, b)
    omega = 2.0 * np.sum(np.arctan2(num, den))
    return -0.5 * omega


def solid_angle_phase(curve: ClosedCurve) -> float:
    """theta1 with <u1(0)|u1(kappa)> = exp(i theta1) for transported u1.

    Exactly equatorial curves get theta1 = pi * winding; other curves use
    ``spherical_excess_phase``.
    """
    _require_admissible(curve)
    if curve.is_equatorial:
        return math.pi * planar_winding(curve)
    return spherical_excess_phase(curve)


def wrap_phase(angle: float) -> float:
    """Map to (-pi, pi], sending values within 1e-12 of -pi to pi."""
    a = math.remainder(angle, TWO_PI)
    return math.pi if a <= -math.pi + 1e-12 else a


def interferometric_phase(curve: ClosedCurve) -> InterferometricResult:
    """gamma = arg(cos theta1 + i R(0) sin theta1) for a closed curve."""
    theta = solid_angle_phase(curve)
    r0 = float(curve.norms[0])
    if curve.is_equatorial:
        # theta is an integer multiple of pi here
        c, s = (-1.0 if round(theta / math.pi) % 2 else 1.0), 0.0
    else:
        c, s = math.cos(theta), math.sin(theta)
    gamma = wrap_phase(math.atan2(r0 * s, c))
    return InterferometricResult(theta1=theta, r0=r0, gamma=gamma)


def _normalize_phases(u: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    first = np.where(np.abs(u[:, 0]) > tol, u[:, 0], u[:, 1])
    return u * (np.abs(first) / first)[:, None]


def eigenpaths(bloch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors u1 (larger eigenvalue) and u2 along a sampled curve.

    Vectorised version of the convention used by ``bloch.spectral``: the
    first nonzero component of every vector is real and positive.
    """
    n = bloch / np.linalg.norm(bloch, axis=1)[:, None]
    nx, ny, nz = n[:, 0], n[:, 1], n[:, 2]
    north = nz >= 0.0
    u = np.where(north[:, None],
                 np.stack([1.0 + nz, nx + 1j * ny], axis=1),
                 np.stack([nx - 1j * ny, 1.0 - nz + 0j], axis=1))
    u = u / np.linalg.norm(u, axis=1)[:, None]
    w = np.stack([-np.conj(u[:, 1]), np.conj(u[:, 0])], axis=1)
    return _normalize_phases(u), _normalize_phases(w)


def gauge_fix(eigenpath) -> np.ndarray:
    """Phase-shift a sampled eigenvector path so it is parallel transported.

    The connection <u|du> between neighbours is taken from the phase of the
    overlap <u_j|u_{j+1}>, accumulated along the path and removed. The
    result is independent of the input's sample-wise phase choice, up to a
    global phase fixed by the first sample, and satisfies <u|du/dk> = 0 to
    second order in the spacing.
    """
    u = np.asarray(eigenpath, dtype=complex)
    if u.ndim != 2 or u.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of vectors, got {u.shape}")
    overlaps = np.einsum("ij,ij->i", np.conj(u[:-1]), u[1:])
    if np.any(np.abs(overlaps) < 1e-8):
        raise numerics.UndersampledError("adjacent eigenvectors are nearly orthogonal")
    phase = np.concatenate([[0.0], np.cumsum(np.angle(overlaps))])
    return u * np.exp(-1j * phase)[:, None]


def _transported_overlaps(curve: ClosedCurve):
    _require_admissible(curve, closed=False)
    u1, u2 = eigenpaths(curve.bloch)
    u1, u2 = gauge_fix(u1), gauge_fix(u2)
    o1 = u1 @ np.conj(u1[0])
    o2 = u2 @ np.conj(u2[0])
    return o1, o2


def phase_profile(curve: ClosedCurve) -> np.ndarray:
    """gamma(k) at every sample; NaN where the overlap sum vanishes (a node)."""
    o1, o2 = _transported_overlaps(curve)
    R = curve.norms
    p1, p2 = 0.5 * (1.0 + R), 0.5 * (1.0 - R)
    total = np.sqrt(p1[0] * p1) * o1 + np.sqrt(p2[0] * p2) * o2
    gamma = np.angle(total)
    gamma = np.where(gamma <= -math.pi + 1e-12, math.pi, gamma)
    return np.where(np.abs(total) < 1e-12, np.nan, gamma)


def phase_from_overlaps(curve: ClosedCurve) -> float:
    """gamma at the last sample, from transported eigenvector overlaps."""
    value = phase_profile(curve)[-1]
    if math.isnan(value):
        raise UndefinedPhaseError("curve ends on a node of the interferometric phase")
    return float(value)


def eigenphases(curve: ClosedCurve) -> tuple[float, float]:
    """Phases of <u_i(0)|u_i(kappa)> for the transported eigenvectors."""
    o1, o2 = _transported_overlaps(curve)
    return float(np.angle(o1[-1])), float(np.angle(o2[-1]))


@dataclass(frozen=True)
class NodeRay:
    """Radial segment {t * direction : 0 < t <= 1} opposite the initial state."""

    direction: tuple[float, float, float]
    angular_tol: float = RAY_ANGLE_TOL

    def is_node(self, state: QubitState) -> bool:
        r = to_bloch(state).as_array()
        norm = np.linalg.norm(r)
        if norm == 0.0:
            return False
        cos = float(np.clip(r @ np.asarray(self.direction) / norm, -1.0, 1.0))
        return math.acos(cos) < self.angular_tol

    def crossings(self, curve: ClosedCurve) -> list[int]:
        """Sample indices j where the equatorial curve crosses the ray in (k_j, k_j+1]."""
        if not curve.is_equatorial or abs(self.direction[2]) > EQUATORIAL_TOL:
            raise InvalidParameterError("ray crossings are only defined in the equatorial plane")
        _require_admissible(curve, closed=False)
        ref = -np.asarray(self.direction)
        cross = ref[0] * curve.bloch[:, 1] - ref[1] * curve.bloch[:, 0]
        dot = curve.bloch[:, :2] @ ref[:2]
        alpha = numerics.unwrap(np.arctan2(cross, dot))
        sector = np.floor((alpha + math.pi) / TWO_PI)
        return [int(j) for j in np.flatnonzero(np.diff(sector) != 0)]


def node_ray(curve_start: QubitState) -> NodeRay:
    """The locus of interferometric nodes for curves starting at ``curve_start``."""
    r = to_bloch(curve_start).as_array()
    norm = float(np.linalg.norm(r))
    if norm <= CENTER_MARGIN:
        raise UndefinedPhaseError("initial state is maximally mixed; no node ray")
    d = -r / norm
    return NodeRay((float(d[0]), float(d[1]), float(d[2])))


def winding_invariant(degree: int, n: int) -> int:
    """The composite Z -> Z -> Z2 map n -> exp(i pi degree n), as +1 or -1."""
    return -1 if (degree * n) % 2 else 1
