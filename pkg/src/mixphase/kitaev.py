"""Momentum-space Kitaev chain: band gap, Bloch vectors and Gibbs states.

With hopping ``w``, pairing ``M`` and ``m = mu/2`` the Bloch Hamiltonian is
``-(Delta_k / 2) n_k . sigma`` with

    d_k     = (m + w cos k, M sin k, 0)
    Delta_k = 2 |d_k|,   n_k = d_k / |d_k|.

The default ``w = M = 1`` is the convention every figure and sweep uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .bloch import BlochVector, QubitState, from_bloch
from .errors import (InvalidParameterError, UndefinedAngleError,
                     UndefinedStateError)

TWO_PI = 2.0 * math.pi

DEFAULT_M_GRID = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25)
DEFAULT_T_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)

# minimum samples per Brillouin-zone turn used when unwrapping the angle
UNWRAP_POINTS_PER_TURN = 1000
_MAX_UNWRAP_POINTS_PER_TURN = 2_000_000


@dataclass(frozen=True)
class ChainParams:
    m: float
    T: float = 0.0
    w: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        for name in ("m", "T", "w", "M"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v!r}")
        if self.T < 0:
            raise InvalidParameterError(f"temperature must be >= 0, got {self.T!r}")

    def with_T(self, T: float) -> "ChainParams":
        return ChainParams(self.m, T, self.w, self.M)

    @property
    def gap_closes(self) -> bool:
        """True when Delta_k vanishes somewhere in the Brillouin zone."""
        return self.M == 0.0 or abs(self.m) == abs(self.w)


@dataclass(frozen=True)
class MomentumSample:
    k: float
    delta_k: float
    n_k: BlochVector
    phi: float


def bloch_components(params: ChainParams, k):
    """The in-plane components of d_k (scalar or array ``k``)."""
    return params.m + params.w * np.cos(k), params.M * np.sin(k)


def band_gap(params: ChainParams, k):
    """Delta_k = 2 |d_k|; vectorised over ``k``."""
    dx, dy = bloch_components(params, k)
    return 2.0 * np.hypot(dx, dy)


def _closure_points(params: ChainParams) -> list[float]:
    """Momenta in [0, 2pi) where the gap closes."""
    if not params.gap_closes:
        return []
    if params.M == 0.0:
        if abs(params.m) > abs(params.w):
            return []
        if params.w == 0.0:
            return [0.0] if params.m == 0.0 else []
        # whole arcs close; report the two solutions of m + w cos k = 0
        k0 = math.acos(-params.m / params.w)
        return sorted({k0, TWO_PI - k0})
    return [0.0] if params.m == -params.w else [math.pi]


def _at_closure(params: ChainParams, k: float) -> bool:
    for k0 in _closure_points(params):
        if math.isclose(math.remainder(k - k0, TWO_PI), 0.0, abs_tol=1e-14):
            return True
    return False


def unit_bloch_vector(params: ChainParams, k: float) -> BlochVector:
    dx, dy = bloch_components(params, float(k))
    r = math.hypot(dx, dy)
    if r == 0.0 or _at_closure(params, k):
        raise UndefinedStateError(f"band gap closes at k = {k!r} for m = {params.m!r}")
    return BlochVector(dx / r, dy / r, 0.0)


def gibbs_bloch_vectors(params: ChainParams, ks) -> np.ndarray:
    """Bloch vectors tanh(Delta_k / 2T) n_k of the Gibbs states, shape (N, 3)."""
    if params.T <= 0:
        raise InvalidParameterError("Gibbs states need T > 0; use pure_state for T = 0")
    ks = np.asarray(ks, dtype=float)
    dx, dy = bloch_components(params, ks)
    d = np.hypot(dx, dy)
    # tanh(d/T)/d is finite as d -> 0; the Bloch vector itself goes to zero
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(d > 0, np.tanh(d / params.T) / d, 0.0)
    return np.stack([scale * dx, scale * dy, np.zeros_like(ks)], axis=-1)


def gibbs_state(params: ChainParams, k: float) -> QubitState:
    """Thermal state 1/2 (1 + tanh(Delta_k / 2T) n_k . sigma)."""
    return from_bloch(gibbs_bloch_vectors(params, float(k)))


def pure_state(params: ChainParams, k: float) -> QubitState:
    """Ground-state projector, Bloch vector n_k (the T = 0 limit)."""
    return from_bloch(unit_bloch_vector(params, k))


def state(params: ChainParams, k: float) -> QubitState:
    """Gibbs state for T > 0, ground-state projector for T = 0."""
    return gibbs_state(params, k) if params.T > 0 else pure_state(params, k)


def polar_angle_rate(params: ChainParams, k):
    """d phi / dk = M (w + m cos k) / |d_k|^2, vectorised over ``k``."""
    dx, dy = bloch_components(params, k)
    return params.M * (params.w + params.m * np.cos(k)) / (dx * dx + dy * dy)


def raw_polar_angle(params: ChainParams, k):
    """atan2 of the Bloch components, in (-pi, pi]."""
    dx, dy = bloch_components(params, k)
    return np.arctan2(dy, dx)


def _unwrap_density(params: ChainParams, lo: float = 0.0, hi: float = TWO_PI) -> int:
    """Samples per turn so that the angle moves < pi/4 between samples on [lo, hi]."""
    hi = min(hi, lo + TWO_PI)
    probe = np.linspace(lo, hi, 4097)
    dx, dy = bloch_components(params, probe)
    d2_min = float(np.min(dx * dx + dy * dy))
    # |d_k| is extremal at k = 0 and pi (mod 2 pi)
    for k0 in np.arange(math.ceil(lo / math.pi), math.floor(hi / math.pi) + 1) * math.pi:
        x0, y0 = bloch_components(params, float(k0))
        d2_min = min(d2_min, x0 * x0 + y0 * y0)
    rate = abs(params.M) * (abs(params.w) + abs(params.m)) / max(d2_min, 1e-300)
    needed = math.ceil(8.0 * rate)
    if needed > _MAX_UNWRAP_POINTS_PER_TURN:
        raise UndefinedAngleError(
            f"polar angle varies too fast near the gap closure (m = {params.m!r})")
    return max(UNWRAP_POINTS_PER_TURN, needed)


def polar_angles(params: ChainParams, ks) -> np.ndarray:
    """Continuous polar angle phi(k) with phi(0) equal to the atan2 value at 0.

    The branch is fixed by accumulating atan2 increments along a grid of at
    least ``UNWRAP_POINTS_PER_TURN`` points per turn starting from k = 0.
    Raises UndefinedAngleError if a requested point, or the path from 0 to
    it, passes the gap closure where the state is maximally mixed.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    lo, hi = min(0.0, float(ks.min())), max(0.0, float(ks.max()))
    for k0 in _closure_points(params):
        # any closure point inside [lo, hi] breaks continuity
        first = k0 + TWO_PI * math.ceil((lo - k0) / TWO_PI - 1e-15)
        if first <= hi + 1e-14:
            raise UndefinedAngleError(
                f"path from k = 0 to k = {hi if first > 0 else lo!r} passes the "
                f"maximally mixed point at k = {first!r}")
    per_turn = _unwrap_density(params, lo, hi)
    n = max(2, math.ceil(per_turn * (hi - lo) / TWO_PI) + 1)
    grid = np.linspace(lo, hi, n)
    grid_phi = numerics.unwrap(raw_polar_angle(params, grid))
    # re-anchor so that the branch at k = 0 is the principal value
    i0 = int(np.argmin(np.abs(grid)))
    grid_phi -= TWO_PI * np.rint((grid_phi[i0] - raw_polar_angle(params, 0.0)) / TWO_PI)
    raw = raw_polar_angle(params, ks)
    approx = np.interp(ks, grid, grid_phi)
    return raw + TWO_PI * np.rint((approx - raw) / TWO_PI)


def polar_angle(params: ChainParams, k: float) -> float:
    return float(polar_angles(params, [k])[0])


def polar_angle_closed_form(params: ChainParams, k: float) -> float:
    """k/2 + arctan((1-m)/(1+m) tan(k/2)) made continuous across k = pi (mod 2pi).

    Only valid for w = M = 1 and m > -1, m != 1. Used as a cross-check of
    ``polar_angle``.
    """
    m = params.m
    if params.w != 1.0 or params.M != 1.0 or m <= -1.0 or m == 1.0:
        raise UndefinedAngleError("closed form needs w = M = 1 and m in (-1, 1) u (1, inf)")
    c = (1.0 - m) / (1.0 + m)
    sgn = math.copysign(1.0, c)
    half = 0.5 * k
    passes = math.floor((k + math.pi) / TWO_PI)
    if abs(math.cos(half)) < 1e-15:
        # right-hand limit of arctan(c tan(k/2)) at k = pi (mod 2pi)
        branch = -sgn * 0.5 * math.pi
    else:
        branch = math.atan(c * math.tan(half))
    return half + branch + sgn * math.pi * passes


def winding_number(params: ChainParams) -> int:
    """Degree of n_k around the origin over one Brillouin-zone turn."""
    if params.gap_closes:
        raise UndefinedAngleError(
            f"winding number undefined: the curve passes the centre at m = {params.m!r}")
    phi = polar_angles(params, [0.0, TWO_PI])
    return int(round((phi[1] - phi[0]) / TWO_PI))


def momentum_sample(params: ChainParams, k: float) -> MomentumSample:
    return MomentumSample(k=float(k), delta_k=float(band_gap(params, k)),
                          n_k=unit_bloch_vector(params, k),
                          phi=polar_angle(params, k))
