"""Uhlmann parallel transport along equatorial Kitaev Gibbs curves.

For states in the equatorial plane of the Bloch ball the Uhlmann connection
along the square-root lift is abelian, so the gauge factor is

    U(k) = diag(exp(i s A), exp(-i s A)),
    A(k) = 1/2 int_0^k phi'(q) (1 - x(q)) dq,   x = sech(Delta_q / 2T),

and the parallel lift is sqrt(rho(k)) U(k). The default orientation
``s = +1`` is the one whose holonomy trace has the node structure
``(1+x) cos A + (1-x) cos(phi + A)``. Passing ``horizontal=True`` selects
``s = -1``, the lift whose increments satisfy Tr(psi^dag dpsi) real exactly
(|Tr psi(k)^dag psi(k+dk)| equals the root fidelity to third order). Both
orientations agree on closed curves, where phi returns to a multiple of
2 pi; they differ only at intermediate momenta.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import numerics
from .bloch import Purification, dagger
from .errors import (BundleUndefinedError, DegenerateNodeWarning,
                     InvalidParameterError, NumericError, UndefinedPhaseError)
from .kitaev import TWO_PI, ChainParams, bloch_components, raw_polar_angle
from .numerics import QuadratureSpec, RootSpec

DEFAULT_GRID_DENSITY = 4096
NODE_TOL = 1e-8
ROOT_TOL = 1e-10
REALITY_TOL = 1e-10
T_RANGE = (1e-3, 1e3)
SCAN_TOL = 1e-7


def sech(z: float) -> float:
    z = abs(z)
    return 0.0 if z > 700.0 else 1.0 / math.cosh(z)


def one_minus_sech(z: float) -> float:
    """1 - sech(z) without cancellation for small z."""
    z = abs(z)
    if z > 40.0:
        return 1.0 - 2.0 * math.exp(-z)
    s = math.sinh(0.5 * z)
    return 2.0 * s * s / math.cosh(z)


def _require_mixed(params: ChainParams):
    if params.T <= 0:
        raise BundleUndefinedError(
            "Uhlmann transport needs T > 0: the bundle is undefined for pure states")


def _orientation(horizontal: bool) -> float:
    return -1.0 if horizontal else 1.0


def x_value(params: ChainParams, k: float) -> float:
    """x = sech(Delta_k / 2T), so that (sqrt(p1) -+ sqrt(p2))^2 = 1 -+ x."""
    _require_mixed(params)
    dx, dy = bloch_components(params, k)
    return sech(math.hypot(dx, dy) / params.T)


def connection_angle_rate(params: ChainParams, k: float) -> float:
    """dA/dk = 1/2 phi'(k) (sqrt(p1) - sqrt(p2))^2 = 1/2 phi'(k) (1 - x)."""
    _require_mixed(params)
    c, s = math.cos(k), math.sin(k)
    dx = params.m + params.w * c
    dy = params.M * s
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        # maximally mixed point: (1 - x) vanishes like d^2, phi' like 1/d
        return 0.0
    phi_rate = params.M * (params.w + params.m * c) / d2
    return 0.5 * phi_rate * one_minus_sech(math.sqrt(d2) / params.T)


def _integrate_rate(params: ChainParams, a: float, b: float,
                    spec: QuadratureSpec) -> float:
    # the integrand steepens near k = pi (mod pi) when m -> +-1
    cuts = [j * math.pi for j in range(math.floor(a / math.pi) + 1,
                                       math.ceil(b / math.pi))
            if a < j * math.pi < b]
    points = [a, *cuts, b]
    piece = QuadratureSpec(spec.abs_tol / (len(points) - 1), spec.max_depth)
    f = functools.partial(connection_angle_rate, params)
    return sum(numerics.integrate(f, lo, hi, piece)
               for lo, hi in zip(points[:-1], points[1:]))


@functools.lru_cache(maxsize=8192)
def _turn_angle(params: ChainParams, spec: QuadratureSpec) -> float:
    fine = QuadratureSpec(spec.abs_tol * 0.01, spec.max_depth)
    return _integrate_rate(params, 0.0, TWO_PI, fine)


def accumulate_A(params: ChainParams, k_end: float,
                 quadrature: QuadratureSpec | None = None) -> float:
    """A(k_end) = 1/2 int_0^k_end phi'(1 - x) dk by adaptive Simpson.

    Whole turns use the periodicity of the integrand: A(2 pi n + r) =
    n A(2 pi) + A(r).
    """
    _require_mixed(params)
    if k_end < 0:
        raise InvalidParameterError(f"k_end must be >= 0, got {k_end!r}")
    spec = quadrature or numerics.DEFAULT_QUADRATURE
    turns = math.floor(k_end / TWO_PI)
    rest = k_end - turns * TWO_PI
    if rest < 0.0:
        rest = 0.0
    total = _integrate_rate(params, 0.0, rest, spec) if rest > 0.0 else 0.0
    if turns:
        total += turns * _turn_angle(params, spec)
    return total


def _lift_matrix(x: float, phi: float, angle: float) -> np.ndarray:
    a = math.sqrt(1.0 + x)
    b = math.sqrt(max(0.0, 1.0 - x))
    return 0.5 * np.array([
        [a * np.exp(1j * angle), b * np.exp(-1j * (phi + angle))],
        [b * np.exp(1j * (phi + angle)), a * np.exp(-1j * angle)],
    ])


def parallel_lift(params: ChainParams, k: float,
                  quadrature: QuadratureSpec | None = None,
                  horizontal: bool = False) -> Purification:
    """psi(k) = sqrt(rho(k)) diag(e^{isA}, e^{-isA}); projects onto rho(k)."""
    _require_mixed(params)
    s = _orientation(horizontal)
    A = accumulate_A(params, k, quadrature)
    phi = float(raw_polar_angle(params, k))
    return Purification(_lift_matrix(x_value(params, k), phi, s * A))


def holonomy_trace(params: ChainParams, k: float,
                   quadrature: QuadratureSpec | None = None,
                   horizontal: bool = False) -> float:
    """Tr(psi(0)^dag psi(k)) for the parallel lift; real on equatorial curves."""
    psi0 = parallel_lift(params, 0.0, quadrature, horizontal).psi
    psik = parallel_lift(params, k, quadrature, horizontal).psi
    value = np.trace(dagger(psi0) @ psik)
    if abs(value.imag) > REALITY_TOL:
        raise NumericError(f"holonomy trace has imaginary part {value.imag:.3e}")
    return float(value.real)


def trace_closed_form(params: ChainParams, k: float, A: float | None = None,
                      quadrature: QuadratureSpec | None = None,
                      horizontal: bool = False) -> float:
    """1/2 [a(0) a(k) cos A + b(0) b(k) cos(phi(k) - phi(0) + sA)].

    ``a = sqrt(p1) + sqrt(p2)`` and ``b = sqrt(p1) - sqrt(p2)``.
    """
    _require_mixed(params)
    if A is None:
        A = accumulate_A(params, k, quadrature)
    s = _orientation(horizontal)
    x0, xk = x_value(params, 0.0), x_value(params, k)
    dphi = float(raw_polar_angle(params, k) - raw_polar_angle(params, 0.0))
    a0a = math.sqrt((1.0 + x0) * (1.0 + xk))
    b0b = math.sqrt(max(0.0, (1.0 - x0) * (1.0 - xk)))
    return 0.5 * (a0a * math.cos(A) + b0b * math.cos(dphi + s * A))


def node_function(x: float, phi: float, A: float, horizontal: bool = False) -> float:
    """1/2 [(1 + x) cos A + (1 - x) cos(phi + sA)] for equal endpoint spectra."""
    s = _orientation(horizontal)
    return 0.5 * ((1.0 + x) * math.cos(A) + (1.0 - x) * math.cos(phi + s * A))


@dataclass(frozen=True)
class TransportState:
    k: float
    A: float
    trace_value: float
    sign: int


@dataclass(frozen=True)
class NodeRecord:
    k_node: float
    turn: int
    x_at_node: float
    degenerate: bool = False
    closed_curve: bool = False


class _TraceOnGrid:
    """Holonomy trace on a uniform multi-turn grid, with in-cell refinement."""

    def __init__(self, params, n_turns, density, spec, horizontal):
        self.params = params
        self.spec = spec
        self.s = _orientation(horizontal)
        self.density = density
        cell = QuadratureSpec(spec.abs_tol / density, spec.max_depth)
        t = np.linspace(0.0, TWO_PI, density + 1)
        pieces = [_integrate_rate(params, lo, hi, cell)
                  for lo, hi in zip(t[:-1], t[1:])]
        turn_A = np.concatenate([[0.0], np.cumsum(pieces)])
        self.turn_total = float(turn_A[-1])
        reps = np.arange(n_turns)[:, None]
        self.ks = np.concatenate([(TWO_PI * reps + t[None, :-1]).ravel(),
                                  [TWO_PI * n_turns]])
        self.As = np.concatenate([(self.turn_total * reps + turn_A[None, :-1]).ravel(),
                                  [self.turn_total * n_turns]])
        self.x0 = x_value(params, 0.0)
        self.phi0 = float(raw_polar_angle(params, 0.0))
        self.values = self._trace(self.ks, self.As)

    def _trace(self, ks, As):
        dx, dy = bloch_components(self.params, ks)
        z = np.hypot(dx, dy) / self.params.T
        x = np.where(z > 700.0, 0.0, 1.0 / np.cosh(np.minimum(z, 700.0)))
        dphi = np.arctan2(dy, dx) - self.phi0
        a0a = np.sqrt((1.0 + self.x0) * (1.0 + x))
        b0b = np.sqrt(np.maximum(0.0, (1.0 - self.x0) * (1.0 - x)))
        return 0.5 * (a0a * np.cos(As) + b0b * np.cos(dphi + self.s * As))

    def A_at(self, k: float) -> float:
        i = int(np.searchsorted(self.ks, k, side="right")) - 1
        i = min(max(i, 0), len(self.ks) - 1)
        base_k, base_A = float(self.ks[i]), float(self.As[i])
        if k == base_k:
            return base_A
        cell = QuadratureSpec(self.spec.abs_tol / self.density, self.spec.max_depth)
        return base_A + _integrate_rate(self.params, base_k, k, cell)

    def __call__(self, k: float) -> float:
        return float(self._trace(np.array([k]), np.array([self.A_at(k)]))[0])


def _turn_of(k: float) -> int:
    return max(1, math.ceil(k / TWO_PI - 1e-12))


def _record(params, k, **flags) -> NodeRecord:
    return NodeRecord(k_node=float(k), turn=_turn_of(k),
                      x_at_node=x_value(params, k), **flags)


def find_nodes(params: ChainParams, n_turns: int = 1,
               grid_density: int = DEFAULT_GRID_DENSITY,
               quadrature: QuadratureSpec | None = None,
               horizontal: bool = False,
               root_tol: float = ROOT_TOL,
               node_tol: float = NODE_TOL) -> list[NodeRecord]:
    """Zeros of the holonomy trace on [0, 2 pi n_turns].

    Sign changes on a uniform grid are refined by bisection to ``root_tol``.
    A trace within ``node_tol`` of zero at k = 2 pi n_turns is reported as a
    closed-curve node. Local minima of |trace| that touch zero without a
    sign change are reported with ``degenerate=True`` and a
    DegenerateNodeWarning.
    """
    _require_mixed(params)
    if n_turns < 1:
        raise InvalidParameterError(f"n_turns must be >= 1, got {n_turns!r}")
    if grid_density < 8:
        raise InvalidParameterError(f"grid_density must be >= 8, got {grid_density!r}")
    spec = quadrature or numerics.DEFAULT_QUADRATURE
    tr = _TraceOnGrid(params, n_turns, grid_density, spec, horizontal)
    ks, f = tr.ks, tr.values
    last = len(ks) - 1
    closed = abs(f[last]) <= node_tol

    nodes: list[NodeRecord] = []
    cells = np.flatnonzero(f[:-1] * f[1:] < 0.0)
    for i in cells:
        if closed and i == last - 1:
            continue
        k = numerics.find_root(tr, RootSpec((float(ks[i]), float(ks[i + 1])), root_tol))
        nodes.append(_record(params, k))

    for i in np.flatnonzero(f[1:-1] == 0.0) + 1:
        if f[i - 1] * f[i + 1] < 0.0:
            nodes.append(_record(params, ks[i]))
        else:
            warnings.warn(f"degenerate node of the holonomy trace at k = {ks[i]!r}",
                          DegenerateNodeWarning, stacklevel=2)
            nodes.append(_record(params, ks[i], degenerate=True))

    nodes.extend(_touching_nodes(tr, params, root_tol, node_tol))
    if closed:
        nodes.append(_record(params, ks[last], closed_curve=True))
    nodes.sort(key=lambda n: n.k_node)
    return nodes


def _touching_nodes(tr: _TraceOnGrid, params, root_tol, node_tol):
    """Look for zeros hidden between grid points (double or close pairs)."""
    ks, f = tr.ks, tr.values
    inner = np.arange(1, len(ks) - 1)
    fm, f0, fp = f[inner - 1], f[inner], f[inner + 1]
    same = (fm * f0 > 0.0) & (f0 * fp > 0.0)
    dip = (np.abs(f0) <= np.abs(fm)) & (np.abs(f0) <= np.abs(fp))
    curv = fp - 2.0 * f0 + fm
    with np.errstate(divide="ignore", invalid="ignore"):
        vertex = f0 - (fp - fm) ** 2 / (8.0 * curv)
    # parabolic estimate of the extremum reaches (or nearly reaches) zero
    suspect = same & dip & ((np.sign(vertex) != np.sign(f0)) | (np.abs(vertex) < 1e-6))
    found = []
    for i in inner[suspect]:
        lo, hi = float(ks[i - 1]), float(ks[i + 1])
        sgn = math.copysign(1.0, f[i])
        res = minimize_scalar(lambda k: sgn * tr(k), bounds=(lo, hi),
                              method="bounded", options={"xatol": root_tol})
        k_star, f_star = float(res.x), sgn * float(res.fun)
        if sgn * f_star < 0.0:
            for a, b in ((lo, k_star), (k_star, hi)):
                k = numerics.find_root(tr, RootSpec((a, b), root_tol))
                found.append(_record(params, k))
        elif abs(f_star) <= node_tol:
            warnings.warn(f"degenerate node of the holonomy trace at k = {k_star!r}",
                          DegenerateNodeWarning, stacklevel=3)
            found.append(_record(params, k_star, degenerate=True))
    return found


def uhlmann_phase_factor(params: ChainParams, n_turns: int = 1,
                         grid_density: int = DEFAULT_GRID_DENSITY,
                         quadrature: QuadratureSpec | None = None,
                         horizontal: bool = False) -> int:
    """(-1)^(number of nodes in (0, 2 pi n_turns]).

    Raises UndefinedPhaseError when a node is degenerate or sits on the
    closing point of the curve (the critical-temperature boundary).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNodeWarning)
        nodes = find_nodes(params, n_turns, grid_density, quadrature, horizontal)
    for n in nodes:
        if n.degenerate:
            raise UndefinedPhaseError(f"degenerate node at k = {n.k_node!r}")
        if n.closed_curve:
            raise UndefinedPhaseError(
                f"node at the closing point k = {n.k_node!r}: "
                "the phase factor is at its jump")
    return -1 if len(nodes) % 2 else 1


def transport_profile(params: ChainParams, n_turns: int = 1,
                      grid_density: int = DEFAULT_GRID_DENSITY,
                      quadrature: QuadratureSpec | None = None,
                      horizontal: bool = False) -> list[TransportState]:
    """A, trace and running phase-factor sign at every grid point."""
    spec = quadrature or numerics.DEFAULT_QUADRATURE
    tr = _TraceOnGrid(params, n_turns, grid_density, spec, horizontal)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNodeWarning)
        nodes = find_nodes(params, n_turns, grid_density, quadrature, horizontal)
    node_ks = np.array([n.k_node for n in nodes if not n.degenerate])
    flips = np.searchsorted(node_ks, tr.ks, side="right")
    return [TransportState(float(k), float(A), float(v), -1 if c % 2 else 1)
            for k, A, v, c in zip(tr.ks, tr.As, tr.values, flips)]


@dataclass(frozen=True)
class CriticalTemperature:
    n1: int
    n2: int
    m: float
    T: float

    @property
    def x(self) -> float:
        """sech(Delta_0 / 2T) at the start (and end) of the closed curve."""
        return x_value(ChainParams(self.m, self.T), 0.0)


def closed_curve_angle(params: ChainParams, n_turns: int = 1,
                       quadrature: QuadratureSpec | None = None) -> float:
    """A(2 pi n) = n A(2 pi)."""
    _require_mixed(params)
    return n_turns * _turn_angle(params, quadrature or numerics.DEFAULT_QUADRATURE)


def _check_branch(m, n1, n2):
    if n1 < 1:
        raise InvalidParameterError(f"n1 must be >= 1, got {n1!r}")
    if not 0 <= n2 < n1:
        raise InvalidParameterError(f"n2 must lie in [0, {n1 - 1}], got {n2!r}")
    if m < 0:
        raise InvalidParameterError(f"m must be >= 0, got {m!r}")


def critical_temperatures(m: float, n1: int, n2: int,
                          t_range: tuple[float, float] = T_RANGE,
                          scan_points: int = 241,
                          x_tol: float = ROOT_TOL,
                          quadrature: QuadratureSpec | None = None,
                          w: float = 1.0, M: float = 1.0) -> list[CriticalTemperature]:
    """All T in ``t_range`` with A(2 pi n1; T) = (2 n2 + 1) pi / 2.

    On that branch cos A(2 pi n1) = 0, so a node sits exactly at the end of
    turn n1. With this labelling the flat band gives
    x = sech(1/T) = (2 (n1 - n2) - 1) / (2 n1). Sign changes are located on
    a logarithmic scan of ``scan_points`` temperatures and refined by
    bisection in T. For m < 1 there is at most one root; for m > 1 A(2 pi; T)
    rises and falls again, so a branch can have two.
    """
    _check_branch(m, n1, n2)
    spec = quadrature or numerics.DEFAULT_QUADRATURE
    target = (2 * n2 + 1) * math.pi / 2.0

    # the scan only needs signs, so it runs at a looser tolerance
    coarse = QuadratureSpec(max(spec.abs_tol, SCAN_TOL), spec.max_depth)

    def g(T, q=spec):
        return n1 * _turn_angle(ChainParams(m, T, w, M), q) - target

    Ts = np.geomspace(t_range[0], t_range[1], scan_points)
    gs = np.array([g(float(T), coarse) for T in Ts])
    out = []
    for i in np.flatnonzero(np.abs(gs) <= SCAN_TOL * n1 * 10.0):
        if g(float(Ts[i])) == 0.0:
            out.append(CriticalTemperature(n1, n2, m, float(Ts[i])))
    for i in np.flatnonzero(gs[:-1] * gs[1:] < 0.0):
        lo, hi = float(Ts[i]), float(Ts[i + 1])
        if g(lo) * g(hi) >= 0.0:
            continue
        T = numerics.find_root(g, RootSpec((lo, hi), x_tol))
        out.append(CriticalTemperature(n1, n2, m, T))
    out.sort(key=lambda c: c.T)
    return out


def critical_temperature(m: float, n1: int, n2: int, **kwargs) -> CriticalTemperature | None:
    """Lowest critical temperature on the (n1, n2) branch, or None if unattainable."""
    found = critical_temperatures(m, n1, n2, **kwargs)
    return found[0] if found else None
