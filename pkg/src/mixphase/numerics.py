"""Quadrature, bracketing root finding and angle unwrapping.

All kernels are deterministic and stateless. Tolerances are explicit
arguments rather than module globals so that callers can pin them.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, NonConvergenceError, UndersampledError

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")


@dataclass(frozen=True)
class RootSpec:
    bracket: tuple[float, float]
    x_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError(f"bracket must satisfy lo < hi, got {self.bracket}")
        if not self.x_tol > 0:
            raise ValueError(f"x_tol must be positive, got {self.x_tol}")


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate(f: Callable[[float], float], a: float, b: float,
              spec: QuadratureSpec | None = None) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    The local error of each panel is estimated from the difference between
    one Simpson panel and its two halves; accepted panels carry the usual
    Richardson correction. A panel's share of the tolerance halves with each
    split. Panels are processed from an explicit stack, so deep refinement
    does not hit the interpreter recursion limit.

    Raises NonConvergenceError when a panel still fails its tolerance at
    ``spec.max_depth``; the error carries that panel as ``worst_interval``.
    """
    spec = spec or DEFAULT_QUADRATURE
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, spec)

    fa, fb = f(a), f(b)
    c = 0.5 * (a + b)
    fc = f(c)
    whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb)

    total = 0.0
    compensation = 0.0
    # (a, b, fa, fc, fb, whole, tol, depth)
    stack = [(a, b, fa, fc, fb, whole, spec.abs_tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        # floor keeps roundoff in the panel sums from forcing endless splits
        floor = 64.0 * _EPS * (abs(left) + abs(right))
        if abs(delta) <= 15.0 * max(tol, floor):
            term = left + right + delta / 15.0
            # Kahan summation over accepted panels
            y = term - compensation
            t = total + y
            compensation = (t - total) - y
            total = t
            continue
        if depth + 1 >= spec.max_depth or not (lo < lm < mid < rm < hi):
            raise NonConvergenceError(
                f"adaptive Simpson did not converge on [{lo!r}, {hi!r}] "
                f"(local error estimate {abs(delta) / 15.0:.3e}, "
                f"tolerance {tol:.3e})",
                worst_interval=(lo, hi),
                estimate=total,
            )
        if not (math.isfinite(left) and math.isfinite(right)):
            raise NonConvergenceError(
                f"integrand is not finite on [{lo!r}, {hi!r}]",
                worst_interval=(lo, hi),
                estimate=total,
            )
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1))
    return total


def find_root(f: Callable[[float], float], spec: RootSpec) -> float:
    """Bisection on ``spec.bracket``.

    Returns a point whose enclosing bracket is no wider than ``spec.x_tol``.
    Raises BracketError if ``f`` has the same sign at both ends.
    """
    lo, hi = spec.bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0.0:
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}")
    for _ in range(spec.max_iter):
        if hi - lo <= spec.x_tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # bracket is down to adjacent floats
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    if hi - lo <= spec.x_tol:
        return 0.5 * (lo + hi)
    raise NonConvergenceError(
        f"bisection left a bracket of width {hi - lo:.3e} after "
        f"{spec.max_iter} iterations",
        worst_interval=(lo, hi),
        estimate=0.5 * (lo + hi),
    )


def unwrap(angles: Sequence[float], max_jump: float = math.pi) -> np.ndarray:
    """Remove 2*pi jumps so that consecutive angles differ by less than pi.

    Unlike ``numpy.unwrap`` this refuses to guess: a corrected step whose
    magnitude reaches ``max_jump`` means the signal is undersampled and
    raises UndersampledError.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 1:
        raise ValueError("unwrap expects a one-dimensional sequence")
    if angles.size < 2:
        return angles.copy()
    steps = np.diff(angles)
    corrected = np.mod(steps + math.pi, 2.0 * math.pi) - math.pi
    bad = np.flatnonzero(np.abs(corrected) >= max_jump * (1.0 - 1e-12))
    if bad.size:
        i = int(bad[0])
        raise UndersampledError(
            f"step {i} -> {i + 1} is ambiguous after 2*pi correction "
            f"({corrected[i]:.6f} rad)")
    turns = np.rint((corrected - steps) / (2.0 * math.pi))
    out = angles.copy()
    out[1:] += 2.0 * math.pi * np.cumsum(turns)
    return out
