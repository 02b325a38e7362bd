"""Random smooth closed curves inside the Bloch ball, shared by tests."""

import numpy as np

from mixphase.interferometric import ClosedCurve


def random_curve(rng, n=4001, modes=3, radius=(0.3, 0.95)):
    """Fourier curve on the ball: random direction path times a random radius profile."""
    k = np.linspace(0.0, 2 * np.pi, n)
    v = np.zeros((n, 3))
    v[:, 2] = rng.uniform(-1, 1)
    for j in range(1, modes + 1):
        a, b = rng.normal(size=3) / j, rng.normal(size=3) / j
        v += np.outer(np.cos(j * k), a) + np.outer(np.sin(j * k), b)
    v /= np.linalg.norm(v, axis=1)[:, None]
    lo, hi = radius
    r = lo + (hi - lo) * (0.5 + 0.5 * np.cos(k + rng.uniform(0, 2 * np.pi)))
    bloch = v * r[:, None]
    bloch[-1] = bloch[0]
    return ClosedCurve(k, bloch)
