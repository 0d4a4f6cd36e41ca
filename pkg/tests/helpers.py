"""Random scenario builders shared by the test modules."""

import numpy as np

from boundmon.dynamics import UncertainLinearSystem
from boundmon.geometry import Zonotope


def random_system(rng, n=None, max_half_width=0.2, radius=0.95):
    """Random system with nominal spectral radius ``radius`` and a few uncertain cells."""
    n = int(rng.integers(1, 5)) if n is None else n
    a = rng.normal(size=(n, n))
    a *= radius / max(np.max(np.abs(np.linalg.eigvals(a))), 1e-9)
    cells = {}
    k = int(rng.integers(1, n * n + 1))
    for flat in rng.choice(n * n, size=k, replace=False):
        mid = rng.uniform(-0.5, 0.5) * max_half_width
        half = rng.uniform(0.0, max_half_width - abs(mid))
        cells[(int(flat // n), int(flat % n))] = (mid - half, mid + half)
    return UncertainLinearSystem(a, cells)


def random_init(rng, n, m=None, scale=0.5):
    m = n if m is None else m
    return Zonotope(rng.uniform(-2, 2, n), rng.uniform(-scale, scale, (n, m)))


def admissible_trajectory(sys, init, steps, rng):
    xs = [init.sample(rng)[0]]
    for _ in range(steps):
        xs.append(sys.sample_matrix(rng) @ xs[-1])
    return np.array(xs)
