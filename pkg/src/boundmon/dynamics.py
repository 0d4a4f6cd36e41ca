"""Uncertain linear systems and their one-step reachability."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

import numpy as np

from .errors import DimensionError, InvalidSetError
from .geometry import (
    IntervalBox,
    Zonotope,
    affine_map,
    from_interval,
    interval_hull,
    minkowski_sum,
    order_reduce,
)

Cell = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class UncertainLinearSystem:
    """``x' = (A + dA) x`` with each ``dA[i, j]`` in its own interval.

    Unmapped cells of ``uncertainty`` are exactly zero. A fresh ``dA`` is
    admissible at every step (time-varying uncertainty).
    """

    nominal: np.ndarray
    uncertainty: Mapping[Cell, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.nominal, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidSetError(f"nominal matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidSetError("nominal matrix entries must be finite")
        n = a.shape[0]
        cells = {}
        lo = np.zeros((n, n))
        hi = np.zeros((n, n))
        for (i, j), (l, h) in sorted(dict(self.uncertainty).items()):
            i, j, l, h = int(i), int(j), float(l), float(h)
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidSetError(f"uncertainty cell ({i}, {j}) outside a {n}x{n} matrix")
            if not (np.isfinite(l) and np.isfinite(h)):
                raise InvalidSetError(f"uncertainty interval at ({i}, {j}) must be finite")
            if l > h:
                raise InvalidSetError(f"uncertainty interval at ({i}, {j}) has lo > hi")
            cells[(i, j)] = (l, h)
            lo[i, j], hi[i, j] = l, h
        a.setflags(write=False)
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "nominal", a)
        object.__setattr__(self, "uncertainty", cells)
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)

    @property
    def dimension(self) -> int:
        return self.nominal.shape[0]

    @property
    def delta_lower(self) -> np.ndarray:
        return self._lo

    @property
    def delta_upper(self) -> np.ndarray:
        return self._hi

    @property
    def default_max_generators(self) -> int:
        return 5 * self.dimension

    def sample_matrix(self, rng: np.random.Generator) -> np.ndarray:
        """One admissible ``A + dA``; draws one uniform per mapped cell, in sorted cell order."""
        m = self.nominal.copy()
        for (i, j), (l, h) in self.uncertainty.items():
            m[i, j] += rng.uniform(l, h)
        return m


def _check(sys: UncertainLinearSystem, z: Zonotope) -> None:
    if sys.dimension != z.dim:
        raise DimensionError(f"system dimension {sys.dimension} vs set dimension {z.dim}")


def step_nominal(sys: UncertainLinearSystem, z: Zonotope) -> Zonotope:
    _check(sys, z)
    return affine_map(z, sys.nominal)


def uncertainty_bloat(sys: UncertainLinearSystem, z: Zonotope) -> Zonotope:
    """Box containing ``dA @ x`` for every admissible ``dA`` and ``x`` in ``z``.

    Interval matrix times the interval hull of ``z``.
    """
    _check(sys, z)
    if not sys.uncertainty:
        return Zonotope.point(np.zeros(sys.dimension))
    h = interval_hull(z)
    lo, hi = sys.delta_lower, sys.delta_upper
    xl, xu = h.lower[None, :], h.upper[None, :]
    prods = np.stack((lo * xl, lo * xu, hi * xl, hi * xu))
    return from_interval(IntervalBox(prods.min(axis=0).sum(axis=1), prods.max(axis=0).sum(axis=1)))


def step(sys: UncertainLinearSystem, z: Zonotope, max_generators: Optional[int] = None) -> Zonotope:
    """Sound over-approximation of the one-step image of ``z``."""
    if max_generators is None:
        max_generators = sys.default_max_generators
    return order_reduce(minkowski_sum(step_nominal(sys, z), uncertainty_bloat(sys, z)), max_generators)
