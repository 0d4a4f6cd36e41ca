"""Zonotopes, interval boxes and unsafe-region specs.

Every value here is immutable; all operations are pure functions. The only
non-trivial numerics live in :func:`intersects`, which decides zonotope
intersection with a small linear program.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionError, FeasibilityError, InvalidSetError

# Single geometry-wide epsilon: equality residual accepted by the feasibility
# LP, and slack on closed halfspace tests.
FEAS_TOL = 1e-7


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Zonotope:
    """The set ``{center + generators @ xi : xi in [-1, 1]^m}``.

    ``generators`` has shape ``(n, m)``; ``m == 0`` is a single point.
    """

    center: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim == 0:
            c = c.reshape(1)
        if c.ndim != 1 or c.shape[0] < 1:
            raise InvalidSetError(f"center must be a non-empty vector, got shape {c.shape}")
        g = np.asarray(self.generators, dtype=float)
        if g.size == 0:
            g = np.zeros((c.shape[0], 0))
        elif g.ndim == 1 and c.shape[0] == 1:
            g = g.reshape(1, -1)
        if g.ndim != 2 or g.shape[0] != c.shape[0]:
            raise DimensionError(
                f"generator matrix shape {g.shape} does not match dimension {c.shape[0]}"
            )
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(g))):
            raise InvalidSetError("zonotope entries must be finite")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "generators", _frozen(g))

    @classmethod
    def point(cls, x) -> "Zonotope":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls(x, np.zeros((x.shape[0], 0)))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def order(self) -> int:
        """Number of generators."""
        return self.generators.shape[1]

    def support(self, direction) -> float:
        return support(self, direction)

    def contains(self, x) -> bool:
        return contains_point(self, x)

    def points(self, xi: np.ndarray) -> np.ndarray:
        """Map rows of ``xi`` (shape ``(k, m)``) to points, shape ``(k, n)``."""
        xi = np.atleast_2d(xi)
        return self.center + xi @ self.generators.T

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """Draw ``count`` points with xi uniform on the unit box."""
        xi = rng.uniform(-1.0, 1.0, size=(count, self.order))
        return self.points(xi)

    def same_as(self, other: "Zonotope") -> bool:
        """Exact structural equality (same center and generator columns)."""
        return (
            self.generators.shape == other.generators.shape
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.generators, other.generators)
        )

    def __repr__(self):
        return f"Zonotope(center={self.center.tolist()}, generators={self.generators.tolist()})"


@dataclass(frozen=True, eq=False)
class IntervalBox:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise DimensionError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if lo.shape[0] == 0:
            raise InvalidSetError("interval box must have dimension >= 1")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidSetError("interval bounds must be finite")
        if np.any(lo > hi):
            i = int(np.argmax(lo > hi))
            raise InvalidSetError(f"lower bound exceeds upper bound in dimension {i}")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains_box(self, other: "IntervalBox", tol: float = 0.0) -> bool:
        return bool(np.all(self.lower <= other.lower + tol) and np.all(other.upper <= self.upper + tol))

    def same_as(self, other: "IntervalBox") -> bool:
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __repr__(self):
        return f"IntervalBox(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


@dataclass(frozen=True, eq=False)
class Halfspace:
    """Closed halfspace ``normal . x >= offset``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.normal, dtype=float))
        if a.ndim != 1 or a.shape[0] == 0:
            raise InvalidSetError("halfspace normal must be a non-empty vector")
        if not np.all(np.isfinite(a)) or not np.isfinite(self.offset):
            raise InvalidSetError("halfspace entries must be finite")
        if not np.any(a != 0.0):
            raise InvalidSetError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", _frozen(a))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def contains(self, x) -> bool:
        return float(self.normal @ np.asarray(x, dtype=float)) >= self.offset - FEAS_TOL

    def __repr__(self):
        return f"Halfspace(normal={self.normal.tolist()}, offset={self.offset})"


Region = Union[Halfspace, Zonotope]


@dataclass(frozen=True, eq=False)
class UnsafeSpec:
    """Union of closed halfspaces and zonotope regions."""

    disjuncts: tuple

    def __post_init__(self):
        ds = tuple(self.disjuncts)
        if not ds:
            raise InvalidSetError("unsafe spec needs at least one disjunct")
        for d in ds:
            if not isinstance(d, (Halfspace, Zonotope)):
                raise InvalidSetError(f"unsupported unsafe disjunct {type(d).__name__}")
        dims = {d.dim for d in ds}
        if len(dims) != 1:
            raise DimensionError(f"unsafe disjuncts have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "disjuncts", ds)

    @property
    def dim(self) -> int:
        return self.disjuncts[0].dim

    def contains(self, x) -> bool:
        return any(d.contains(x) for d in self.disjuncts)


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionError(f"dimension mismatch: {dims}")


def from_interval(box: IntervalBox) -> Zonotope:
    """Axis-aligned zonotope equal to ``box``; zero-width axes get no generator."""
    center = (box.lower + box.upper) / 2.0
    # outward so that center +/- radius covers both bounds after rounding
    radius = np.maximum(np.maximum((box.upper - box.lower) / 2.0, box.upper - center), center - box.lower)
    radius[box.upper == box.lower] = 0.0
    for _ in range(4):
        short = (center - radius > box.lower) | (center + radius < box.upper)
        if not short.any():
            break
        radius[short] = np.nextafter(radius[short], np.inf)
    return Zonotope(center, _diag_columns(radius))


def _diag_columns(radius: np.ndarray) -> np.ndarray:
    n = radius.shape[0]
    idx = np.flatnonzero(radius > 0.0)
    g = np.zeros((n, idx.size))
    g[idx, np.arange(idx.size)] = radius[idx]
    return g


def affine_map(z: Zonotope, m, b=None) -> Zonotope:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[1] != z.dim:
        raise DimensionError(f"matrix with {m.shape[1]} columns applied to dimension {z.dim}")
    c = m @ z.center
    if b is not None:
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if b.shape != c.shape:
            raise DimensionError(f"offset shape {b.shape} does not match {c.shape}")
        c = c + b
    return Zonotope(c, m @ z.generators)


def minkowski_sum(a: Zonotope, b: Zonotope) -> Zonotope:
    _check_dims(a.dim, b.dim)
    return Zonotope(a.center + b.center, np.hstack((a.generators, b.generators)))


def interval_hull(z: Zonotope) -> IntervalBox:
    r = np.abs(z.generators).sum(axis=1)
    return IntervalBox(z.center - r, z.center + r)


def support(z: Zonotope, direction) -> float:
    """``max d . x`` over ``z``."""
    d = np.asarray(direction, dtype=float)
    _check_dims(z.dim, d.shape[0])
    return float(d @ z.center + np.abs(d @ z.generators).sum())


def _hulls_disjoint(a: Zonotope, b: Zonotope) -> bool:
    ha, hb = interval_hull(a), interval_hull(b)
    return bool(np.any(ha.upper < hb.lower - FEAS_TOL) or np.any(hb.upper < ha.lower - FEAS_TOL))


def intersects(a: Zonotope, b: Zonotope) -> bool:
    """Decide whether two zonotopes share a point.

    Solves ``min t`` subject to ``|Ga xi_a - Gb xi_b - (cb - ca)| <= t``
    componentwise with ``xi`` in the unit box. The program is always feasible
    and bounded, so any non-optimal solver status is a numerical failure and
    raises :class:`FeasibilityError`. The sets intersect iff the optimum is
    within :data:`FEAS_TOL`.
    """
    _check_dims(a.dim, b.dim)
    if _hulls_disjoint(a, b):
        return False
    d = b.center - a.center
    ma, mb = a.order, b.order
    if ma + mb == 0:
        return bool(np.max(np.abs(d)) <= FEAS_TOL)
    n = a.dim
    g = np.hstack((a.generators, -b.generators))
    ones = np.ones((n, 1))
    a_ub = np.vstack((np.hstack((g, -ones)), np.hstack((-g, -ones))))
    b_ub = np.concatenate((d, -d))
    cost = np.zeros(ma + mb + 1)
    cost[-1] = 1.0
    bounds = [(-1.0, 1.0)] * (ma + mb) + [(0.0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise FeasibilityError(f"intersection LP failed (status {res.status}): {res.message}")
    return bool(res.fun <= FEAS_TOL)


def contains_point(z: Zonotope, x) -> bool:
    """Membership test for a single point, within :data:`FEAS_TOL`."""
    return intersects(z, Zonotope.point(x))


def intersects_region(z: Zonotope, region: Region) -> bool:
    if isinstance(region, Halfspace):
        _check_dims(z.dim, region.dim)
        return support(z, region.normal) >= region.offset - FEAS_TOL
    return intersects(z, region)


def intersects_unsafe(z: Zonotope, u: UnsafeSpec) -> bool:
    _check_dims(z.dim, u.dim)
    return any(intersects_region(z, d) for d in u.disjuncts)


def order_reduce(z: Zonotope, max_generators: int) -> Zonotope:
    """Over-approximate ``z`` with at most ``max_generators`` generators.

    Keeps the ``max_generators - n`` generators of largest Euclidean norm and
    boxes the rest into at most ``n`` axis-aligned generators.
    """
    n = z.dim
    if max_generators < n:
        raise InvalidSetError(f"max_generators={max_generators} is below dimension {n}")
    if z.order <= max_generators:
        return z
    g = z.generators
    keep = max_generators - n
    ranked = np.argsort(-np.linalg.norm(g, axis=0), kind="stable")
    kept = np.sort(ranked[:keep])
    rest = ranked[keep:]
    boxed = _diag_columns(np.abs(g[:, rest]).sum(axis=1))
    return Zonotope(z.center, np.hstack((g[:, kept], boxed)))


def box_zonotope(lower: Sequence[float], upper: Sequence[float]) -> Zonotope:
    """Shorthand for ``from_interval(IntervalBox(lower, upper))``."""
    return from_interval(IntervalBox(lower, upper))
