"""Multi-step reach sets and scanning them against an unsafe spec."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .dynamics import UncertainLinearSystem, step
from .errors import DimensionError, InvalidSetError
from .geometry import UnsafeSpec, Zonotope, intersects_unsafe


@dataclass(frozen=True, eq=False)
class Flowpipe:
    """``sets[k]`` over-approximates the states at time ``start_time + k``."""

    start_time: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise InvalidSetError("flowpipe needs at least one set")
        if self.start_time < 0:
            raise InvalidSetError("flowpipe start time must be nonnegative")
        if len({s.dim for s in sets}) != 1:
            raise DimensionError("flowpipe sets have mixed dimensions")
        object.__setattr__(self, "sets", sets)

    @property
    def end_time(self) -> int:
        return self.start_time + len(self.sets) - 1

    @property
    def times(self) -> range:
        return range(self.start_time, self.end_time + 1)

    def at(self, t: int) -> Zonotope:
        if not self.start_time <= t <= self.end_time:
            raise IndexError(f"time {t} outside flowpipe [{self.start_time}, {self.end_time}]")
        return self.sets[t - self.start_time]

    def __len__(self):
        return len(self.sets)


def compute_flowpipe(
    sys: UncertainLinearSystem,
    init: Zonotope,
    start_time: int,
    steps: int,
    max_generators: Optional[int] = None,
) -> Flowpipe:
    if steps < 0:
        raise InvalidSetError("steps must be nonnegative")
    sets: List[Zonotope] = [init]
    for _ in range(steps):
        sets.append(step(sys, sets[-1], max_generators))
    return Flowpipe(start_time, tuple(sets))


def unsafe_times(fp: Flowpipe, u: UnsafeSpec, first_only: bool = False) -> List[int]:
    """Absolute times whose reach set meets ``u``, in increasing order."""
    hits = []
    for k, s in enumerate(fp.sets):
        if intersects_unsafe(s, u):
            hits.append(fp.start_time + k)
            if first_only:
                break
    return hits


def first_unsafe(fp: Flowpipe, u: UnsafeSpec) -> Optional[int]:
    hits = unsafe_times(fp, u, first_only=True)
    return hits[0] if hits else None


def tail(fp: Flowpipe, skip: int) -> Optional[Flowpipe]:
    """The flowpipe without its first ``skip`` sets, or None if nothing is left."""
    if skip >= len(fp.sets):
        return None
    return Flowpipe(fp.start_time + skip, fp.sets[skip:])


def concat_bounds(fps: Sequence[Flowpipe]):
    """Yield ``(t, set)`` over consecutive flowpipes; shared boundary times come from the earlier pipe."""
    last = None
    for fp in fps:
        for t, s in zip(fp.times, fp.sets):
            if last is not None and t <= last:
                continue
            last = t
            yield t, s
