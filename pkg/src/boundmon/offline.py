"""Offline monitoring of aperiodic, noisy logs.

Between two consecutive samples the monitor fills the gap with a flowpipe of
the bounding model started from the earlier sample. Reach sets that meet the
unsafe spec are alarms; with refinement enabled an alarm is dropped when the
over-approximated unsafe part of the reach set cannot evolve into the next
logged sample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from .dynamics import UncertainLinearSystem
from .errors import DimensionError, InvalidSetError
from .flowpipe import Flowpipe, compute_flowpipe, unsafe_times
from .geometry import (
    FEAS_TOL,
    Halfspace,
    IntervalBox,
    Region,
    UnsafeSpec,
    Zonotope,
    from_interval,
    interval_hull,
    intersects,
    intersects_unsafe,
    support,
)


@dataclass(frozen=True, eq=False)
class Sample:
    """One log entry. Interval samples keep their box so text round-trips exactly."""

    time: int
    region: Union[Zonotope, IntervalBox]

    @property
    def zonotope(self) -> Zonotope:
        if isinstance(self.region, IntervalBox):
            return from_interval(self.region)
        return self.region

    @property
    def dim(self) -> int:
        return self.region.dim


@dataclass(frozen=True, eq=False)
class Log:
    dimension: int
    samples: tuple

    def __post_init__(self):
        samples = tuple(self.samples)
        prev = None
        for s in samples:
            if s.dim != self.dimension:
                raise DimensionError(f"sample at t={s.time} has dimension {s.dim}, log has {self.dimension}")
            if s.time < 0:
                raise InvalidSetError(f"negative sample time {s.time}")
            if prev is not None and s.time <= prev:
                raise InvalidSetError(f"sample times not strictly increasing at t={s.time}")
            prev = s.time
        object.__setattr__(self, "samples", samples)

    @property
    def kind(self) -> str:
        if self.samples and all(isinstance(s.region, IntervalBox) for s in self.samples):
            return "interval"
        return "zonotope"

    @property
    def times(self) -> List[int]:
        return [s.time for s in self.samples]

    def __len__(self):
        return len(self.samples)


class Status(enum.Enum):
    SAFE = "SAFE"
    POSSIBLY_UNSAFE = "POSSIBLY_UNSAFE"


@dataclass(frozen=True, eq=False)
class Witness:
    time: int
    reach_set: Zonotope
    refined_away: bool = False


@dataclass(frozen=True, eq=False)
class Verdict:
    witnesses: tuple
    segments: tuple

    @property
    def status(self) -> Status:
        if any(not w.refined_away for w in self.witnesses):
            return Status.POSSIBLY_UNSAFE
        return Status.SAFE

    @property
    def alarms(self) -> List[Witness]:
        """Witnesses that survived refinement."""
        return [w for w in self.witnesses if not w.refined_away]


def hull_intersect_overapprox(z: Zonotope, d: Region) -> Optional[Zonotope]:
    """Axis-aligned zonotope containing ``z & d``, or None if they are disjoint."""
    if isinstance(d, Halfspace):
        if support(z, d.normal) < d.offset - FEAS_TOL:
            return None
        box = _clip_box(interval_hull(z), d)
    else:
        if not intersects(z, d):
            return None
        a, b = interval_hull(z), interval_hull(d)
        lo, hi = np.maximum(a.lower, b.lower), np.minimum(a.upper, b.upper)
        hi = np.maximum(hi, lo)  # touching within tolerance
        box = IntervalBox(lo, hi)
    return from_interval(box) if box is not None else None


def _clip_box(box: IntervalBox, h: Halfspace) -> Optional[IntervalBox]:
    # One pass reaches the fixpoint: tightening x_i never lowers max(a_i x_i).
    a = h.normal
    lo, hi = box.lower.copy(), box.upper.copy()
    term_max = np.maximum(a * lo, a * hi)
    total = term_max.sum()
    for i in np.flatnonzero(a):
        bound = (h.offset - (total - term_max[i])) / a[i]
        if a[i] > 0:
            lo[i] = max(lo[i], bound)
        else:
            hi[i] = min(hi[i], bound)
        if lo[i] > hi[i]:
            if lo[i] - hi[i] > FEAS_TOL:
                return None
            lo[i] = hi[i] = (lo[i] + hi[i]) / 2.0
    return IntervalBox(lo, hi)


def refine_segment(
    sys: UncertainLinearSystem,
    fp: Flowpipe,
    hit_time: int,
    u: UnsafeSpec,
    next_sample: Zonotope,
    next_time: int,
    max_generators: Optional[int] = None,
) -> bool:
    """True if the alarm at ``hit_time`` is inconsistent with the next sample.

    For every disjunct meeting the reach set, restart a flowpipe from a box
    around the unsafe overlap and check whether it can reach ``next_sample``
    at ``next_time``. Only if none can is the alarm refined away.
    ``hit_time == next_time`` is allowed: the overlap is then compared with
    the sample directly.
    """
    if not fp.start_time < hit_time <= min(next_time, fp.end_time):
        raise InvalidSetError(
            f"hit time {hit_time} outside ({fp.start_time}, {min(next_time, fp.end_time)}]"
        )
    reach = fp.at(hit_time)
    for d in u.disjuncts:
        overlap = hull_intersect_overapprox(reach, d)
        if overlap is None:
            continue
        fwd = compute_flowpipe(sys, overlap, hit_time, next_time - hit_time, max_generators)
        if intersects(fwd.sets[-1], next_sample):
            return False
    return True


def monitor_offline(
    sys: UncertainLinearSystem,
    log: Log,
    u: UnsafeSpec,
    max_generators: Optional[int] = None,
    refine: bool = True,
) -> Verdict:
    if not log.samples:
        raise InvalidSetError("cannot monitor an empty log")
    if not (sys.dimension == log.dimension == u.dim):
        raise DimensionError(
            f"dimensions differ: system {sys.dimension}, log {log.dimension}, unsafe {u.dim}"
        )
    zs = [s.zonotope for s in log.samples]
    times = log.times
    found: Dict[int, Witness] = {}
    # a sample overlapping u is a direct observation and is never refined
    for t, z in zip(times, zs):
        if intersects_unsafe(z, u):
            found[t] = Witness(t, z, False)

    segments = []
    for k in range(len(zs) - 1):
        t0, t1 = times[k], times[k + 1]
        fp = compute_flowpipe(sys, zs[k], t0, t1 - t0, max_generators)
        segments.append(fp)
        for t in unsafe_times(fp, u):
            if t == t0 or t in found:
                continue
            away = refine and refine_segment(sys, fp, t, u, zs[k + 1], t1, max_generators)
            found[t] = Witness(t, fp.at(t), away)
    if not segments:
        segments.append(Flowpipe(times[0], (zs[0],)))
    return Verdict(tuple(found[t] for t in sorted(found)), tuple(segments))
