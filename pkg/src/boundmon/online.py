"""Online monitoring: sample the system only when a violation becomes possible."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .dynamics import UncertainLinearSystem
from .errors import DimensionError, InvalidSetError
from .flowpipe import Flowpipe, compute_flowpipe, first_unsafe, tail
from .geometry import IntervalBox, UnsafeSpec, Zonotope, from_interval, intersects_unsafe
from .offline import Log, Sample, Verdict, Witness


@dataclass(frozen=True, eq=False)
class Behavior:
    """State values at every timestep ``0..T``; row ``t`` of ``values`` is the state at ``t``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise InvalidSetError(f"behavior needs shape (T+1, n) with T >= 0, n >= 1; got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidSetError("behavior values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> int:
        """Last timestep ``T``."""
        return self.values.shape[0] - 1

    def value_at(self, t: int) -> np.ndarray:
        return self.values[t]


@dataclass(frozen=True)
class OnlineConfig:
    noise: Tuple[float, ...]
    max_skip: int
    max_generators: Optional[int] = None

    def __post_init__(self):
        noise = tuple(float(x) for x in np.atleast_1d(self.noise))
        if not all(np.isfinite(x) and x >= 0 for x in noise):
            raise InvalidSetError("noise half-widths must be finite and nonnegative")
        if self.max_skip < 1:
            raise InvalidSetError("max_skip must be >= 1")
        object.__setattr__(self, "noise", noise)


def _noise_vector(cfg: OnlineConfig, n: int) -> np.ndarray:
    if len(cfg.noise) == 1:
        return np.full(n, cfg.noise[0])
    if len(cfg.noise) != n:
        raise DimensionError(f"noise has {len(cfg.noise)} entries for dimension {n}")
    return np.array(cfg.noise)


def _plan(sys, sample: Zonotope, t_k: int, u: UnsafeSpec, cfg: OnlineConfig, remaining: int):
    horizon = min(cfg.max_skip, remaining)
    fp = compute_flowpipe(sys, sample, t_k, horizon, cfg.max_generators)
    hit = first_unsafe(tail(fp, 1), u) if horizon > 0 else None
    if hit is None:
        trigger = t_k + horizon
    else:
        # last step still known safe; forced to t_k + 1 when the very next step is at risk
        trigger = max(hit - 1, t_k + 1)
    return trigger, fp


def next_trigger(
    sys: UncertainLinearSystem,
    current_sample: Zonotope,
    t_k: int,
    u: UnsafeSpec,
    cfg: OnlineConfig,
    remaining: int,
) -> int:
    if remaining < 1:
        raise InvalidSetError("remaining must be >= 1")
    return _plan(sys, current_sample, t_k, u, cfg, remaining)[0]


def monitor_online(
    sys: UncertainLinearSystem,
    beh: Behavior,
    u: UnsafeSpec,
    cfg: OnlineConfig,
) -> Tuple[Verdict, Log]:
    """Run the triggered-sampling monitor over ``beh``.

    Returns the verdict and the synthesized log of triggered samples. The
    behavior is read only at trigger times.
    """
    n = beh.dimension
    if not (sys.dimension == n == u.dim):
        raise DimensionError(f"dimensions differ: system {sys.dimension}, behavior {n}, unsafe {u.dim}")
    noise = _noise_vector(cfg, n)
    end = beh.horizon

    samples, witnesses, segments = [], [], []
    t = 0
    while True:
        x = beh.value_at(t)
        box = IntervalBox(x - noise, x + noise)
        samples.append(Sample(t, box))
        z = from_interval(box)
        if intersects_unsafe(z, u):
            witnesses.append(Witness(t, z, False))
        if t == end:
            break
        trigger, fp = _plan(sys, z, t, u, cfg, end - t)
        segments.append(Flowpipe(t, fp.sets[: trigger - t + 1]))
        t = trigger
    if not segments:
        segments.append(Flowpipe(0, (from_interval(samples[0].region),)))
    return Verdict(tuple(witnesses), tuple(segments)), Log(n, tuple(samples))
