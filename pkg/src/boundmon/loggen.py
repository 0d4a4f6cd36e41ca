"""Random ground-truth behaviors and noisy aperiodic logs drawn from the bounding model.

Seeding contract: ``seed`` feeds ``numpy.random.SeedSequence``, which is
spawned into two PCG64 streams. The first drives the behavior (the initial
``xi``, then one uniform per uncertain cell per step in sorted cell order);
the second drives the per-step logging decisions. Both are stable across
platforms, so a seed fully determines the outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dynamics import UncertainLinearSystem
from .errors import DimensionError, InvalidSetError
from .geometry import IntervalBox, Zonotope
from .offline import Log, Sample
from .online import Behavior


@dataclass(frozen=True, eq=False)
class GenConfig:
    init: Zonotope
    length: int
    log_probability: float
    noise: Tuple[float, ...] = (0.0,)
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise InvalidSetError("length must be >= 1")
        if not 0.0 <= self.log_probability <= 1.0:
            raise InvalidSetError("log probability must lie in [0, 1]")
        noise = tuple(float(x) for x in np.atleast_1d(self.noise))
        if not all(np.isfinite(x) and x >= 0 for x in noise):
            raise InvalidSetError("noise half-widths must be finite and nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSetError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "seed", int(self.seed))


def _streams(seed: int):
    behavior_seq, log_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(behavior_seq)), np.random.Generator(np.random.PCG64(log_seq))


def _simulate(sys: UncertainLinearSystem, cfg: GenConfig, rng: np.random.Generator) -> Behavior:
    if cfg.init.dim != sys.dimension:
        raise DimensionError(f"initial set dimension {cfg.init.dim} vs system {sys.dimension}")
    xs = np.empty((cfg.length + 1, sys.dimension))
    xs[0] = cfg.init.sample(rng)[0]
    for t in range(cfg.length):
        xs[t + 1] = sys.sample_matrix(rng) @ xs[t]
    return Behavior(xs)


def simulate_behavior(sys: UncertainLinearSystem, cfg: GenConfig) -> Behavior:
    return _simulate(sys, cfg, _streams(cfg.seed)[0])


def generate(sys: UncertainLinearSystem, cfg: GenConfig) -> Tuple[Behavior, Log]:
    """The behavior and a log drawn from it: ``t = 0`` always, later steps with probability ``p``."""
    beh_rng, log_rng = _streams(cfg.seed)
    beh = _simulate(sys, cfg, beh_rng)
    n = sys.dimension
    if len(cfg.noise) not in (1, n):
        raise DimensionError(f"noise has {len(cfg.noise)} entries for dimension {n}")
    noise = np.array(cfg.noise) if len(cfg.noise) == n else np.full(n, cfg.noise[0])
    keep = np.concatenate(([True], log_rng.uniform(size=cfg.length) < cfg.log_probability))
    samples = []
    for t in np.flatnonzero(keep):
        x = beh.values[t]
        box = IntervalBox(x - noise, x + noise)
        assert np.all(box.lower <= x) and np.all(x <= box.upper)
        samples.append(Sample(int(t), box))
    return beh, Log(n, tuple(samples))


def generate_log(sys: UncertainLinearSystem, cfg: GenConfig) -> Log:
    return generate(sys, cfg)[1]
