import numpy as np
import pytest

from boundmon.dynamics import UncertainLinearSystem
from boundmon.errors import DimensionError, InvalidSetError
from boundmon.geometry import Halfspace, UnsafeSpec, Zonotope, contains_point, interval_hull
from boundmon.loggen import GenConfig, generate, generate_log, simulate_behavior
from boundmon.offline import monitor_offline

from helpers import random_init, random_system

DOUBLING = UncertainLinearSystem([[2.0]])
JITTER = UncertainLinearSystem([[0.9, 0.1], [-0.1, 0.95]], {(0, 0): (-0.05, 0.05), (1, 1): (-0.02, 0.03)})
BOX2 = Zonotope([1.0, 1.0], np.eye(2) * 0.2)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(length=0), dict(log_probability=1.5), dict(log_probability=-0.1), dict(noise=(np.nan,)), dict(seed=-1), dict(seed=2**64)],
    )
    def test_rejects(self, kwargs):
        base = dict(init=BOX2, length=5, log_probability=0.5)
        base.update(kwargs)
        with pytest.raises(InvalidSetError):
            GenConfig(**base)

    def test_noise_arity(self):
        with pytest.raises(DimensionError):
            generate(JITTER, GenConfig(BOX2, 5, 0.5, (0.1, 0.1, 0.1)))

    def test_init_dimension(self):
        with pytest.raises(DimensionError):
            simulate_behavior(DOUBLING, GenConfig(BOX2, 5, 0.5))


class TestSimulate:
    def test_exact_without_uncertainty(self):
        a = np.array([[0.5, 0.1], [0.0, 0.8]])
        beh = simulate_behavior(UncertainLinearSystem(a), GenConfig(Zonotope.point([1.0, 2.0]), 5, 0.0))
        x = np.array([1.0, 2.0])
        for t in range(6):
            np.testing.assert_allclose(beh.value_at(t), x)
            x = a @ x

    def test_doubling(self):
        beh = simulate_behavior(DOUBLING, GenConfig(Zonotope.point([1.0]), 3, 0.0))
        assert beh.values[:, 0].tolist() == [1.0, 2.0, 4.0, 8.0]

    def test_same_seed_same_behavior(self):
        cfg = GenConfig(BOX2, 30, 0.3, (0.1,), seed=99)
        assert np.array_equal(simulate_behavior(JITTER, cfg).values, simulate_behavior(JITTER, cfg).values)

    def test_different_seed_differs(self):
        a = simulate_behavior(JITTER, GenConfig(BOX2, 30, 0.3, seed=1))
        b = simulate_behavior(JITTER, GenConfig(BOX2, 30, 0.3, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_start_inside_init(self):
        for seed in range(20):
            beh = simulate_behavior(JITTER, GenConfig(BOX2, 1, 0.0, seed=seed))
            assert contains_point(BOX2, beh.value_at(0))


class TestGenerate:
    def test_p_one_logs_every_step(self):
        assert generate_log(JITTER, GenConfig(BOX2, 25, 1.0)).times == list(range(26))

    def test_p_zero_logs_only_start(self):
        assert generate_log(JITTER, GenConfig(BOX2, 25, 0.0)).times == [0]

    def test_noise_free_samples_are_states(self):
        cfg = GenConfig(BOX2, 40, 0.5, (0.0,), seed=11)
        beh = simulate_behavior(JITTER, cfg)
        log = generate_log(JITTER, cfg)
        assert len(log) > 1
        for s in log.samples:
            z = s.zonotope
            assert z.order == 0
            assert np.array_equal(z.center, beh.value_at(s.time))

    def test_samples_contain_states(self):
        cfg = GenConfig(BOX2, 60, 0.4, (0.05, 0.2), seed=5)
        beh, log = generate(JITTER, cfg)
        for s in log.samples:
            h = interval_hull(s.zonotope)
            x = beh.value_at(s.time)
            assert np.all(h.lower <= x) and np.all(x <= h.upper)
            np.testing.assert_allclose(h.upper - h.lower, [0.1, 0.4])

    def test_behavior_independent_of_probability(self):
        # logging draws come from their own stream, so sparser logs are sublogs
        base = dict(init=BOX2, length=50, noise=(0.1,), seed=3)
        b1, l1 = generate(JITTER, GenConfig(log_probability=0.1, **base))
        b2, l2 = generate(JITTER, GenConfig(log_probability=0.6, **base))
        assert np.array_equal(b1.values, b2.values)
        assert set(l1.times) <= set(l2.times)


def test_mean_sample_count():
    T, p = 120, 0.15
    counts = np.array([len(generate_log(JITTER, GenConfig(BOX2, T, p, seed=s))) for s in range(200)])
    se = counts.std(ddof=1) / np.sqrt(len(counts))
    assert abs(counts.mean() - (1 + p * T)) <= 3 * se


def test_generated_behaviors_are_admissible():
    escapes = checked = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        sys = random_system(rng, n=int(rng.integers(1, 3)), max_half_width=0.1, radius=1.0)
        n = sys.dimension
        cfg = GenConfig(random_init(rng, n, scale=0.3), 12, 0.3, (0.05,), seed=seed)
        beh, log = generate(sys, cfg)
        far = UnsafeSpec((Halfspace(np.ones(n), 1e6),))
        for seg in monitor_offline(sys, log, far, refine=False).segments:
            for t in seg.times:
                escapes += not contains_point(seg.at(t), beh.value_at(t))
                checked += 1
    assert checked >= 100
    assert escapes == 0
