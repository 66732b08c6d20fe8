import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavecap import capacity as cap
from wavecap.channel import assemble
from wavecap.config import PhysicalConfig


def grid_search_rate(gains, P, N_W, steps=200):
    best = -1.0
    for c in itertools.product(range(steps + 1), repeat=len(gains) - 1):
        if sum(c) > steps:
            continue
        alloc = np.array(list(c) + [steps - sum(c)]) * P / steps
        best = max(best, np.sum(np.log2(1 + gains * alloc / N_W)))
    return best


@pytest.mark.parametrize("gains", [[1.0, 0.5, 0.1], [3.0, 2.9, 0.01], [0.2, 0.2, 0.2]])
def test_waterfill_matches_simplex_search(gains):
    gains = np.array(gains)
    res = cap.waterfill(gains, 2.0, 1.0)
    search = grid_search_rate(gains, 2.0, 1.0)
    assert res.rate >= search - 1e-12
    assert res.rate - search < 1e-3


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.floats(1e-4, 1e4), min_size=1, max_size=12),
    st.floats(1e-3, 1e3),
    st.floats(1e-3, 1e3),
)
def test_waterfill_kkt(gains, P, N_W):
    g = np.array(gains)
    res = cap.waterfill(g, P, N_W)
    a = res.allocation
    assert np.all(a >= 0)
    assert a.sum() == pytest.approx(P, rel=1e-10)
    floors = N_W / g
    on = a > 0
    assert np.allclose(a[on] + floors[on], res.water_level, rtol=1e-9)
    assert np.all(floors[~on] >= res.water_level * (1 - 1e-12))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=8), st.floats(1e-2, 1e2), st.floats(0.1, 10))
def test_waterfill_scale_invariance(gains, P, c):
    g = np.array(gains)
    a = cap.waterfill(g, P, 1.0).rate
    b = cap.waterfill(c * g, P, c).rate
    assert b == pytest.approx(a, rel=1e-10)


def test_waterfill_edge_cases():
    assert cap.waterfill([], 1.0, 1.0).rate == 0.0
    with pytest.raises(ValueError):
        cap.waterfill([1.0, 0.0], 1.0, 1.0)
    with pytest.raises(ValueError):
        cap.waterfill([1.0], 0.0, 1.0)


def test_equal_gains_give_closed_form():
    M, alpha, P, N_W, W = 30, 0.1, 1.0, 0.1, 1e5
    res = cap.waterfill(np.full(M, alpha / M * M), P, N_W)
    # each of M channels with gain alpha gets P/M
    assert W * res.rate == pytest.approx(cap.closed_form_rate(M, alpha, P, N_W, W), rel=1e-13)


def test_closed_form_and_limit():
    assert cap.closed_form_rate(0, 0.1, 1.0, 1.0, 1.0) == 0.0
    assert cap.closed_form_rate(1, 1.0, 1.0, 1.0, 2.0) == pytest.approx(2.0)
    assert cap.capacity_limit(0.5, 2.0, 1.0) == pytest.approx(math.log2(math.e))
    with pytest.raises(ValueError):
        cap.capacity_limit(0.0, 1.0, 1.0)
    prev = 0
    for M in (1, 10, 100, 1000):
        r = cap.closed_form_rate(M, 0.1, 1.0, 0.1, 1.0)
        assert prev < r < cap.capacity_limit(0.1, 1.0, 0.1)
        prev = r


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_logdet_identity(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((50, 6)) + 1j * rng.standard_normal((50, 6))
    B = rng.standard_normal((6, 50)) + 1j * rng.standard_normal((6, 50))
    assert cap.logdet_identity_gap(A, B) < 1e-10


def test_shell_degree():
    assert cap.shell_degree(6) == 1 and cap.shell_degree(30) == 3 and cap.shell_degree(0) == 0
    with pytest.raises(ValueError):
        cap.shell_degree(20)


def test_capacity_on_small_channel():
    cfg = PhysicalConfig(n_max=1).with_dipoles(1200)
    res = cap.capacity_NM(assemble(cfg), cfg.power_w, cfg.n0_w_per_hz, cfg.bandwidth_hz, cfg.density)
    assert res.allocation.sum() == pytest.approx(cfg.power_w, rel=1e-10)
    assert abs(res.rate_bits_per_s / res.closed_form_rate - 1) < 0.02
    assert res.rate_bits_per_s < res.limit_rate * 1.01


def test_capacity_without_modes():
    cfg = PhysicalConfig(n_max=0)
    res = cap.capacity_NM(assemble(cfg), 1.0, 1e-6, 1e5, cfg.density)
    assert res.rate_bits_per_s == 0.0 and res.closed_form_rate == 0.0


def test_convergence_study_rows():
    rows = cap.convergence_study(PhysicalConfig(), [6, 16], [600])
    assert [r["M"] for r in rows] == [6, 16]
    assert set(rows[0]) == {"M", "N", "rate_finite", "rate_closed_form", "rate_limit", "ratio_to_limit"}
    assert rows[1]["rate_closed_form"] > rows[0]["rate_closed_form"]
    with pytest.raises(ValueError):
        cap.convergence_study(PhysicalConfig(), [], [600])


def test_waterfill_reference_cases():
    res = cap.waterfill([1.0, 1.0], 2.0, 1.0)
    assert np.allclose(res.allocation, [1.0, 1.0]) and res.rate == pytest.approx(2.0)
    res = cap.waterfill([1.0, 1e-9], 1.0, 1.0)
    assert res.allocation[0] == pytest.approx(1.0) and res.allocation[1] == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_waterfill_perturbation_optimal(seed):
    rng = np.random.default_rng(seed)
    g = rng.uniform(0.01, 5.0, 8)
    P, N_W = 3.0, 0.7
    res = cap.waterfill(g, P, N_W)

    def obj(a):
        return np.sum(np.log2(1 + g * a / N_W))

    base = obj(res.allocation)
    step = 1e-4 * P
    for i in range(8):
        for j in range(8):
            if i == j or res.allocation[j] < step:
                continue
            a = res.allocation.copy()
            a[i] += step
            a[j] -= step
            assert obj(a) <= base + 1e-12


def test_closed_form_reference_values():
    assert cap.closed_form_rate(1, 1.0, 1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert cap.closed_form_rate(2, 1.0, 1.0, 1.0, 1.0) == pytest.approx(1.169925, abs=1e-6)
    assert cap.capacity_limit(1.0, 1.0, 1.0) == pytest.approx(1.442695, abs=1e-6)
    assert cap.capacity_limit(0.1, 2.0, 1e-6) == pytest.approx(2 * cap.capacity_limit(0.1, 1.0, 1e-6))


def test_closed_form_gap_halves_with_M():
    lim = cap.capacity_limit(1.0, 1.0, 1.0)
    gaps = [lim - cap.closed_form_rate(M, 1.0, 1.0, 1.0, 1.0) for M in (250, 500, 1000, 2000)]
    for a, b in zip(gaps, gaps[1:]):
        assert b / a == pytest.approx(0.5, abs=1e-3)
    for M, gap in zip((250, 500, 1000, 2000), gaps):
        assert 0 < gap <= cap.LOG2E / (2 * M)


def test_rates_invariant_under_joint_power_noise_scaling():
    cfg = PhysicalConfig(n_max=1).with_dipoles(600)
    c = assemble(cfg)
    a = cap.capacity_NM(c, 1.0, 1e-6, 1e5, cfg.density)
    b = cap.capacity_NM(c, 7.0, 7e-6, 1e5, cfg.density)
    assert b.rate_bits_per_s == pytest.approx(a.rate_bits_per_s, rel=1e-12)
    assert b.limit_rate == pytest.approx(a.limit_rate, rel=1e-12)
