import math
import random

import pytest
from hypothesis import given, strategies as st
from scipy import stats

from linkhyst.metrics import T_975, RunResult, mean_ci95, overhead, pdr, t_quantile_975


def run(sent, received, control=0):
    return RunResult(sent, received, control, run_seed=1, speed=20.0, algorithm="loss")


def test_pdr_values():
    assert pdr(run(200, 190)) == 0.95
    assert pdr(run(10, 0)) == 0.0
    assert pdr(run(7, 7)) == 1.0


def test_pdr_undefined_without_traffic():
    with pytest.raises(ValueError):
        pdr(run(0, 0))


def test_received_cannot_exceed_sent():
    with pytest.raises(ValueError):
        run(1, 2)


def test_overhead_units():
    r = RunResult(1, 1, 15, 1, 20.0, "loss", control_bytes=240)
    assert overhead(r) == 15
    assert overhead(r, "bytes") == 240
    assert overhead(run(1, 1, 0)) == 0


def test_t_table_against_independent_quantiles():
    for df in range(1, 65):
        assert T_975[df - 1] == pytest.approx(stats.t.ppf(0.975, df), rel=1e-10)
    # published two-sided 95% table values
    assert t_quantile_975(1) == pytest.approx(12.706, abs=5e-4)
    assert t_quantile_975(7) == pytest.approx(2.3646, abs=5e-5)
    assert t_quantile_975(200) == pytest.approx(1.96, abs=1e-3)


def test_ci_of_constant_samples_is_zero():
    s = mean_ci95([0.7] * 8)
    assert s.mean == pytest.approx(0.7) and s.ci95_halfwidth == 0.0 and s.n == 8


def test_ci_two_samples():
    s = mean_ci95([0.0, 1.0])
    assert s.mean == 0.5
    assert s.ci95_halfwidth == pytest.approx(12.706 * 0.5, abs=1e-3)
    assert s.ci95_halfwidth == pytest.approx(6.353, abs=1e-3)


def test_ci_eight_samples_matches_scipy():
    xs = [0.91, 0.95, 0.88, 0.97, 0.93, 0.99, 0.90, 0.94]
    s = mean_ci95(xs)
    lo, hi = stats.t.interval(0.95, len(xs) - 1, loc=sum(xs) / 8, scale=stats.sem(xs))
    assert s.ci95_halfwidth == pytest.approx((hi - lo) / 2, rel=1e-9)


def test_ci_needs_two_samples():
    with pytest.raises(ValueError):
        mean_ci95([1.0])


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30), st.randoms())
def test_ci_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    a, b = mean_ci95(xs), mean_ci95(ys)
    assert a == b
    assert a.ci95_halfwidth >= 0
