"""Exit criteria for the build, one test per criterion.

Run alone with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import random
import time
from dataclasses import replace

import pytest
from scipy import stats

from linkhyst import adjacency as adj
from linkhyst.adjacency import LinkStatus
from linkhyst.config import ExperimentConfig
from linkhyst.engine import EventQueue
from linkhyst.experiment import build_network, sweep
from linkhyst.metrics import mean_ci95, pdr
from linkhyst.mobility import Scenario, Static, TrafficParams, kmh_to_ms
from linkhyst.radio import PropagationParams, deterministic_range
from linkhyst.routing import Algorithm, Network, TimingParams
from oracles import pseudocode_hysteresis

pytestmark = pytest.mark.acceptance

CFG = ExperimentConfig()


@pytest.fixture(scope="module")
def default_sweep():
    results = sweep(CFG)
    by_cell = {}
    for r in results:
        by_cell.setdefault((r.speed, r.algorithm), []).append(r)
    return results, by_cell


def _report(label, detail):
    print(f"{label}: {detail}")


# 1 -------------------------------------------------------------------------
def test_ac1_baseline_invalidation_latency():
    start = time.perf_counter()
    timing = TimingParams()
    sc = Scenario([Static((0.0, 0.0)), Static((100.0, 0.0))], PropagationParams(), timing,
                  TrafficParams(), source=1, sink=0, end_time=60.0)
    net = Network(sc, Algorithm.LOSS, CFG.loss, CFG.signal_params(), seed=1, traffic=False)
    t0 = 20.0
    net.run(t0)
    assert net.nodes[0].entries[1].link_quality >= 0.8
    assert net.nodes[0].entries[1].status is LinkStatus.VALID
    net.stop_node(1)
    net.run(40.0)
    inv = [c for c in net.link_changes if c.node == 0 and c.neighbor == 1 and c.kind == "Invalidated"]
    assert len(inv) == 1
    latency = inv[0].t - t0
    granularity = timing.hello_interval
    _report("AC1", f"invalidated {latency:.3f} s after the neighbor went silent (4 +/- {granularity} s)")
    assert abs(latency - 4.0) <= granularity
    assert time.perf_counter() - start < 1.0


# 2 -------------------------------------------------------------------------
def test_ac2_anticipation_before_range_boundary():
    cfg = replace(CFG, radio=replace(CFG.radio, shadowing_sigma=0.0, bernoulli_loss_prob=0.0))
    speed = 60.0
    r_star = deterministic_range(cfg.propagation())
    v = kmh_to_ms(speed)
    nets = {}
    for algo in (Algorithm.LOSS, Algorithm.SIGNAL):
        nets[algo] = build_network(cfg, speed, algo, seed=1)
        nets[algo].run()
    mobile = nets[Algorithm.SIGNAL].scenario.source
    end = nets[Algorithm.SIGNAL].scenario.end_time
    checked = 0
    for i in range(cfg.scenario.n_static):
        x = i * cfg.scenario.spacing
        t_pass = (x + cfg.scenario.mobile_start_offset) / v
        t_cross = t_pass + r_star / v
        if t_cross >= end:
            continue

        def first_loss(net):
            ts = [c.t for c in net.link_changes
                  if c.node == mobile and c.neighbor == i and c.t > t_pass and c.kind in ("Invalidated", "Expired")]
            return ts[0] if ts else float("inf")

        t_sig = first_loss(nets[Algorithm.SIGNAL])
        t_loss = first_loss(nets[Algorithm.LOSS])
        _report("AC2", f"link mobile-s{i}: r* crossed at {t_cross:.2f} s, signal drops at {t_sig:.2f} s, loss at {t_loss:.2f} s")
        assert t_sig < t_cross < t_loss
        checked += 1
    assert checked >= 1


# 3 -------------------------------------------------------------------------
def test_ac3_pdr_dominance(default_sweep):
    _, cells = default_sweep
    for speed in CFG.sweep.speeds_kmh:
        sig = mean_ci95([pdr(r) for r in cells[(speed, "signal")]])
        loss = mean_ci95([pdr(r) for r in cells[(speed, "loss")]])
        _report("AC3", f"{speed:g} km/h: signal {sig.mean:.3f} +/- {sig.ci95_halfwidth:.3f}, loss {loss.mean:.3f} +/- {loss.ci95_halfwidth:.3f}")
        assert sig.mean >= loss.mean


# 4 -------------------------------------------------------------------------
def test_ac4_near_perfect_pdr_at_moderate_speed(default_sweep):
    _, cells = default_sweep
    moderate = [s for s in CFG.sweep.speeds_kmh if s <= 60]
    assert moderate
    for speed in moderate:
        m = sum(pdr(r) for r in cells[(speed, "signal")]) / len(cells[(speed, "signal")])
        _report("AC4", f"{speed:g} km/h: signal mean PDR {m:.4f} (need >= 0.95)")
        assert m >= 0.95


# 5 -------------------------------------------------------------------------
def test_ac5_overhead_parity(default_sweep):
    results, _ = default_sweep
    per_cell = {}
    for r in results:
        per_cell.setdefault((r.speed, r.run_seed), {})[r.algorithm] = r.control_transmissions
    assert len(per_cell) == len(CFG.sweep.speeds_kmh) * len(CFG.sweep.seeds)
    for cell, counts in per_cell.items():
        assert counts["loss"] == counts["signal"], cell
    _report("AC5", f"{len(per_cell)} (speed, seed) cells with identical control transmission counts")


# 6 -------------------------------------------------------------------------
def _random_case(rng):
    params = adj.SignalHysteresisParams(
        ss_threshold_low=-95.0,
        ss_threshold_high=rng.uniform(-85.0, -60.0),
        hyst_ss_scaling=rng.uniform(0.05, 0.95),
        delta=rng.uniform(0.2, 10.0),
    )
    seq = []
    for _ in range(rng.randint(1, 40)):
        if rng.random() < 0.2:
            seq.append(("miss", None))
        else:
            seq.append(("hello", rng.uniform(-100.0, -50.0)))
    return params, seq


def test_ac6_oracle_equivalence():
    rng = random.Random(20251014)
    for case in range(10_000):
        params, seq = _random_case(rng)
        e = adj.create_entry(1, params)
        ref = pseudocode_hysteresis(seq, params.ss_threshold_high, params.hyst_ss_scaling, params.delta,
                                    params.hyst_threshold_high, params.hyst_threshold_low, params.initial_quality)
        for (kind, ss), (rq, rpending, racc, rstatus) in zip(seq, ref):
            if kind == "hello":
                e, _ = adj.signal_on_hello(e, ss, params)
            else:
                e, _ = adj.on_hello_miss_signal(e, params)
            assert abs(e.link_quality - rq) <= 1e-12, case
            assert (e.pending, e.sum_sig_var, e.status.value) == (rpending, racc, rstatus), case
    _report("AC6", "10000 random sequences match the pseudocode transcription")


# 7 -------------------------------------------------------------------------
def test_ac7_invariant_suite():
    rng = random.Random(7)
    allowed = {(LinkStatus.PENDING, LinkStatus.VALID), (LinkStatus.VALID, LinkStatus.INVALID),
               (LinkStatus.INVALID, LinkStatus.VALID)}
    for _ in range(2000):
        params, seq = _random_case(rng)
        loss_p = adj.LossHysteresisParams(hyst_scaling=params.hyst_ss_scaling)
        e = adj.create_entry(1, params)
        le = adj.create_entry(1, loss_p)
        for kind, ss in seq:
            before = e
            if kind == "hello":
                e, ev = adj.signal_on_hello(e, ss, params)
                le, _ = adj.loss_on_hello(le, loss_p)
            else:
                e, ev = adj.on_hello_miss_signal(e, params)
                le, _ = adj.loss_on_miss(le, loss_p)
            # quality bounds, both algorithms
            assert 0.0 <= e.link_quality <= 1.0 and 0.0 <= le.link_quality <= 1.0
            # state machine
            if before.status is not e.status:
                assert (before.status, e.status) in allowed and ev.changed
                assert e.sum_sig_var == 0.0
                if e.status is LinkStatus.VALID:
                    assert e.link_quality >= params.hyst_threshold_high
                else:
                    assert e.link_quality <= params.hyst_threshold_low
            else:
                assert not ev.changed
            # trigger reset
            if kind == "hello" and ss <= params.ss_threshold_high and e.link_quality != before.link_quality:
                assert e.sum_sig_var == 0.0
            # pending cap
            if kind == "hello" and before.pending and ss <= params.ss_threshold_high:
                assert e.link_quality <= max(before.link_quality, params.hyst_threshold_high)

    # event-order determinism and replay determinism on a full run
    orders = []
    hashes = []
    for _ in range(2):
        net = build_network(CFG, 80.0, Algorithm.SIGNAL, seed=3)
        order = []
        net.start()
        net.queue.run_until(net.scenario.end_time, observer=lambda ev: order.append((ev.fire_at, ev.seq)))
        assert order == sorted(order)
        orders.append(order)
        hashes.append(net.trace_hash())
    assert orders[0] == orders[1]
    assert hashes[0] == hashes[1]
    _report("AC7", f"invariants hold; replay trace hash {hashes[0][:16]}...")


# 8 -------------------------------------------------------------------------
def test_ac8_statistics():
    samples = [0.812, 0.845, 0.790, 0.861, 0.833, 0.808, 0.877, 0.826]
    ours = mean_ci95(samples)
    n = len(samples)
    mean = sum(samples) / n
    lo, hi = stats.t.interval(0.95, n - 1, loc=mean, scale=stats.sem(samples))
    assert ours.mean == pytest.approx(mean, rel=1e-6)
    assert ours.ci95_halfwidth == pytest.approx((hi - lo) / 2, rel=1e-6)
    s = (sum((x - mean) ** 2 for x in samples) / (n - 1)) ** 0.5
    assert ours.ci95_halfwidth == pytest.approx(2.3646 * s / n**0.5, rel=1e-4)
    _report("AC8", f"half-width {ours.ci95_halfwidth:.6f} vs scipy {(hi - lo) / 2:.6f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
