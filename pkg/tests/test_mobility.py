import numpy as np
import pytest

from linkhyst.mobility import (
    ChainScenarioParams,
    ConfigError,
    Linear,
    Static,
    TrafficParams,
    build_chain_scenario,
    distance,
    kmh_to_ms,
    position_at,
)
from linkhyst.radio import PropagationParams
from linkhyst.routing import TimingParams


def build(**kw):
    return build_chain_scenario(ChainScenarioParams(**kw), PropagationParams(), TimingParams(), TrafficParams())


def test_static_position():
    tr = Static((5.0, 0.0))
    assert position_at(tr, 0.0) == (5.0, 0.0)
    assert position_at(tr, 123.4) == (5.0, 0.0)


def test_linear_position():
    tr = Linear((0.0, 0.0), (kmh_to_ms(20), 0.0))
    x, y = position_at(tr, 10.0)
    assert x == pytest.approx(55.555555555, abs=1e-6)
    assert y == 0.0


def test_linear_clamped_before_start():
    tr = Linear((1.0, 2.0), (3.0, 4.0), start_time=2.0)
    assert position_at(tr, 1.0) == (1.0, 2.0)
    assert position_at(tr, 3.0) == (4.0, 6.0)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        position_at(Static((0.0, 0.0)), -1.0)


def test_speed_conversion_exact():
    for v in (20, 40, 60, 80, 100):
        assert kmh_to_ms(v) == v / 3.6


def test_default_chain_positions():
    sc = build()
    xs = [sc.position(i, 0.0)[0] for i in range(10)]
    assert xs == [100.0 * i for i in range(10)]
    assert sc.position(10, 0.0) == (-10.0, 0.0)
    assert sc.source == 10 and sc.sink == 0


def test_end_time_at_100kmh():
    sc = build(speed=100.0, sim_padding=10.0)
    assert sc.end_time == pytest.approx(910 / (100 / 3.6) + 10)
    assert sc.end_time == pytest.approx(42.76, abs=0.01)


def test_small_chain():
    sc = build(n_static=2, spacing=50.0)
    assert [sc.position(i, 0.0)[0] for i in range(2)] == [0.0, 50.0]
    assert sc.position(2, 0.0)[0] == -10.0


@pytest.mark.parametrize(
    "kw,field",
    [
        ({"n_static": 1}, "scenario.n_static"),
        ({"spacing": -5.0}, "scenario.spacing"),
        ({"speed": 0.0}, "scenario.speed"),
    ],
)
def test_invalid_params(kw, field):
    with pytest.raises(ConfigError) as exc:
        build(**kw)
    assert exc.value.field == field


@pytest.mark.parametrize("node", range(10))
def test_distance_decreases_then_increases(node):
    sc = build(speed=60.0)
    ts = np.linspace(0.0, sc.end_time, 2001)
    d = np.array([distance(sc.position(10, t), sc.position(node, t)) for t in ts])
    k = int(np.argmin(d))
    assert np.all(np.diff(d[: k + 1]) <= 1e-9)
    assert np.all(np.diff(d[k:]) >= -1e-9)
