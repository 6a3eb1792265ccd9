import math

import numpy as np
import pytest

from umwsim.errors import ConfigError
from umwsim.traffic import (
    ArrivalProcess,
    TrafficClass,
    arrival_table,
    class_streams,
    effective_amax,
    generate_arrivals,
    sweep_subseed,
    validate_classes,
)


def _cls(cid=0, kind="unicast", source=0, dests=(1,), rate=0.5):
    return TrafficClass(cid, kind, source, frozenset(dests), rate)


def test_zero_rate_never_arrives():
    table = arrival_table([_cls(rate=0.0)], ArrivalProcess("bernoulli"), 5000, 1)
    assert table.sum() == 0


def test_bernoulli_rate_one_always_arrives():
    table = arrival_table([_cls(rate=1.0)], ArrivalProcess("bernoulli"), 5000, 1)
    assert (table == 1).all()


def test_bernoulli_rate_above_one_rejected():
    with pytest.raises(ConfigError):
        arrival_table([_cls(rate=1.5)], ArrivalProcess("bernoulli"), 10, 1)


def test_binomial_rate_beyond_trials_rejected():
    with pytest.raises(ConfigError):
        arrival_table([_cls(rate=3.0)], ArrivalProcess("binomial", trials=2), 10, 1)


@pytest.mark.parametrize(
    "process,rate",
    [
        (ArrivalProcess("bernoulli"), 0.37),
        (ArrivalProcess("binomial", trials=4), 1.3),
        (ArrivalProcess("poisson"), 2.1),
    ],
)
def test_empirical_mean_within_one_percent(process, rate):
    table = arrival_table([_cls(rate=rate)], process, 10**6, 12345)
    assert abs(table.mean() - rate) / rate < 0.01


def test_effective_amax():
    bern = [_cls(0), _cls(1, dests=(2,), source=1)]
    assert effective_amax(bern, ArrivalProcess("bernoulli")) == 2
    assert effective_amax([_cls(0)], ArrivalProcess("binomial", trials=4)) == 4
    assert effective_amax([_cls(0)], ArrivalProcess("poisson")) == math.inf


def test_reproducibility_bit_for_bit():
    classes = [_cls(0, rate=0.4), _cls(1, source=1, dests=(0,), rate=0.7)]
    p = ArrivalProcess("binomial", trials=3)
    t1 = arrival_table(classes, p, 2000, 9)
    t2 = arrival_table(classes, p, 2000, 9)
    assert np.array_equal(t1, t2)
    t3 = arrival_table(classes, p, 2000, 10)
    assert not np.array_equal(t1, t3)


def test_cross_class_streams_differ():
    classes = [_cls(0, rate=0.5), _cls(1, source=1, dests=(0,), rate=0.5)]
    table = arrival_table(classes, ArrivalProcess("bernoulli"), 500, 3)
    assert not np.array_equal(table[:, 0], table[:, 1])


def test_sequential_draws_match_table():
    classes = [_cls(0, rate=0.6), _cls(1, source=1, dests=(0,), rate=0.2)]
    for process in (ArrivalProcess("bernoulli"), ArrivalProcess("poisson"),
                    ArrivalProcess("binomial", trials=2)):
        table = arrival_table(classes, process, 100, 17)
        streams = class_streams(classes, 17)
        rows = []
        for _ in range(100):
            drawn = generate_arrivals(classes, process, streams)
            rows.append([drawn[c.id] for c in classes])
        assert np.array_equal(table, np.array(rows))


def test_sweep_subseed_deterministic():
    assert sweep_subseed(5, 0) == sweep_subseed(5, 0)
    assert sweep_subseed(5, 0) != sweep_subseed(5, 1)
    assert sweep_subseed(5, 0) != sweep_subseed(6, 0)


def test_class_shape_validation():
    with pytest.raises(ConfigError):
        TrafficClass(0, "unicast", 0, frozenset({1, 2}), 1.0)
    with pytest.raises(ConfigError):
        TrafficClass(0, "unicast", 0, frozenset(), 1.0)
    with pytest.raises(ConfigError):
        TrafficClass(0, "warpcast", 0, frozenset({1}), 1.0)
    with pytest.raises(ConfigError):
        TrafficClass(0, "unicast", 0, frozenset({1}), -0.5)


def test_validate_classes_against_graph():
    ok = [
        TrafficClass(0, "broadcast", 0, frozenset({0, 1, 2}), 1.0),
        TrafficClass(1, "multicast", 0, frozenset({1, 2}), 1.0),
    ]
    validate_classes(ok, 3)
    with pytest.raises(ConfigError):
        validate_classes([TrafficClass(0, "broadcast", 0, frozenset({0, 1}), 1.0)], 3)
    with pytest.raises(ConfigError):
        validate_classes([TrafficClass(0, "multicast", 0, frozenset({1, 2, 0}), 1.0)], 3)
    with pytest.raises(ConfigError):
        validate_classes([TrafficClass(0, "multicast", 0, frozenset({1}), 1.0)], 3)
    with pytest.raises(ConfigError):
        validate_classes([TrafficClass(0, "unicast", 5, frozenset({1}), 1.0)], 3)
    with pytest.raises(ConfigError):
        validate_classes([_cls(0), _cls(0)], 3)


def test_scaled():
    cls = _cls(rate=2.0)
    assert cls.scaled(0.45).rate == 0.9
    assert cls.scaled(0.45).destinations == cls.destinations
