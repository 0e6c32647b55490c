import math

from hypothesis import given, strategies as st

from crowdcoop.rng import RunRng


def test_streams_are_reproducible():
    a, b = RunRng(42), RunRng(42)
    assert [a.offset.uniform() for _ in range(5)] == [b.offset.uniform() for _ in range(5)]
    assert a.order.shuffle(list(range(10))) == b.order.shuffle(list(range(10)))


def test_streams_are_independent():
    # drawing from one stream leaves the others untouched
    a, b = RunRng(5), RunRng(5)
    for _ in range(100):
        a.offset.uniform()
    assert a.order.shuffle(list(range(14))) == b.order.shuffle(list(range(14)))


@given(st.integers(0, 2**64 - 1), st.lists(st.integers(), max_size=30))
def test_shuffle_is_permutation(seed, items):
    assert sorted(RunRng(seed).order.shuffle(items)) == sorted(items)


def test_normal_moments():
    s = RunRng(3).speed
    xs = [s.normal(1.34, 0.26) for _ in range(20000)]
    mean = sum(xs) / len(xs)
    sd = math.sqrt(sum((x - mean) ** 2 for x in xs) / (len(xs) - 1))
    assert abs(mean - 1.34) < 0.01
    assert abs(sd - 0.26) < 0.01


@given(st.integers(0, 2**32))
def test_truncated_normal_bounds(seed):
    v = RunRng(seed).speed.truncated_normal(1.34, 0.26, 0.5, 2.2)
    assert 0.5 <= v <= 2.2
