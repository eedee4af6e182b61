import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from sawtorus.rng import splitmix64, substream, torus_points, uniform


def reference(seed, count):
    """Plain-integer SplitMix64 with the state carried step by step."""
    mask = (1 << 64) - 1
    state, out = seed, []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def test_first_output_for_seed_zero():
    assert int(splitmix64(0, 0, 1)[0]) == 16294208416658607535


@given(st.integers(0, 2**64 - 1))
def test_matches_sequential_reference(seed):
    assert [int(v) for v in splitmix64(seed, 0, 20)] == reference(seed, 20)


@given(st.integers(0, 2**32), st.integers(0, 500), st.integers(1, 300))
def test_ranges_are_independent_of_chunking(seed, start, count):
    whole = uniform(seed, start + count)
    assert np.array_equal(uniform(seed, count, start), whole[start:])


def test_points_in_unit_square_and_layout():
    pts = torus_points(3, 1000)
    assert pts.shape == (1000, 2)
    assert (pts >= 0).all() and (pts < 1).all()
    assert np.array_equal(pts.ravel(), uniform(3, 2000))
    assert np.array_equal(torus_points(3, 10, 990), pts[990:])


def test_substreams_differ():
    seeds = {substream(7, k) for k in range(100)}
    assert len(seeds) == 100
    assert substream(7, 3) == substream(7, 3)
    assert not np.array_equal(uniform(substream(7, 0), 10), uniform(substream(7, 1), 10))
