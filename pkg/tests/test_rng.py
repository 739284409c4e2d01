import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parde import rng as R
from parde.rng import RngStream, split_stream


def test_same_seed_same_sequence():
    a = RngStream(1).generation(0).row(0)
    b = RngStream(1).generation(0).row(0)
    assert [a.uniform() for _ in range(50)] == [b.uniform() for _ in range(50)]


def test_split_stream_matches_chained_children():
    root = RngStream(9)
    assert split_stream(root, 3, 4).key == root.generation(3).row(4).key


def test_first_draw_is_inside_open_interval():
    u = split_stream(RngStream(1), 5, 3).uniform()
    assert 0.0 < u < 1.0


def test_ten_million_draws_stay_in_open_interval():
    key = np.uint64(RngStream(3).key)
    for chunk in range(10):
        u = R.uniform_at(key, np.arange(chunk * 10**6, (chunk + 1) * 10**6, dtype=np.uint64))
        assert u.min() > 0.0 and u.max() < 1.0


def test_extreme_bits_map_inside_interval():
    lo = R._to_unit(np.array([0], dtype=np.uint64))[0]
    hi = R._to_unit(np.array([2**64 - 1], dtype=np.uint64))[0]
    assert 0.0 < lo < hi < 1.0


def test_no_collisions_across_ten_thousand_row_keys():
    root = RngStream(1).generation(0)
    keys = R.row_keys(root, np.arange(10_000))
    first = R.bits_at(keys, 0)
    assert len(np.unique(keys)) == 10_000
    assert len(np.unique(first)) == 10_000


def test_neighbouring_rows_differ():
    g = RngStream(1).generation(0)
    assert g.row(0).uniform() != g.row(1).uniform()


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**64 - 1),
    g=st.integers(0, 10**6),
    i=st.integers(0, 10**6),
    p=st.sampled_from([R.INIT, R.SHUFFLE, R.OFFSET, R.PERM, R.BASE, R.JRAND, R.CROSS, R.MUT]),
)
def test_scalar_and_vector_paths_agree(seed, g, i, p):
    gen = RngStream(seed).generation(g)
    stream = gen.row(i).purpose(p)
    key = R.row_keys(gen, [i], p)[0]
    assert int(key) == stream.key
    counters = np.arange(8, dtype=np.uint64)
    assert R.bits_at(key, counters).tolist() == [stream.bits_at(c) for c in range(8)]
    assert R.uniform_at(key, counters).tolist() == [stream.uniform_at(c) for c in range(8)]
    assert R.integers_at(key, counters, 7).tolist() == [stream.integer_at(c, 7) for c in range(8)]


def test_cursor_and_positional_draws_agree(rng):
    positional = [rng.uniform_at(c) for c in range(10)]
    block = rng.uniforms(5).tolist()
    tail = [rng.uniform() for _ in range(5)]
    assert block + tail == positional


def test_integers_cover_range_uniformly():
    key = np.uint64(RngStream(5).key)
    counts = np.bincount(R.integers_at(key, np.arange(60_000, dtype=np.uint64), 6), minlength=6)
    sd = np.sqrt(60_000 * (1 / 6) * (5 / 6))
    assert np.all(np.abs(counts - 10_000) <= 4 * sd)


def test_uniform_mean_and_variance():
    u = R.uniform_at(np.uint64(RngStream(8).key), np.arange(10**6, dtype=np.uint64))
    assert abs(u.mean() - 0.5) < 3 * np.sqrt(1 / 12 / 10**6)
    assert abs(u.var() - 1 / 12) < 1e-3


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_out_of_range_rejected(seed):
    with pytest.raises(ValueError):
        RngStream(seed)


def test_children_do_not_share_cursor(rng):
    a = rng.row(0)
    a.uniform()
    assert rng.row(0).uniform() == rng.row(0).uniform_at(0)
