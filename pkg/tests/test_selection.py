import math

import numpy as np
import pytest

from parde import rng as R
from parde.core import SelectionKind
from parde.rng import RngStream
from parde.selection import (
    fisher_yates,
    random_base_index,
    select,
    select_permutation,
    select_random,
    select_random_offset,
)


def test_random_scalar_matches_vector():
    gen = RngStream(4).generation(2)
    assert select_random(30, gen).tolist() == [random_base_index(i, 30, gen) for i in range(30)]


def test_random_frequencies_within_three_sigma():
    n, gens = 10, 5000
    counts = np.zeros(n)
    root = RngStream(11)
    for g in range(gens):
        counts += np.bincount(select_random(n, root.generation(g)), minlength=n)
    total = n * gens
    sd = math.sqrt(total * (1 / n) * (1 - 1 / n))
    assert np.all(np.abs(counts - total / n) <= 3 * sd)


def test_offset_rotation_example():
    # np=5 with r_g=2 rotates the identity by two.
    assert ((np.arange(5) + 2) % 5).tolist() == [2, 3, 4, 0, 1]
    for g in range(200):
        out = select_random_offset(5, RngStream(0).generation(g))
        offset = out[0]
        if offset == 2:
            assert out.tolist() == [2, 3, 4, 0, 1]
            break
    else:
        pytest.fail("offset 2 never drawn")


def test_offset_with_two_rows_swaps():
    assert select_random_offset(2, RngStream(3).generation(0)).tolist() == [1, 0]


def test_offset_never_self():
    root = RngStream(1)
    for g in range(500):
        out = select_random_offset(7, root.generation(g))
        assert np.all(out != np.arange(7))


def test_offset_is_uniform_over_nonzero_shifts():
    root = RngStream(2)
    shifts = [int(select_random_offset(6, root.generation(g))[0]) for g in range(20_000)]
    counts = np.bincount(shifts, minlength=6)
    assert counts[0] == 0
    sd = math.sqrt(20_000 * 0.2 * 0.8)
    assert np.all(np.abs(counts[1:] - 4000) <= 3 * sd)


def test_permutation_is_valid_and_uniform():
    root = RngStream(5)
    counts = {}
    for g in range(60_000):
        p = tuple(select_permutation(3, root.generation(g)).tolist())
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    sd = math.sqrt(60_000 * (1 / 6) * (5 / 6))
    assert all(abs(c - 10_000) <= 3 * sd for c in counts.values())


def test_fisher_yates_small_sizes():
    s = RngStream(0).purpose(R.PERM)
    assert fisher_yates(0, s).tolist() == []
    assert fisher_yates(1, s).tolist() == [0]
    assert sorted(fisher_yates(100, s).tolist()) == list(range(100))


@pytest.mark.parametrize("kind", list(SelectionKind))
def test_dispatch_returns_valid_indices(kind):
    out = select(kind, 12, RngStream(0).generation(0))
    assert out.shape == (12,)
    assert out.min() >= 0 and out.max() < 12
