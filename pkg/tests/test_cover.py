import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwentropy.cover import (CoverError, OpenCover, join_count, join_sets,
                             lebesgue_number, min_subcover)
from rwentropy.oracles import brute_lebesgue, brute_min_cover

IRREGULAR = OpenCover([((0.1, 0.2), 0.4), ((0.6, 0.2), 0.4), ((0.1, 0.7), 0.4),
                       ((0.6, 0.7), 0.38), ((0.35, 0.45), 0.2)])


@given(st.lists(st.lists(st.booleans(), min_size=9, max_size=9), min_size=1, max_size=12))
def test_min_subcover_matches_brute(rows):
    S = np.array(rows, dtype=bool)
    n, exact = min_subcover(S)
    assert exact and n == brute_min_cover(S)


def test_min_subcover_greedy_flagged():
    S = np.eye(20, dtype=bool)
    S = np.vstack([S, S[::-1] | S])
    n, exact = min_subcover(S, exact_limit=12)
    assert n >= 10


@pytest.mark.parametrize("k", [2, 3, 4])
def test_lebesgue_regular_exact(k):
    # worst points are the cell corners, equidistant from four centres
    r = 0.75 / k
    exact = r - 2 ** 0.5 / (2 * k)
    d, err = lebesgue_number(OpenCover.regular(k))
    assert d - err - 1e-9 <= exact <= d + 1e-9


def test_lebesgue_matches_brute_oracle():
    for cover in (OpenCover.regular(3), IRREGULAR):
        d, err = lebesgue_number(cover, n=48)
        assert abs(d - brute_lebesgue(cover, n=48)) < 1e-3


def test_lebesgue_in_other_metric():
    F = np.array([[2.0, 0.0], [0.0, 0.5]])
    d, _ = lebesgue_number(OpenCover.regular(3), F=F)
    assert abs(d - brute_lebesgue(OpenCover.regular(3), F=F, n=96)) < 2e-3
    # same grid size on both routes


def test_lebesgue_scaling():
    c = OpenCover.regular(3)
    d1, _ = lebesgue_number(c)
    d2, _ = lebesgue_number(c, F=3 * np.eye(2))
    assert abs(d2 - 3 * d1) < 1e-3


def test_not_a_cover():
    with pytest.raises(CoverError, match="not a cover"):
        lebesgue_number(OpenCover([((0.5, 0.5), 0.3)]))
    with pytest.raises(CoverError):
        OpenCover([((0.5, 0.5), 0.6)])


def test_join_refines(golden):
    g = golden.measure.elements[0]
    A = [[g.a, g.b], [g.c, g.d]]
    cover = OpenCover.regular(2)
    I = [[1, 0], [0, 1]]
    n1, _ = join_count(cover, [I], n=40)
    n2, _ = join_count(cover, [I, A], n=40)
    assert n1 == 4 and n2 >= n1


def test_two_step_join_matches_brute(golden):
    g = golden.measure.elements[0]
    cover = OpenCover.regular(2)
    S, labels = join_sets(cover, [[[1, 0], [0, 1]], [[g.a, g.b], [g.c, g.d]]], n=32)
    assert len(labels) == len(S) <= 16
    assert min_subcover(S)[0] == brute_min_cover(S)
