import numpy as np
import pytest

from rwentropy.coding import commuting_check, decode_point, itinerary, sample_word


@pytest.mark.parametrize("fixture", ["golden_seq", "random_seq"])
def test_commuting_diagram(fixture, request):
    seq = request.getfixturevalue(fixture)
    rng = np.random.default_rng(5)
    m = 6
    for n in (1, 3, 7, 12):
        for _ in range(5):
            word = sample_word(seq, -m, n + m, rng)
            ok, got = commuting_check(seq, n, m, word, -m)
            assert ok, (n, word, got)


def test_decoded_point_has_its_itinerary(random_seq):
    rng = np.random.default_rng(8)
    for _ in range(10):
        w = sample_word(random_seq, -5, 5, rng)
        x = decode_point(random_seq, 0, w, -5)
        assert itinerary(random_seq, x, 0, -5, 5) == w


def test_sample_words_admissible(random_seq):
    from rwentropy.partition import transition_matrices
    from rwentropy.rsft import CylinderSpec
    sft = transition_matrices(random_seq, -10, 10)
    rng = np.random.default_rng(1)
    for _ in range(20):
        w = sample_word(random_seq, -10, 10, rng)
        assert sft.admissible(CylinderSpec(-10, 0, 20, tuple(a + 1 for a in w)))
