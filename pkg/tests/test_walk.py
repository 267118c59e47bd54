from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwentropy.presets import get_preset, A, B
from rwentropy.torus import MCGElement, SL2Z
from rwentropy.walk import ProbabilityMeasure, SamplePath, cylinder_probability


def _mul(g, h):
    # independent composition on raw integer tuples
    a, b, c, d = g
    e, f, x, y = h
    return (a * e + b * x, a * f + b * y, c * e + d * x, c * f + d * y)


@pytest.fixture
def uniform4():
    return get_preset("random-ab").measure


def test_group_axioms_on_random_elements(uniform4):
    G = SL2Z()
    rng = np.random.default_rng(0)
    els = uniform4.elements
    for _ in range(50):
        g, h, k = (els[i] * els[j] for i, j in rng.integers(0, 4, size=(3, 2)))
        assert G.compose(G.identity, g) == g
        assert G.compose(g, G.invert(g)) == G.identity
        assert G.compose(G.compose(g, h), k) == G.compose(g, G.compose(h, k))


def test_measure_rejects_bad_weights():
    G = SL2Z()
    with pytest.raises(ValueError, match="sum"):
        ProbabilityMeasure(G, [("A", A, Fraction(1, 2)), ("B", B, Fraction(1, 4))])
    with pytest.raises(ValueError, match="> 0"):
        ProbabilityMeasure(G, [("A", A, 1), ("B", B, 0)])


def test_reflected_measure_relabels(uniform4):
    r = uniform4.reflected()
    assert r.weights == uniform4.weights
    assert r.labels == [uniform4.inverse_labels[l] for l in uniform4.labels]
    for g, h in zip(uniform4.elements, r.elements):
        assert g.inverse() == h


def test_position_zero_is_identity(uniform4):
    assert SamplePath(uniform4, 5)[0] == SL2Z.identity


def test_extension_order_does_not_matter(uniform4):
    p = SamplePath(uniform4, 123).extend(-5, 5)
    q = SamplePath(uniform4, 123)
    q.extend(0, 3)
    before = [q[n].entries() for n in range(4)]
    q.extend(-5, 5)
    assert [q[n].entries() for n in range(4)] == before
    assert [p[n] for n in range(-5, 6)] == [q[n] for n in range(-5, 6)]
    # far extension in reverse order agrees as well
    r = SamplePath(uniform4, 123)
    assert r[3000] == SamplePath(uniform4, 123).extend(0, 3000)[3000]


def test_increments_in_support(uniform4):
    p = SamplePath(uniform4, 9).extend(-50, 50)
    sup = set(uniform4.elements)
    refl = set(uniform4.reflected().elements)
    for n in range(1, 51):
        assert p[n - 1].inverse() * p[n] in sup
    for n in range(-50, 0):
        assert p[n + 1].inverse() * p[n] in refl


def test_shift_against_hand_composition(uniform4):
    p = SamplePath(uniform4, 4).extend(-3, 6)
    v = p.shift(1)
    assert v[0] == SL2Z.identity
    w1inv = p[1].inverse().entries()
    for n in range(0, 3):
        want = _mul(w1inv, p[n + 1].entries())
        assert v[n] == MCGElement(*want)


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-10, 10))
def test_shift_algebra(k, l, n):
    m = get_preset("random-ab").measure
    p = SamplePath(m, 77)
    assert p.shift(k).shift(l)[n] == p.shift(k + l)[n]


def test_cylinder_probability_values(uniform4):
    G = SL2Z()
    assert cylinder_probability(uniform4, []) == 1
    word = [A, A * B, A * B * A.inverse()]
    assert cylinder_probability(uniform4, word) == Fraction(1, 64)
    bad = [A, A * A * A]
    assert cylinder_probability(uniform4, bad) == 0


def test_cylinder_frequency_matches_probability():
    """Statistical check, flagged at 4 standard deviations."""
    m = get_preset("random-skew").measure
    word = [A, A * B, A * B * A]
    p = float(cylinder_probability(m, word))
    N = 20000
    hits = 0
    for i in range(N):
        path = SamplePath(m, 10_000 + i)
        hits += all(path[j + 1] == word[j] for j in range(3))
    tol = 4 * math.sqrt(p * (1 - p) / N)
    assert abs(hits / N - p) < tol


def test_negative_side_law():
    m = get_preset("random-skew").measure
    path = SamplePath(m, 3).extend(-20000, 0)
    refl = m.reflected()
    counts = {l: 0 for l in refl.labels}
    for n in range(-20000, 0):
        inc = path[n + 1].inverse() * path[n]
        counts[refl.labels[refl.elements.index(inc)]] += 1
    N = 20000
    for l, w in zip(refl.labels, refl.weights):
        p = float(w)
        assert abs(counts[l] / N - p) < 4 * math.sqrt(p * (1 - p) / N)


def test_dump_jsonl(uniform4):
    import io
    import json
    buf = io.StringIO()
    SamplePath(uniform4, 1).dump_jsonl(buf, -2, 2)
    rows = [json.loads(l) for l in buf.getvalue().splitlines()]
    assert [r["n"] for r in rows] == [-2, -1, 0, 1, 2]
    assert rows[2]["element"] == "1 0 0 1"
