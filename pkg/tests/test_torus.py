from math import gcd, log, sqrt
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwentropy.presets import A, T, get_preset
from rwentropy.torus import (MCGElement, ProjDirection, TeichGeodesic, NotConverged,
                             act_on_curve, boundary_limit, closest_point_projection,
                             eigendirections, geodesic_of, intersection_number,
                             mobius_act, teich_distance, distance_to_geodesic)
from rwentropy.oracles import projection_by_minimization
from rwentropy.walk import ProbabilityMeasure, SamplePath


def _rand_sl2(rng, steps=6):
    g = MCGElement(1, 0, 0, 1)
    gens = [A, A.inverse(), T, T.inverse()]
    for i in rng.integers(0, 4, size=steps):
        g = g * gens[i]
    return g


sl2 = st.builds(lambda s: _rand_sl2(np.random.default_rng(s)), st.integers(0, 10 ** 6))
upper = st.builds(complex, st.floats(-3, 3), st.floats(0.1, 3))


def test_serialization_roundtrip():
    g = MCGElement(-2, -1, -1, -1)
    assert g.serialize() == "2 1 1 1"
    assert MCGElement.parse(g.serialize()) == g
    with pytest.raises(ValueError, match="determinant"):
        MCGElement(1, 1, 1, 1)


def test_act_on_curve_examples():
    assert act_on_curve(MCGElement(1, 0, 0, 1), (3, 5)) == (3, 5)
    assert act_on_curve(A, (1, 0)) == (2, 1)


def test_gcd_preserved():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        g = _rand_sl2(rng)
        c = tuple(int(x) for x in rng.integers(-50, 50, size=2))
        if c == (0, 0):
            continue
        d = act_on_curve(g, c)
        assert gcd(*d) == gcd(*c)


def test_intersection_examples():
    assert intersection_number((1, 0), (0, 1)) == 1
    assert intersection_number((1, 0), (1, 0)) == 0


@given(sl2, st.tuples(st.integers(-30, 30), st.integers(-30, 30)),
       st.tuples(st.integers(-30, 30), st.integers(-30, 30)))
def test_intersection_invariance(g, c1, c2):
    assert intersection_number(act_on_curve(g, c1), act_on_curve(g, c2)) == \
        intersection_number(c1, c2)


def test_mobius_examples():
    assert abs(mobius_act(T, 1j) - (1 + 1j)) < 1e-30
    z = 0.3 + 0.7j
    assert abs(mobius_act(MCGElement(1, 0, 0, 1), z) - z) < 1e-30
    g = MCGElement(5, 2, 2, 1)
    assert abs(mobius_act(g.inverse(), mobius_act(g, z)) - z) < 1e-14


def test_distance_examples():
    assert teich_distance(0.5 + 1j, 0.5 + 1j) == 0
    with mpmath.workdps(40):
        assert abs(teich_distance(1j, 2j) - mpmath.log(2) / 2) < 1e-35


@given(upper, upper, upper, sl2)
def test_distance_metric_and_invariance(z1, z2, z3, g):
    d12, d23, d13 = teich_distance(z1, z2), teich_distance(z2, z3), teich_distance(z1, z3)
    assert abs(d12 - teich_distance(z2, z1)) < 1e-30
    assert d13 <= d12 + d23 + 1e-9
    dg = teich_distance(mobius_act(g, z1), mobius_act(g, z2))
    assert abs(dg - d12) <= 1e-9 * max(1.0, float(d12))


def test_geodesic_conventions():
    h = geodesic_of(ProjDirection(1, 0), ProjDirection(0, 1))
    assert h.endpoints() == {mpmath.inf, 0}
    e, c, lam = eigendirections(A)
    gam = geodesic_of(e, c)
    # fixed points of z -> (2z+1)/(z+1): z^2 - z - 1 = 0
    roots = {(1 + sqrt(5)) / 2, (1 - sqrt(5)) / 2}
    got = sorted(float(x) for x in gam.endpoints())
    assert np.allclose(got, sorted(roots), atol=1e-14)
    assert geodesic_of(c, e) == gam
    with pytest.raises(ValueError, match="degenerate foliation pair"):
        geodesic_of(ProjDirection(1, 1), ProjDirection(2, 2))


def test_projection_examples():
    axis = TeichGeodesic(0, mpmath.inf)
    with mpmath.workdps(40):
        assert abs(closest_point_projection(1 + 1j, axis) - 1j * mpmath.sqrt(2)) < 1e-35
    z = mpmath.mpc(0, 3)
    assert abs(closest_point_projection(z, axis) - z) < 1e-30


@given(upper, st.floats(-3, 3), st.floats(-3, 3))
def test_projection_against_minimization(z, e1, e2):
    if abs(e1 - e2) < 0.05:
        return
    w = complex(closest_point_projection(z, TeichGeodesic(e1, e2)))
    v, d = projection_by_minimization(z, e1, e2)
    assert abs(w - v) < 1e-6
    assert abs(float(distance_to_geodesic(z, TeichGeodesic(e1, e2))) - d / 2) < 1e-8


def test_projection_equivariance():
    rng = np.random.default_rng(2)
    for _ in range(100):
        g = _rand_sl2(rng, 4)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2))
        e1, e2 = rng.uniform(-3, 3, size=2)
        gam = TeichGeodesic(e1, e2)
        lhs = mobius_act(g, closest_point_projection(z, gam))
        rhs = closest_point_projection(mobius_act(g, z), gam.act(g))
        assert abs(lhs - rhs) < 1e-20 * (1 + abs(lhs))


def test_boundary_limit_golden(golden):
    d = boundary_limit(SamplePath(golden.measure, 0), +1, 40, 1e-12)
    assert abs(d.x / d.y - (1 + sqrt(5)) / 2) < 1e-12


def test_boundary_limit_identity_not_converged():
    from rwentropy.torus import SL2Z
    m = ProbabilityMeasure(SL2Z(), [("I", SL2Z.identity, 1)])
    with pytest.raises(NotConverged, match="not converged"):
        boundary_limit(SamplePath(m, 0), +1, 40, 1e-6)


def test_boundary_limit_equivariance(random_ab):
    p = SamplePath(random_ab.measure, 5)
    tol = 1e-6
    base = boundary_limit(p, +1, 600, tol)
    for k in (1, 3, 10):
        shifted = boundary_limit(p.shift(k), +1, 600, tol)
        want = base.act(p[k].inverse())
        assert shifted.gap(want) <= 2 * tol


def test_deterministic_curve_growth(golden):
    # (1/n) log |w_n^-1 c| -> log spectral radius for five primitive curves
    p = SamplePath(golden.measure, 0)
    g = p[200].inverse()
    for c in [(1, 0), (0, 1), (1, 1), (2, 1), (1, -2)]:
        x, y = act_on_curve(g, c)
        rate = 0.5 * log(x * x + y * y) / 200
        assert abs(rate - log((3 + sqrt(5)) / 2)) < 0.01
