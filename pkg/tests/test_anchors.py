import numpy as np
import pytest

from rwentropy.anchors import FiberGeometry, fiber_geometry, geodesic_point, select_anchors
from rwentropy.torus import teich_distance
from rwentropy.walk import SamplePath


def crafted(O, n0=0):
    N = len(O)
    u = np.tile([1.0, 0.0], (N, 1))
    s = np.tile([0.0, 1.0], (N, 1))
    return FiberGeometry(n0, n0 + N - 1, u, s, np.array(O, float), np.zeros(N),
                         np.zeros((N - 1, 2, 2)), 0.0)


ALL = lambda g, k: (True, True)


def test_hand_traced_records():
    A = select_anchors(crafted([0, 0.9, 0.6, 1.4, 2.2]), member=ALL)
    assert A.eps.astype(int).tolist() == [1, 1, 0, 1, 1]
    assert A.T.tolist() == [0, 0.9, 0.9, 1.4, 2.2]


def test_negative_side_records():
    A = select_anchors(crafted([-1.0, -0.4, -0.5, 0.0], n0=-3), member=ALL)
    # fiber 0 at index 3; going left: -0.5 record, -0.4 not, -1.0 record
    assert A.eps.astype(int).tolist() == [1, 0, 1, 1]


def test_ties_resolve_to_zero():
    A = select_anchors(crafted([0, 0.9, 0.9, 0.3]), member=ALL)
    assert A.eps.astype(int).tolist() == [1, 1, 0, 0]
    assert any("tie at fiber 2" in m for m in A.log)


def test_non_members_carry_previous_anchor():
    A = select_anchors(crafted([0, 0.5, 3.0, 1.0]),
                       member=lambda g, k: (k != 2, True))
    assert A.Tpp.tolist() == [0, 0.5, 0.5, 1.0]
    assert A.eps.astype(int).tolist() == [1, 1, 0, 1]


def test_fiber_zero_always_good():
    for O in ([0, -1, 2], [0, 0, 0]):
        A = select_anchors(crafted(O), member=lambda g, k: (False, k > 0))
        assert A.eps[0]


def test_needs_membership():
    with pytest.raises(ValueError):
        select_anchors(crafted([0, 1]))


def test_golden_every_forward_fiber_good(golden):
    geom = fiber_geometry(SamplePath(golden.measure, 0), -10, 40)
    A = select_anchors(geom, C=1.0)
    assert all(A.eps[n - geom.n0] for n in range(0, 41))
    assert all(A.eps[n - geom.n0] for n in range(-10, 1))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_good_times_are_distance_records(random_ab, seed):
    geom = fiber_geometry(SamplePath(random_ab.measure, seed), -30, 60)
    A = select_anchors(geom, C=1.0)
    z = -geom.n0
    u0, s0 = geom.u[z], geom.s[z]
    foot = geodesic_point(u0, s0, 0.0)
    best = 0.0
    for n in range(1, 61):
        t = A.Tpp[n + z]
        # distance along Gamma(w) from the foot of i, computed in the plane
        d = float(teich_distance(foot, geodesic_point(u0, s0, t)))
        assert abs(d - abs(t)) < 1e-6
        if A.eps[n + z]:
            assert t > 0 and d > best
        if t > 0:
            best = max(best, d)
    assert len(A.good_times()) > 3


def test_slow_contraction_doubles_pad(random_ab):
    from rwentropy.estimators import path_seed
    from rwentropy.torus import NotConverged
    path = SamplePath(random_ab.measure, path_seed(0, 18))
    with pytest.raises(NotConverged):
        fiber_geometry(path, -64, 10064, max_pad=96)
    assert fiber_geometry(path, -64, 10064).error <= 1e-10
