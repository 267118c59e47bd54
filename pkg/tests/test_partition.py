import io
import itertools

import numpy as np
import pytest

from rwentropy.oracles import perron_root, raster_component_count
from rwentropy.partition import (build_partition, check_semi_markov, coding_diameter,
                                 int_matrix_product, inverse_int, partition_defects,
                                 perturbed, recheck_transition, refine,
                                 transition_matrices, axis_frame)


def step_product(seq, j, k):
    return int_matrix_product([seq.geom.step(x) for x in range(j + 1, k + 1)])


def test_golden_partitions(golden_seq):
    rep = check_semi_markov(golden_seq)
    assert rep.ok and rep.checked_edges > 0
    for j, P in golden_seq.parts.items():
        # the window ends have one neighbour and a coarser partition
        assert len(P) == (13 if j in (golden_seq.n0, golden_seq.n1) else 33)
        assert P.area() == 1            # exact in the quadratic field
        assert partition_defects(P) == []
    A = golden_seq.matrix(3)
    assert abs(perron_root(A) - (3 + 5 ** 0.5) / 2) < 1e-9


def test_random_partitions(random_seq):
    rep = check_semi_markov(random_seq)
    assert rep.ok, rep.violations[:3]
    assert rep.count("M1") == 0 and rep.count("M2") == 0
    for P in random_seq.parts.values():
        assert abs(float(P.area()) - 1) < 1e-9
        assert partition_defects(P, grid=12) == []


def test_basic_golden_partition_is_not_markov(golden):
    g = golden.measure.elements[0]
    f = axis_frame(g)
    P = build_partition(f)
    assert len(P) == 5 and partition_defects(P) == []
    Minv = inverse_int(((g.a, g.b), (g.c, g.d)))
    tr = recheck_transition(P, P, Minv)
    assert any(v[0] == "M2" for v in tr.violations)
    with pytest.raises(ValueError):
        build_partition(f, marked_point=(1, 0))


def test_refine_idempotent_and_components(golden_seq):
    P = golden_seq.parts[golden_seq.goods[2]]
    R = refine(P, P, P)
    assert (R.va, R.vb, len(R)) == (P.va, P.vb, len(P))
    F = np.asarray(P.frame.Ff, dtype=float)
    assert raster_component_count(F, P.va, P.vb, n=512) == len(P)


def test_transition_matrices_valid(random_seq):
    sft = transition_matrices(random_seq, 0, 40)
    assert sft.validate() == []
    assert sft.ks == [random_seq.k(n) for n in range(0, 41)]


def test_fault_injection_detected(random_seq):
    j, k = random_seq.goods[random_seq.goods.index(0) + 1: random_seq.goods.index(0) + 3]
    P, Q = random_seq.parts[j], random_seq.parts[k]
    Minv = inverse_int(step_product(random_seq, j, k))
    assert recheck_transition(P, Q, Minv).violations == []
    missed = 0
    for r in range(len(P.rets)):
        for dx, dy in itertools.product((-1, 1), (-1, 1)):
            rets = np.array(P.rets, dtype=np.int64)
            rets[r] += (dx, dy)
            bad = perturbed(P, rets=rets)
            flagged = (recheck_transition(bad, Q, Minv).violations
                       or partition_defects(bad, grid=12))
            missed += not flagged
    assert missed == 0


def test_shrunken_arc_breaks_nesting(random_seq):
    j, k = random_seq.goods[random_seq.goods.index(0): random_seq.goods.index(0) + 2]
    P, Q = random_seq.parts[j], random_seq.parts[k]
    Minv = inverse_int(step_product(random_seq, j, k))
    tr = recheck_transition(P, perturbed(Q, va=(0, 0)), Minv)
    assert any(v[0] == "M1" for v in tr.violations)


def test_coding_diameter_decays(random_seq):
    d = [max(coding_diameter(random_seq, 0, m)) for m in (2, 8, 16, 32)]
    assert all(a >= b for a, b in zip(d, d[1:]))
    assert d[-1] < 0.02 * d[0]


def test_dump_format(golden_seq):
    buf = io.StringIO()
    golden_seq.dump(buf, fibers=[0, 1])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "FIBER 0 33" and len(lines) == 2 * 34
    x, y, h, v = map(float, lines[1].split())
    assert y == 0.0 and h > 0 and v > 0
