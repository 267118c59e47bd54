import math

import numpy as np
import pytest

from rwentropy.cover import OpenCover
from rwentropy.estimators import (EstimatorReport, aggregate, cover_entropy_bound,
                                  equality_report, estimate_drift, estimate_entropy_sigma,
                                  estimate_lyapunov, horizons, path_seed, _torus_runs)
from rwentropy.presets import get_preset
from rwentropy.rsft import RandomSFT

LOG_PHI2 = 2 * math.log((1 + 5 ** 0.5) / 2)


def test_horizons():
    assert horizons(100) == [16, 32, 64, 100]
    assert horizons(64) == [16, 32, 64]
    assert horizons(10) == [10]


def test_path_seeds_distinct():
    s = {path_seed(0, i) for i in range(100)}
    assert len(s) == 100 and path_seed(0, 3) == path_seed(0, 3)


def test_report_rows_and_validation():
    rep = aggregate("drift", [{8: 4.0, 16: 8.0}, {8: 4.0, 16: 9.0}], [16], 7)
    assert rep.estimate == pytest.approx(0.5625) and rep.literal[-1] == pytest.approx(0.53125)
    assert rep.to_csv().splitlines()[0] == "quantity,horizon,estimate,stderr,n_paths,seed"
    assert rep.rows()[0]["n_paths"] == 2
    with pytest.raises(ValueError):
        EstimatorReport("drift", [4, 4], [0, 0], [0, 0], 1, 0)


def test_golden_drift_and_lyapunov(golden):
    d = estimate_drift("torus", golden.measure, 1, 128)
    l = estimate_lyapunov("torus", golden.measure, (1, 0), 1, 128)
    assert abs(d.estimate - LOG_PHI2) < 1e-9
    assert abs(l.estimate - LOG_PHI2) < 1e-9


def test_golden_equality(golden):
    rep, reports = equality_report("torus", golden.measure, paths=1, horizon=64,
                                   non_elementary=True)
    assert rep["pass"] is True
    for r in reports.values():
        assert abs(r.estimate - LOG_PHI2) < 1e-3


def test_elementary_flagged():
    p = get_preset("parabolic")
    rep, reports = equality_report("torus", p.measure, paths=2, horizon=32,
                                   non_elementary=p.non_elementary)
    assert rep["pass"] is None and "violated" in rep["flag"] and reports == {}


def test_random_drift_equals_lyapunov(random_ab):
    d = estimate_drift("torus", random_ab.measure, 6, 256, seed=3)
    l = estimate_lyapunov("torus", random_ab.measure, (2, 1), 6, 256, seed=3)
    assert d.estimate > 0.1
    assert abs(d.estimate - l.estimate) < 0.05


def test_thread_count_irrelevant(random_ab):
    a = _torus_runs(random_ab.measure, 3, 64, 5, [(1, 0)], True, threads=1)
    b = _torus_runs(random_ab.measure, 3, 64, 5, [(1, 0)], True, threads=2)
    assert a == b


def test_entropy_full_shift():
    s = RandomSFT(0, [2] * 65, [np.ones((2, 2))] * 64)
    rep = estimate_entropy_sigma(s)
    assert abs(rep.estimate - math.log(2)) < 1e-12


def test_braid_only_lyapunov():
    p = get_preset("braid-pa")
    with pytest.raises(ValueError):
        estimate_drift("braid", p.measure, 1, 16)
    rep = estimate_lyapunov("braid", p.measure, (0, 1), 1, 256)
    # two letters per step of the pseudo-Anosov preset
    assert abs(rep.estimate - LOG_PHI2) < 0.05


def test_cover_bound_dominates_join(golden_seq):
    rows = cover_entropy_bound(OpenCover.regular(2), golden_seq, [1, 2, 3], exhaustive_max=3, grid=32)
    for r in rows:
        assert math.exp(r["log_bound"]) >= r["join_count"] - 1e-9
