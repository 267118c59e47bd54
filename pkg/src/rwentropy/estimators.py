"""Monte Carlo estimators of drift, Lyapunov exponent and partition entropy.

Every per-path quantity is a growth sequence ``Q(n)``: the distance
``d_T(i, w_n i)``, the log length ``log |w_n^{-1} c|`` or the log cylinder
count ``log N(C_0(0, n))``. The point estimate at horizon ``n`` is the
slope ``(Q(n) - Q(n/2)) / (n/2)``, which removes the bounded offsets that
dominate ``Q(n)/n`` at moderate horizons; the plain ratio ``Q(n)/n`` is
reported alongside. Standard errors come from independent paths only.
"""
from dataclasses import dataclass, field
import csv
import io
import json
import math

import mpmath
import numpy as np

from .braid import _act, log_norm, MulticurveCoord
from .rsft import _log
from .torus import MCGElement, NotConverged
from .walk import SamplePath

__all__ = ["EstimatorReport", "horizons", "torus_series", "braid_series",
           "entropy_series", "aggregate", "estimate_drift", "estimate_lyapunov",
           "estimate_entropy_sigma", "equality_report", "cover_entropy_bound",
           "is_elementary", "path_seed", "run_paths", "safe_depth"]


def horizons(n_max, k_min=4):
    """``2^k`` for ``k >= k_min`` up to ``n_max``, plus ``n_max`` itself."""
    out = []
    k = k_min
    while 2 ** k < n_max:
        out.append(2 ** k)
        k += 1
    out.append(int(n_max))
    return out


def path_seed(seed, i):
    """Seed of the ``i``-th path of a run with base ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(i),))
    return int(ss.generate_state(1, np.uint64)[0])


def _needed(hs):
    s = set()
    for n in hs:
        s.add(n)
        s.add(n // 2)
    return sorted(s)


# -- per-path growth sequences ----------------------------------------------

def torus_series(path, hs, curves=((1, 0),)):
    """``{"drift": Q, "lyapunov:<c>": Q, ...}`` at ``n`` and ``n // 2`` for ``n`` in ``hs``."""
    need = _needed(hs)
    n_max = need[-1]
    idx = path.step_indices(1, n_max + 1)
    mats = [(int(g.a), int(g.b), int(g.c), int(g.d)) for g in path.measure.elements]
    invs = [(d, -b, -c, a) for a, b, c, d in mats]
    a, b, c, d = 1, 0, 0, 1
    vs = [list(map(int, cv)) for cv in curves]
    out = {"drift": {}}
    for cv in curves:
        out["lyapunov:%d,%d" % tuple(cv)] = {}
    want = set(need)
    if 0 in want:
        out["drift"][0] = 0.0
        for cv, v in zip(curves, vs):
            out["lyapunov:%d,%d" % tuple(cv)][0] = 0.5 * _log(v[0] * v[0] + v[1] * v[1])
    for m in range(1, n_max + 1):
        k = int(idx[m - 1])
        g00, g01, g10, g11 = mats[k]
        a, b, c, d = a * g00 + b * g10, a * g01 + b * g11, c * g00 + d * g10, c * g01 + d * g11
        h00, h01, h10, h11 = invs[k]
        for v in vs:
            v[0], v[1] = h00 * v[0] + h01 * v[1], h10 * v[0] + h11 * v[1]
        if m in want:
            out["drift"][m] = teich_distance_from_i(a, b, c, d)
            for cv, v in zip(curves, vs):
                out["lyapunov:%d,%d" % tuple(cv)][m] = 0.5 * _log(v[0] * v[0] + v[1] * v[1])
    return out


def teich_distance_from_i(a, b, c, d):
    """``d_T(i, g i) = acosh(|g|_F^2 / 2) / 2`` for an integer matrix ``g``."""
    f = a * a + b * b + c * c + d * d
    if f < 2 ** 52:
        return 0.5 * math.acosh(f / 2)
    with mpmath.workdps(30):
        x = mpmath.mpf(f) / 2
        return float(0.5 * mpmath.acosh(x))


def braid_series(path, hs, curves):
    """``{"lyapunov:<i>": Q}`` for the braid walk on each reference curve."""
    need = _needed(hs)
    n_max = need[-1]
    idx = path.step_indices(1, n_max + 1)
    words = [g.letters for g in path.measure.elements]
    state = [list(map(list, c.ab())) for c in curves]
    out = {"lyapunov:%d" % i: {} for i in range(len(curves))}
    want = set(need)

    def norm(ab):
        return log_norm(sum(abs(v) for v in ab[0]) + sum(abs(v) for v in ab[1]))

    if 0 in want:
        for i, ab in enumerate(state):
            out["lyapunov:%d" % i][0] = norm(ab)
    for m in range(1, n_max + 1):
        w = words[int(idx[m - 1])]
        for ab in state:
            # w_m^-1 acts on the left of the running curve; its last letter
            # is the inverse of w's first letter
            for g in w:
                _act(ab[0], ab[1], abs(g), -1 if g > 0 else 1)
        if m in want:
            for i, ab in enumerate(state):
                out["lyapunov:%d" % i][m] = norm(ab)
    return out


def entropy_series(sft, hs, n=0, K=0):
    """``{"entropy_sigma": Q}`` with ``Q(m) = log N(C_n(K, K + m))``."""
    need = _needed(hs)
    counts = sft.forward_counts(n + K, need[-1])
    return {"entropy_sigma": {m: _log(counts[m]) for m in need}}


# -- aggregation ---------------------------------------------------------------

@dataclass
class EstimatorReport:
    """Per-horizon mean and standard error of one estimator over paths."""
    quantity: str
    horizons: list
    estimates: list
    stderr: list
    n_paths: int
    seed: int
    literal: list = field(default_factory=list)
    converged: bool = True
    per_path: list = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise ValueError("horizons must be strictly increasing")

    @property
    def estimate(self):
        return self.estimates[-1]

    @property
    def se(self):
        return self.stderr[-1]

    def ci(self, z=1.96):
        return (self.estimate - z * self.se, self.estimate + z * self.se)

    def rows(self):
        return [{"quantity": self.quantity, "horizon": h, "estimate": _r(e),
                 "stderr": _r(s), "n_paths": self.n_paths, "seed": self.seed}
                for h, e, s in zip(self.horizons, self.estimates, self.stderr)]

    def to_jsonl(self):
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows())

    def to_csv(self, header=True):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["quantity", "horizon", "estimate", "stderr",
                                            "n_paths", "seed"], lineterminator="\n")
        if header:
            w.writeheader()
        for r in self.rows():
            w.writerow(r)
        return buf.getvalue()


def _r(x):
    return float("%.12g" % x)


def aggregate(quantity, series, hs, seed, conv_z=3.0):
    """Report from per-path ``{n: Q(n)}`` dicts (in path order)."""
    est, se, lit = [], [], []
    P = len(series)
    per = []
    for n in hs:
        vals = np.array([(s[n] - s[n // 2]) / (n - n // 2) for s in series])
        raw = np.array([s[n] / n for s in series])
        # fixed summation order
        mean = math.fsum(vals.tolist()) / P
        var = math.fsum(((vals - mean) ** 2).tolist()) / (P - 1) if P > 1 else 0.0
        est.append(mean)
        se.append(math.sqrt(var / P))
        lit.append(math.fsum(raw.tolist()) / P)
        per.append(vals.tolist())
    conv = True
    if len(hs) >= 2:
        gap = abs(est[-1] - est[-2])
        conv = gap <= conv_z * math.hypot(se[-1], se[-2]) + 1e-9
    return EstimatorReport(quantity, list(hs), est, se, P, int(seed), lit, conv, per[-1])


# -- path workers --------------------------------------------------------------

def _torus_job(args):
    measure, seed, hs, curves, entropy, C, win = args
    path = SamplePath(measure, seed)
    out = torus_series(path, hs, curves)
    if entropy:
        from .partition import build_sequence, exact_sequence, transition_matrices
        n_max = max(hs)
        if len(measure) == 1:
            seq = exact_sequence(path, -win, n_max + win)
        else:
            seq = build_sequence(path, -win, n_max + win, C=C)
        out.update(entropy_series(transition_matrices(seq, 0, n_max), hs))
    return out


def _braid_job(args):
    measure, seed, hs, curves = args
    return braid_series(SamplePath(measure, seed), hs, curves)


def run_paths(job, args, threads=1):
    """Map ``job`` over ``args`` in order; threads > 1 uses worker processes."""
    if threads <= 1 or len(args) <= 1:
        return [job(a) for a in args]
    import multiprocessing as mp
    with mp.get_context("fork").Pool(threads) as pool:
        return pool.map(job, args, chunksize=1)


def _torus_runs(measure, paths, n, seed, curves, entropy, C=1.0, win=64, threads=1):
    hs = horizons(n)
    args = [(measure, path_seed(seed, i), hs, list(curves), entropy, C, win) for i in range(paths)]
    return hs, run_paths(_torus_job, args, threads)


def estimate_drift(model, measure, paths, horizon, seed=0, threads=1):
    """``d_T(X_0, w_n X_0) / n`` estimator; torus model only."""
    if model != "torus":
        raise ValueError("drift is available for the torus model only")
    hs, runs = _torus_runs(measure, paths, horizon, seed, [(1, 0)], False, threads=threads)
    return aggregate("drift", [r["drift"] for r in runs], hs, seed)


def estimate_lyapunov(model, measure, curve, paths, horizon, seed=0, threads=1):
    """``log |w_n^{-1} c| / n`` estimator for the torus or braid model."""
    if model == "torus":
        curve = tuple(int(x) for x in curve)
        if curve == (0, 0):
            raise ValueError("curve must be nonzero")
        hs, runs = _torus_runs(measure, paths, horizon, seed, [curve], False, threads=threads)
        key = "lyapunov:%d,%d" % curve
    elif model == "braid":
        c = MulticurveCoord(curve)
        if not any(c):
            raise ValueError("curve must be nonzero")
        hs = horizons(horizon)
        args = [(measure, path_seed(seed, i), hs, [c]) for i in range(paths)]
        runs = run_paths(_braid_job, args, threads)
        key = "lyapunov:0"
    else:
        raise ValueError("unknown model %r" % (model,))
    return aggregate("lyapunov", [r[key] for r in runs], hs, seed)


def estimate_entropy_sigma(sfts, K=0, m_max=None, n=0, seed=0):
    """Entropy of random subshifts: slope of ``log N(C_n(K, K + m))``.

    ``sfts`` is one :class:`RandomSFT` per path (or a single one).
    """
    from .rsft import RandomSFT
    if isinstance(sfts, RandomSFT):
        sfts = [sfts]
    if m_max is None:
        m_max = min(s.n_min + len(s.ks) - 1 for s in sfts) - n - K
    hs = horizons(m_max, k_min=min(4, max(1, int(math.log2(max(m_max, 2))) - 1)))
    series = [entropy_series(s, hs, n, K)["entropy_sigma"] for s in sfts]
    return aggregate("entropy_sigma", series, hs, seed)


def is_elementary(measure):
    """Guard for the non-elementary condition on SL(2, Z) supports.

    Flags supports whose elements are all non-hyperbolic (|trace| <= 2) or
    pairwise commute. This is a sufficient check for the shipped controls,
    not a decision procedure.
    """
    els = [g for g in measure.elements if isinstance(g, MCGElement)]
    if len(els) != len(measure.elements):
        return False
    if all(abs(g.trace()) <= 2 for g in els):
        return True
    return all(g * h == h * g for g in els for h in els)


def equality_report(model, measure, paths=200, horizon=10000, seed=0, C=1.0,
                    z=3.0, rel_tol=0.05, one_sided_tol=0.02, threads=1,
                    non_elementary=None):
    """Drift, Lyapunov exponent and entropy side by side with pairwise checks."""
    elementary = is_elementary(measure) if non_elementary is None else not non_elementary
    rep = {"model": model, "paths": paths, "horizon": horizon, "seed": int(seed),
           "condition_non_elementary": not elementary}
    if elementary:
        hs, runs = _torus_runs(measure, paths, horizon, seed, [(1, 0)], False, threads=threads)
        rep["flag"] = "non-elementary condition violated: equality not asserted"
        rep["estimates"] = {
            "drift": _summ(aggregate("drift", [r["drift"] for r in runs], hs, seed)),
            "lyapunov": _summ(aggregate("lyapunov", [r["lyapunov:1,0"] for r in runs], hs, seed))}
        rep["pass"] = None
        return rep, {}
    if model != "torus":
        raise ValueError("the equality report needs the torus model")
    try:
        hs, runs = _torus_runs(measure, paths, horizon, seed, [(1, 0)], True, C=C, threads=threads)
    except NotConverged as e:
        raise NotConverged("limits not converged: %s" % e)
    reports = {
        "drift": aggregate("drift", [r["drift"] for r in runs], hs, seed),
        "lyapunov": aggregate("lyapunov", [r["lyapunov:1,0"] for r in runs], hs, seed),
        "entropy_sigma": aggregate("entropy_sigma", [r["entropy_sigma"] for r in runs], hs, seed),
    }
    rep["estimates"] = {k: _summ(v) for k, v in reports.items()}
    pairs = {}
    ok = True
    names = list(reports)
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = reports[names[i]], reports[names[j]]
            gap = a.estimate - b.estimate
            comb = math.hypot(a.se, b.se)
            rel = abs(gap) / max(abs(a.estimate), abs(b.estimate), 1e-300)
            # rounding slack, so zero-variance runs are not failed on the last bit
            eps = 1e-12 * max(abs(a.estimate), abs(b.estimate), 1.0)
            p = {"gap": gap, "combined_se": comb, "within_se": abs(gap) <= z * comb + eps,
                 "relative": rel, "within_rel": rel <= rel_tol}
            ok &= p["within_se"] and p["within_rel"]
            pairs["%s-%s" % (names[i], names[j])] = p
    rep["pairs"] = pairs
    L, lam, h = (reports[k] for k in ("drift", "lyapunov", "entropy_sigma"))
    rep["lyapunov_le_entropy"] = all(x <= y + one_sided_tol for x, y in zip(lam.estimates, h.estimates))
    rep["entropy_le_drift"] = all(x <= y + one_sided_tol for x, y in zip(h.estimates, L.estimates))
    rep["pass"] = bool(ok and rep["lyapunov_le_entropy"] and rep["entropy_le_drift"])
    return rep, reports


def _summ(r):
    lo, hi = r.ci()
    return {"estimate": r.estimate, "stderr": r.se, "ci95": [lo, hi],
            "literal": r.literal[-1], "converged": r.converged}


def cover_entropy_bound(cover, seq, hs, exhaustive_max=6, grid=48):
    """Upper bounds on the cover-join counts from cylinder counts.

    At fiber ``k`` the depth-``c(k)`` cells refine the cover, so a cylinder
    on fibers ``-K .. U`` with ``K = max(c(k) - k)`` and ``U = max(k + c(k))``
    over ``0 <= k <= n`` lies in one element of the join of the cover pulled
    back along the walk up to time ``n``. Returns one dict per horizon.
    """
    from .cover import join_count
    from .partition import transition_matrices, int_matrix_product, inverse_int
    from .rsft import count_cylinders
    cs = {}
    out = []
    for n in hs:
        for k in range(0, n + 1):
            if k not in cs:
                cs[k] = safe_depth(cover, seq, k)
        K = max(0, max(cs[k][0] - k for k in range(n + 1)))
        U = max(k + cs[k][0] for k in range(n + 1))
        sft = transition_matrices(seq, -K, U)
        bound = count_cylinders(sft, 0, -K, U)
        row = {"n": n, "c": cs[n][0], "delta": cs[n][1], "K": K, "U": U,
               "log_bound": _log(bound), "rate_bound": _log(bound) / max(n, 1)}
        if n <= exhaustive_max:
            maps = [inverse_int(int_matrix_product([seq.geom.step(x) for x in range(1, k + 1)]))
                    for k in range(n + 1)]
            N, exact = join_count(cover, maps, n=grid)
            row["join_count"] = N
            row["join_exact"] = exact
        out.append(row)
    return out


def safe_depth(cover, seq, k, grids=(96, 384, 1024)):
    """``(c(k), delta)``: coding depth against the certified Lebesgue number.

    The grid value minus its covering radius is a lower bound for the
    Lebesgue number; the grid is refined while that bound is not positive.
    """
    from .cover import lebesgue_number, coding_depth, fiber_frame, CoverError
    F = fiber_frame(seq, k)
    for g in grids:
        d, err = lebesgue_number(cover, F, n=g)
        if d - err > 0:
            return coding_depth(seq, k, d - err), d
    raise CoverError("Lebesgue number not certified at fiber %d" % k)
