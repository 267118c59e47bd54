"""Independent reference computations used to check the main routines.

Each oracle takes a different route from the code it checks: brute-force
enumeration instead of transfer counting, exhaustive search instead of
branch-and-bound, rasterized flood fill instead of cut-point geometry,
numerical minimization instead of closed-form projection, and the
pillowcase representation of the 3-strand braid group instead of
piecewise-linear curve coordinates. They are slow by design and meant
for small instances.
"""
from itertools import combinations, product
import math

import numpy as np

__all__ = ["brute_count_cylinders", "brute_min_cover", "brute_lebesgue",
           "raster_component_count", "projection_by_minimization",
           "perron_root", "pillowcase_matrix", "pillowcase_log_norm",
           "pillowcase_intersections", "pillowcase_norm", "PILLOW_SLOPES",
           "golden_log", "run_all"]

# sigma_1 and sigma_2 acting on the pillowcase (torus double cover of the
# sphere with four marked points, one of them the boundary of the disk)
_PILLOW = {
    1: ((1, 1), (0, 1)),
    -1: ((1, -1), (0, 1)),
    2: ((1, 0), (-1, 1)),
    -2: ((1, 0), (1, 1)),
}


def golden_log():
    """``log((3 + sqrt 5) / 2)``, the log Perron root of ``[[2,1],[1,1]]``."""
    return math.log((3 + math.sqrt(5)) / 2)


def brute_count_cylinders(matrices, ks):
    """Number of admissible words, by enumerating all letter tuples.

    ``matrices[i]`` is the 0/1 matrix between positions ``i`` and ``i+1``
    (``None`` is the identity); ``ks`` are the alphabet sizes.
    """
    mats = [None if A is None else np.asarray(A) for A in matrices]
    n = 0
    for w in product(*[range(k) for k in ks]):
        ok = True
        for i, A in enumerate(mats):
            if (w[i] != w[i + 1]) if A is None else not A[w[i], w[i + 1]]:
                ok = False
                break
        n += ok
    return n


def brute_min_cover(sets):
    """Least number of rows of the boolean array ``sets`` covering their union.

    Tries every subset size in turn; exponential in the number of rows.
    """
    S = [frozenset(np.flatnonzero(r).tolist()) for r in np.asarray(sets, dtype=bool)]
    universe = frozenset().union(*S) if S else frozenset()
    if not universe:
        return 0
    for r in range(1, len(S) + 1):
        for pick in combinations(S, r):
            if frozenset().union(*pick) == universe:
                return r
    raise AssertionError("rows do not cover their union")


def brute_lebesgue(cover, F=None, n=48, iters=20):
    """Lebesgue number by fitting sampled metric balls around grid points.

    For each grid point, bisection finds the largest radius whose ball
    (sampled on three concentric rings) lies inside one cover element; the
    minimum over grid points is returned. Cruder than the ellipse-distance
    route and independent of it.
    """
    F = np.eye(2) if F is None else np.asarray(F, dtype=float)
    Fi = np.linalg.inv(F)
    th = 2 * np.pi * np.arange(64) / 64
    ring = np.stack([np.cos(th), np.sin(th)], axis=1)
    ring = np.concatenate([[[0.0, 0.0]], ring, 0.5 * ring, 0.25 * ring]) @ Fi.T
    t = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(t, t, indexing="ij")
    P = np.stack([X.ravel(), Y.ravel()], axis=1)
    lo = np.zeros(len(P))
    hi = np.full(len(P), 0.5)
    for _ in range(iters):
        r = 0.5 * (lo + hi)
        Q = (P[:, None, :] + r[:, None, None] * ring[None]) % 1.0
        mem = cover.membership(Q.reshape(-1, 2)).reshape(len(P), len(ring), -1)
        fits = mem.all(axis=1).any(axis=1)
        lo = np.where(fits, r, lo)
        hi = np.where(fits, hi, r)
    return float(lo.min())


def raster_component_count(F, va, vb, n=1024, min_pixels=20):
    """Number of rectangles of a cross configuration, by flood fill.

    Rasterizes the segments ``H = {F^-1 (t, 0)}`` and ``V = {F^-1 (0, t)}``
    (``|t| <= alpha(va)`` and ``|t| <= beta(vb)``) on an ``n x n`` torus
    grid, labels the complement with 4-connectivity, glues labels across
    the wrap-around edges and counts components above ``min_pixels``.
    """
    from scipy import ndimage
    F = np.asarray(F, dtype=float)
    Fi = np.linalg.inv(F)
    A = float(F[0] @ np.asarray(va, dtype=float))
    B = float(F[1] @ np.asarray(vb, dtype=float))
    wall = np.zeros((n, n), dtype=bool)
    for length, col in ((A, 0), (B, 1)):
        d = Fi[:, col]
        steps = int(4 * n * length * np.abs(d).max()) + 2
        t = np.linspace(-length, length, steps)
        pts = (np.outer(t, d) % 1.0) * n
        idx = np.floor(pts).astype(int) % n
        wall[idx[:, 0], idx[:, 1]] = True
    lab, m = ndimage.label(~wall)
    parent = list(range(m + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in ((lab[0, :], lab[-1, :]), (lab[:, 0], lab[:, -1])):
        for x, y in zip(a, b):
            if x and y:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
    sizes = {}
    counts = np.bincount(lab.ravel(), minlength=m + 1)
    for i in range(1, m + 1):
        r = find(i)
        sizes[r] = sizes.get(r, 0) + int(counts[i])
    return sum(1 for s in sizes.values() if s >= min_pixels)


def projection_by_minimization(z, e1, e2):
    """Closest point on the geodesic with ideal endpoints ``e1, e2`` (reals).

    Parametrizes the geodesic by hyperbolic arc length from its top and
    minimizes the hyperbolic distance to ``z`` numerically. Returns the
    complex point and the distance.
    """
    from scipy.optimize import minimize_scalar
    c, r = (e1 + e2) / 2.0, abs(e2 - e1) / 2.0

    def point(s):
        # arc length s from the top of the half circle
        return complex(c + r * math.tanh(s), r / math.cosh(s))

    def dist(s):
        w = point(s)
        return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))

    res = minimize_scalar(dist, bounds=(-40, 40), method="bounded",
                          options={"xatol": 1e-12})
    return point(res.x), float(res.fun)


def perron_root(A):
    """Largest eigenvalue modulus of a square matrix, by numpy."""
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(A, dtype=float)))))


def pillowcase_matrix(letters):
    """Integer 2x2 image of a 3-strand braid word (left to right product)."""
    M = ((1, 0), (0, 1))
    for g in letters:
        P = _PILLOW[int(g)]
        M = ((M[0][0] * P[0][0] + M[0][1] * P[1][0], M[0][0] * P[0][1] + M[0][1] * P[1][1]),
             (M[1][0] * P[0][0] + M[1][1] * P[1][0], M[1][0] * P[0][1] + M[1][1] * P[1][1]))
    return M


def pillowcase_log_norm(letters, v=(1, 0)):
    """``log |M v|`` for the pillowcase image ``M`` of ``letters``.

    Curve lengths on the 3-punctured disk and on the pillowcase differ by a
    bounded factor, so this matches the braid log curve norm up to an
    additive constant.
    """
    M = pillowcase_matrix(letters)
    x = M[0][0] * v[0] + M[0][1] * v[1]
    y = M[1][0] * v[0] + M[1][1] * v[1]
    s = x * x + y * y
    k = s.bit_length()
    if k < 1000:
        return 0.5 * math.log(s)
    return 0.5 * (math.log(s >> (k - 64)) + (k - 64) * math.log(2))


# pillowcase slopes of the two shipped reference curves on the 3-punctured disk
PILLOW_SLOPES = ((1, 0), (0, 1))


def pillowcase_intersections(letters, v):
    """Crossings of the image of the slope-``v`` curve with the two diagonal arcs.

    On the pillowcase the arcs of slope 1 and -1 between the marked points
    meet a curve of slope ``(x, y)`` in ``2 |x - y|`` and ``2 |x + y|``
    points.
    """
    M = pillowcase_matrix(letters)
    x = M[0][0] * v[0] + M[0][1] * v[1]
    y = M[1][0] * v[0] + M[1][1] * v[1]
    return 2 * abs(x - y), 2 * abs(x + y)


def pillowcase_norm(letters, v):
    """Quarter of the diagonal-arc crossing count of the image curve."""
    a, b = pillowcase_intersections(letters, v)
    return (a + b) // 4


def run_all(seed=0):
    """Run every oracle against the main routines on small seeded instances.

    Returns a JSON-ready dict with one entry per check and an overall ``ok``.
    """
    from .braid import apply_word, curve_norm, log_norm, reference_curves
    from .cover import OpenCover, lebesgue_number, min_subcover
    from .partition import build_sequence, exact_sequence, transition_matrices
    from .presets import get_preset
    from .rsft import RandomSFT, count_cylinders
    from .torus import TeichGeodesic, closest_point_projection
    from .walk import SamplePath
    rng = np.random.default_rng(seed)
    res = {}

    bad = 0
    for _ in range(40):
        L = int(rng.integers(1, 5))
        ks = [int(k) for k in rng.integers(1, 5, size=L + 1)]
        mats = [(rng.random((ks[i], ks[i + 1])) < 0.6).astype(np.uint8) for i in range(L)]
        sft = RandomSFT(0, ks, mats)
        bad += count_cylinders(sft, 0, 0, L) != brute_count_cylinders(mats, ks)
    res["cylinders"] = {"instances": 40, "mismatches": int(bad), "ok": bool(bad == 0)}

    bad = 0
    for _ in range(30):
        S = rng.random((int(rng.integers(2, 9)), 14)) < 0.35
        got, exact = min_subcover(S)
        bad += (not exact) or got != brute_min_cover(S)
    res["min_cover"] = {"instances": 30, "mismatches": int(bad), "ok": bool(bad == 0)}

    g = get_preset("golden")
    seq = exact_sequence(SamplePath(g.measure, seed), -4, 8)
    A = transition_matrices(seq, 0, 1).A(0)
    pr = perron_root(A)
    res["perron"] = {"rectangles": int(A.shape[0]), "root": pr, "expected": math.exp(golden_log()),
                     "ok": bool(abs(pr - math.exp(golden_log())) < 1e-9)}

    gap = []
    c0 = reference_curves(3)[0]
    for _ in range(10):
        w = [int(x) for x in rng.choice([1, -1, 2, -2], size=200)]
        gap.append(log_norm(curve_norm(apply_word(w, c0))) - pillowcase_log_norm(w))
    spread = max(gap) - min(gap)
    res["pillowcase"] = {"words": 10, "length": 200, "gap_spread": spread, "ok": bool(spread < 2.0)}
    bad = 0
    for _ in range(200):
        w = [int(x) for x in rng.choice([1, -1, 2, -2], size=int(rng.integers(0, 21)))]
        for c, v in zip(reference_curves(3), PILLOW_SLOPES):
            bad += curve_norm(apply_word(w, c)) != pillowcase_norm(w, v)
    res["crossings"] = {"words": 200, "mismatches": int(bad), "ok": bool(bad == 0)}

    worst = 0.0
    for _ in range(10):
        e1, e2 = sorted(rng.uniform(-3, 3, size=2))
        z = complex(rng.uniform(-3, 3), rng.uniform(0.2, 3))
        w = complex(closest_point_projection(z, TeichGeodesic(e1, e2)))
        v, _ = projection_by_minimization(z, e1, e2)
        worst = max(worst, abs(w - v))
    res["projection"] = {"instances": 10, "max_error": worst, "ok": bool(worst < 1e-6)}

    r = get_preset("random-ab")
    seq = build_sequence(SamplePath(r.measure, seed), -20, 40)
    counts = []
    for j in sorted(seq.parts)[:4]:
        P = seq.parts[j]
        counts.append([len(P), raster_component_count(P.frame.Ff, P.va, P.vb)])
    res["components"] = {"fibers": counts, "ok": all(a == b for a, b in counts)}

    cov = OpenCover.regular(3)
    d, err = lebesgue_number(cov, n=48)
    ref = brute_lebesgue(cov, n=48)
    res["lebesgue"] = {"value": d, "grid_error": err, "oracle": ref,
                       "ok": bool(abs(d - ref) <= 1e-3)}
    res["ok"] = bool(all(v["ok"] for v in res.values()))
    return res
