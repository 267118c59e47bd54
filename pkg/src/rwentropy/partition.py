"""Birectangle partitions along a torus sample path.

At every good time ``j`` the partition is cut out by the horizontal arcs of
the next good time ``k`` and the vertical arcs of the previous good time
``i``, all expressed in the frame of ``j``. Between good times the
partition is carried along by the walk, so those transitions are the
identity. Consecutive partitions are compared by walking each rectangle of
the earlier one up through the towers of the later one; the bands it
crosses give the 0/1 transition matrix.
"""
from dataclasses import dataclass
import math

import numpy as np

from .anchors import fiber_geometry, select_anchors, frame_matrix
from .flat import Frame, CrossPartition, basic_arcs, tower_walk, GeometryError
from .rsft import RandomSFT

__all__ = ["Birectangle", "PartitionSequence", "build_sequence", "build_partition",
           "refine", "check_semi_markov", "transition_matrices", "coding_diameter",
           "FoliationPair", "SemiMarkovReport", "Transition",
           "axis_frame", "exact_sequence", "int_matrix_product", "inverse_int",
           "partition_defects", "perturbed", "recheck_transition"]


def int_matrix_product(mats):
    """Product of a sequence of 2x2 integer matrices with overflow guard."""
    a, b, c, d = 1, 0, 0, 1
    for g in mats:
        g00, g01, g10, g11 = int(g[0][0]), int(g[0][1]), int(g[1][0]), int(g[1][1])
        a, b, c, d = a * g00 + b * g10, a * g01 + b * g11, c * g00 + d * g10, c * g01 + d * g11
    return ((a, b), (c, d))


def inverse_int(M):
    (a, b), (c, d) = M
    return ((d, -b), (-c, a))


def _apply(M, v):
    return (M[0][0] * int(v[0]) + M[0][1] * int(v[1]), M[1][0] * int(v[0]) + M[1][1] * int(v[1]))


def _apply_all(M, V):
    V = np.asarray(V)
    m = max(abs(x) for r in M for x in r)
    if V.dtype == np.int64 and m < 2 ** 40 and (not V.size or np.abs(V).max() < 2 ** 20):
        return V @ np.array(M, dtype=np.int64).T
    V = np.asarray(V, dtype=object)
    out = np.empty(V.shape, dtype=object)
    out[:, 0] = M[0][0] * V[:, 0] + M[0][1] * V[:, 1]
    out[:, 1] = M[1][0] * V[:, 0] + M[1][1] * V[:, 1]
    big = max(abs(int(x)) for x in out.ravel()) if out.size else 0
    return out.astype(np.int64) if big < 2 ** 62 else out


@dataclass
class FoliationPair:
    """Transverse directions ``theta_+`` (expanding) and ``theta_-`` on the unit-area torus."""
    plus: tuple
    minus: tuple

    def __post_init__(self):
        u, s = self.plus, self.minus
        if abs(float(u[0]) * float(s[1]) - float(u[1]) * float(s[0])) < 1e-14:
            raise ValueError("directions are not transverse")


@dataclass
class Birectangle:
    """A rectangle of a partition in frame coordinates.

    ``anchor`` is its lower-left vertex ``(x0, 0)``, ``h`` the horizontal side
    (transverse measure of the vertical foliation) and ``v`` the vertical side.
    """
    anchor: tuple
    h: float
    v: float
    bottom: str = "tau"
    top: str = "tau"
    sides: str = "eta"


def build_partition(frame, marked_point=(0, 0)):
    """Birectangle partition from the arc recipe at the marked point."""
    if tuple(marked_point) != (0, 0):
        raise ValueError("the marked point is the lattice origin")
    va, vb, _ = basic_arcs(frame)
    return CrossPartition(frame, va, vb)


def refine(base, finer_h, finer_v):
    """Common refinement cut by the horizontal arcs of ``finer_h`` and the
    vertical arcs of ``finer_v``; all three share one frame."""
    f = base.frame
    if f.sign_alpha((finer_h.va[0] - base.va[0], finer_h.va[1] - base.va[1])) < 0:
        raise ValueError("inclusion violated: horizontal boundary not contained")
    if f.sign_beta((finer_v.vb[0] - base.vb[0], finer_v.vb[1] - base.vb[1])) < 0:
        raise ValueError("inclusion violated: vertical boundary not contained")
    return CrossPartition(f, finer_h.va, finer_v.vb)


class PartitionSequence:
    """Partitions, transitions and anchors along one path window."""

    def __init__(self, geom, anchors, frames, arcs, parts, trans, goods):
        self.geom = geom
        self.anchors = anchors
        self.frames = frames           # good time -> Frame
        self.arcs = arcs               # good time -> (va, vb)
        self.parts = parts             # good time -> CrossPartition
        self.trans = trans             # (j, k) -> (bands, violations)
        self.goods = goods
        self._owner = np.empty(geom.n1 - geom.n0 + 1, dtype=np.int64)
        gs = np.array(goods)
        for n in range(geom.n0, geom.n1 + 1):
            if n >= 0:
                self._owner[n - geom.n0] = gs[gs <= n].max()
            else:
                self._owner[n - geom.n0] = gs[gs >= n].min()

    @property
    def n0(self):
        return self.geom.n0

    @property
    def n1(self):
        return self.geom.n1

    def owner(self, n):
        """Good time whose partition fiber ``n`` carries."""
        return int(self._owner[n - self.geom.n0])

    def partition(self, n):
        return self.parts[self.owner(n)]

    def k(self, n):
        return len(self.partition(n))

    def edge(self, n):
        """``(j, k)`` if the edge ``n -> n+1`` is a nontrivial transition, else None."""
        a, b = self.owner(n), self.owner(n + 1)
        return None if a == b else (a, b)

    def matrix(self, n):
        e = self.edge(n)
        if e is None:
            return None
        return self.trans[e].matrix(len(self.parts[e[0]]), len(self.parts[e[1]]))

    def log_scale(self, j, k):
        """``T_k - T_j`` between fibers (frame of ``k`` is ``e^{...}`` finer)."""
        a = self.anchors
        return float(a.T[k - a.n0] - a.T[j - a.n0])

    def birectangles(self, n):
        P = self.partition(n)
        return [Birectangle((float(x0), 0.0), float(x1 - x0), float(h))
                for x0, x1, h in P.rectangles()]

    def dump(self, fh, fibers=None):
        """Write ``FIBER n k`` blocks with ``anchor_x anchor_y h v`` lines."""
        for n in (fibers if fibers is not None else range(self.n0, self.n1 + 1)):
            rects = self.birectangles(n)
            fh.write("FIBER %d %d\n" % (n, len(rects)))
            for r in rects:
                fh.write("%.17g %.17g %.17g %.17g\n" % (r.anchor[0], r.anchor[1], r.h, r.v))


def build_sequence(path, n0, n1, C=1.0, member=None, pad=96, geom=None, frame=None):
    """Anchors, partitions and transitions for fibers ``n0..n1``.

    ``C`` is the distance bound of the default membership test. ``frame``
    fixes one :class:`Frame` for every fiber; this is only meaningful when
    the walk is a single hyperbolic matrix and the frame sits on its axis
    (see :func:`exact_sequence`).
    """
    if geom is None:
        geom = fiber_geometry(path, n0, n1, pad=pad)
    step = geom.step
    arcs, frames = {}, {}
    cache = {} if frame is not None else None

    def frame_at(n):
        if frame is not None:
            return frame
        f = frames.get(n)
        if f is None:
            k = geom.idx(n)
            f = Frame(frame_matrix(geom.u[k], geom.s[k], 0.0))
            frames[n] = f
        return f

    def arcs_at(n):
        a = arcs.get(n)
        if a is None:
            if cache is not None:
                a = cache.get("arcs")
                if a is None:
                    a = cache["arcs"] = basic_arcs(frame)[:2]
            else:
                a = basic_arcs(frame_at(n))[:2]
            arcs[n] = a
        return a

    def cached(key, make):
        if cache is None:
            return make()
        if key not in cache:
            cache[key] = make()
        return cache[key]

    def M(m, n):
        return int_matrix_product([step(x) for x in range(m + 1, n + 1)])

    def nest(last, n):
        lo, hi = (last, n) if n > last else (n, last)
        Mi = inverse_int(M(lo, hi))
        fa = frame_at(hi)
        va_lo, vb_lo = (_apply(Mi, v) for v in arcs_at(lo))
        va_hi, vb_hi = arcs_at(hi)
        ok_h = fa.sign_alpha((va_hi[0] - va_lo[0], va_hi[1] - va_lo[1])) >= 0
        ok_v = fa.sign_beta((vb_lo[0] - vb_hi[0], vb_lo[1] - vb_hi[1])) >= 0
        return ok_h and ok_v

    anchors = select_anchors(geom, member=member, C=C, nest=nest)
    goods = anchors.good_times()
    parts = {}
    for idx, j in enumerate(goods):
        i = goods[idx - 1] if idx > 0 else j
        k = goods[idx + 1] if idx + 1 < len(goods) else j
        va = _apply(M(j, k), arcs_at(k)[0])
        vb = _apply(inverse_int(M(i, j)), arcs_at(i)[1])
        parts[j] = cached(("P", va, vb), lambda: CrossPartition(frame_at(j), va, vb))
    trans = {}
    for j, k in zip(goods[:-1], goods[1:]):
        Mi = inverse_int(M(j, k))
        P, Q = parts[j], parts[k]
        trans[(j, k)] = cached(("T", P.va, P.vb, Q.va, Q.vb, Mi),
                               lambda: _transition(P, Q, Mi))
    return PartitionSequence(geom, anchors, frames, arcs, parts, trans, goods)


@dataclass
class Transition:
    """Bands of one partition inside the next.

    Band ``b`` says source rectangle ``src[b]`` crosses destination rectangle
    ``dst[b]``, shifted up by the lattice vector ``cum[b]`` of the
    destination frame. Bands of one source rectangle are listed bottom up.
    """
    src: np.ndarray
    dst: np.ndarray
    cum: np.ndarray
    violations: list

    def matrix(self, k_src, k_dst):
        A = np.zeros((k_src, k_dst), dtype=np.uint8)
        A[self.src, self.dst] = 1
        return A

    def bands(self, i):
        sel = np.flatnonzero(self.src == i)
        return [(int(self.dst[b]), (int(self.cum[b, 0]), int(self.cum[b, 1]))) for b in sel]


def axis_frame(g):
    """Exact frame at a point of the axis of the hyperbolic matrix ``g``.

    The rows are ``alpha(v) = det(v, s)`` and ``beta(v) = det(u, v)`` for
    exact eigenvectors ``u`` (expanding) and ``s`` (contracting) scaled so
    that ``det(u, s) = 1``; entries lie in the quadratic field of ``g``.
    """
    from .torus import eigendirections
    e, c, _ = eigendirections(g)
    u = (e.x, e.y)
    s = (c.x, c.y)
    d = u[0] * s[1] - u[1] * s[0]
    s = (s[0] / d, s[1] / d)
    return Frame([[s[1], -s[0]], [-u[1], u[0]]])


def exact_sequence(path, n0, n1, g=None, pad=96):
    """Partition sequence of a single-matrix walk in exact quadratic arithmetic.

    Every fiber carries the same frame on the axis of ``g`` (the one matrix
    in the support of the path's measure), so every comparison is decided
    exactly.
    """
    if g is None:
        if len(path.measure) != 1:
            raise ValueError("exact mode needs a single-matrix measure")
        g = path.measure.elements[0]
    return build_sequence(path, n0, n1, pad=pad, frame=axis_frame(g), C=float("inf"))


def _transition(src, dst, Minv):
    """Bands of ``src`` rectangles in ``dst``; ``Minv`` maps src lattice to dst lattice."""
    cuts = _apply_all(Minv, src.cuts)
    rets = _apply_all(Minv, src.rets)
    f = dst.frame
    if f.exact or cuts.dtype != np.int64:
        bl, bad = tower_walk(f, cuts, rets, dst)
        s_, d_, c_ = [], [], []
        for i, b in enumerate(bl):
            for j, cum in b:
                s_.append(i)
                d_.append(j)
                c_.append(cum)
        tr = Transition(np.array(s_, dtype=np.int64), np.array(d_, dtype=np.int64),
                        np.array(c_, dtype=object).reshape(-1, 2), bad)
    else:
        tr = _fast_transition(f, cuts, rets, dst)
    # a source rectangle must meet each destination rectangle in one band
    key = tr.src * (len(dst) + 1) + tr.dst
    if len(np.unique(key)) != len(key):
        u, cnt = np.unique(key, return_counts=True)
        for kk, c in zip(u[cnt > 1], cnt[cnt > 1]):
            i = int(kk // (len(dst) + 1))
            tr.violations.append(("M2", i, "rectangle meets a later rectangle in %d pieces" % c,
                                  int(kk % (len(dst) + 1))))
    va = _apply(Minv, src.va)
    vb = _apply(Minv, src.vb)
    if f.sign_alpha((dst.va[0] - va[0], dst.va[1] - va[1])) < 0:
        tr.violations.append(("M1", -1, "horizontal boundary not contained", None))
    if f.sign_beta((vb[0] - dst.vb[0], vb[1] - dst.vb[1])) < 0:
        tr.violations.append(("M1", -1, "vertical boundary does not contain the later one", None))
    return tr


def recheck_transition(src, dst, Minv):
    """Recompute the transition between two (possibly perturbed) partitions."""
    return _transition(src, dst, Minv)


def perturbed(P, cuts=None, rets=None, va=None, vb=None):
    """Shallow copy of the partition ``P`` with some data replaced (for fault injection)."""
    import copy
    Q = copy.copy(P)
    if cuts is not None:
        Q.cuts = np.asarray(cuts, dtype=np.int64)
        Q.cut_alpha = P.frame.alphas(Q.cuts)
    if rets is not None:
        Q.rets = np.asarray(rets, dtype=np.int64)
        Q.ret_beta = P.frame.betas(Q.rets)
        Q.ret_alpha = P.frame.alphas(Q.rets)
    if va is not None:
        Q.va = tuple(int(x) for x in va)
    if vb is not None:
        Q.vb = tuple(int(x) for x in vb)
    return Q


def partition_defects(P, grid=24, tol=1e-9):
    """Problems with ``P`` as a partition of the unit-area torus.

    Checks the total area and that each point of a shifted grid lies in the
    interior of exactly one rectangle (up to lattice translation). Returns a
    list of messages, empty when the partition is valid.
    """
    out = []
    area = float(P.area())
    if abs(area - 1.0) > 1e-9:
        out.append("area %.12g != 1" % area)
    f = P.frame
    F = np.asarray(f.Ff, dtype=float)
    A = float(f.alpha(P.va))
    x0, x1, h = P.cut_alpha[:-1], P.cut_alpha[1:], np.asarray(P.ret_beta, dtype=float)
    hmax = float(h.max())
    t = (np.arange(grid) + 0.5) / grid + 0.01234567
    for s in t:
        for u in t:
            p = F @ np.array([s % 1.0, u % 1.0])
            V = f.box(p[0] - A - tol, p[0] + A + tol, p[1] - hmax - tol, p[1] + tol)
            if not len(V):
                out.append("gap at (%.4f, %.4f)" % (s % 1.0, u % 1.0))
                continue
            V = np.asarray(V, dtype=float)
            X = p[0] - V @ F[0]
            Y = p[1] - V @ F[1]
            inside = ((X[:, None] > x0 + tol) & (X[:, None] < x1 - tol)
                      & (Y[:, None] > tol) & (Y[:, None] < h - tol))
            c = int(inside.sum())
            if c != 1:
                out.append("%s at (%.4f, %.4f)" % ("gap" if c == 0 else "overlap",
                                                    s % 1.0, u % 1.0))
    return out


def _fast_transition(f, cuts, rets, dst):
    from . import _kernels as K
    bs, bj, c0, c1, fs, fc, fn = K.walk_towers(f.Ff, np.ascontiguousarray(cuts),
                                                np.ascontiguousarray(rets),
                                                dst.cuts, dst.cut_alpha, dst.rets)
    bad = []
    for i, code, nb in zip(fs.tolist(), fc.tolist(), fn.tolist()):
        if code == K.UNDECIDABLE:
            raise GeometryError("undecidable intersection at tolerance in tower walk")
        bad.append(("M1", i, _FAILS[code], nb))
    return Transition(bs, bj, np.stack([c0, c1], axis=1), bad)


_FAILS = {1: "base outside horizontal segment",
          2: "vertical boundary crosses rectangle interior",
          3: "tower overshoots the rectangle top",
          5: "tower walk did not terminate"}


@dataclass
class SemiMarkovReport:
    checked_edges: int
    violations: list

    @property
    def ok(self):
        return not self.violations

    def count(self, kind):
        return sum(1 for v in self.violations if v[1] == kind)


def check_semi_markov(seq):
    """Collect every (M1)/(M2) violation with its edge as a witness."""
    viol = []
    for (j, k), tr in sorted(seq.trans.items()):
        for b in tr.violations:
            viol.append(((j, k),) + tuple(b))
    return SemiMarkovReport(len(seq.trans), viol)


def transition_matrices(seq, n0=None, n1=None):
    """The :class:`RandomSFT` of the sequence on ``[n0, n1]``."""
    n0 = seq.n0 if n0 is None else n0
    n1 = seq.n1 if n1 is None else n1
    ks = [seq.k(n) for n in range(n0, n1 + 1)]
    mats = [seq.matrix(n) for n in range(n0, n1)]
    return RandomSFT(n0, ks, mats)


def coding_diameter(seq, n, m):
    """Largest horizontal and vertical sides of depth-``m`` cells at fiber ``n``.

    Measured in the flat metric of the anchor ``X_n``. A depth-``m`` cell is
    a full-width horizontal strip of its rectangle cut by the forward
    fibers and a full-height vertical strip cut by the backward fibers, so
    its height is the height of its fiber ``n+m`` rectangle scaled by
    ``e^{-(T_{n+m} - T_n)}`` and its width that of its fiber ``n-m``
    rectangle scaled by ``e^{-(T_n - T_{n-m})}``.
    """
    if n - m < seq.n0 or n + m > seq.n1:
        raise IndexError("fibers %d..%d outside the window" % (n - m, n + m))
    T = seq.anchors.T
    o = seq.n0
    # letters of fiber n+m reachable from fiber n, and of n-m reaching fiber n
    reach = np.ones(seq.k(n), dtype=bool)
    for f in range(n, n + m):
        A = seq.matrix(f)
        if A is not None:
            reach = (reach.astype(np.int64) @ A) > 0
    hs = seq.partition(n + m).heights()[reach]
    back = np.ones(seq.k(n), dtype=bool)
    for f in range(n - 1, n - m - 1, -1):
        A = seq.matrix(f)
        if A is not None:
            back = (A.astype(np.int64) @ back.astype(np.int64)) > 0
    ws = seq.partition(n - m).widths()[back]
    hmax = float(hs.max()) * math.exp(-(T[n + m - o] - T[n - o]))
    wmax = float(ws.max()) * math.exp(-(T[n - o] - T[n - m - o]))
    return wmax, hmax
