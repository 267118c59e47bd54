"""Flat-torus geometry in frame coordinates.

A *frame* is a linear map ``v -> (alpha(v), beta(v))`` from the integer
lattice Z^2 of a fiber to the plane, with determinant +-1. ``alpha`` is the
transverse measure of the contracting (vertical) foliation, so horizontal
leaves are ``beta = const``. Entries are floats or exact QuadraticNumbers.

Every point that matters (cut points, endpoints, return vectors) is named
by an integer vector, so equality is exact. Floats only guide searches;
orderings between named points are decided by the sign of ``alpha`` or
``beta`` on an integer difference vector.
"""
import math

import numpy as np

from . import _kernels as _k

from .quadratic import QuadraticNumber

__all__ = ["Frame", "gauss_reduce", "basic_arcs", "CrossPartition",
           "GeometryError", "tower_walk"]


class GeometryError(RuntimeError):
    """A geometric decision could not be made at the working tolerance."""


def gauss_reduce(b1, b2):
    """Lagrange-Gauss reduction of a planar basis.

    Returns ``(c1, c2, U)`` with ``[c1 c2] = [b1 b2] @ U``, ``U`` unimodular.
    """
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    U = np.eye(2, dtype=np.int64)
    if b1 @ b1 > b2 @ b2:
        b1, b2 = b2, b1
        U = U[:, ::-1].copy()
    for _ in range(200):
        mu = round(float(b1 @ b2) / float(b1 @ b1))
        if mu:
            b2 = b2 - mu * b1
            U[:, 1] -= mu * U[:, 0]
        if b2 @ b2 >= b1 @ b1:
            break
        b1, b2 = b2, b1
        U = U[:, ::-1].copy()
    return b1, b2, U


class Frame:
    """Linear frame ``F`` of a fiber lattice.

    Parameters
    ----------
    F : 2x2 nested sequence
        ``F[0] = (alpha(e1), alpha(e2))`` and ``F[1] = (beta(e1), beta(e2))``.
        Float entries give a float frame; QuadraticNumber entries an exact one.
    """

    def __init__(self, F):
        self.exact = isinstance(F[0][0], QuadraticNumber)
        if self.exact:
            self.F = [[F[0][0], F[0][1]], [F[1][0], F[1][1]]]
            self.Ff = np.array([[float(x) for x in row] for row in F])
        else:
            self.Ff = np.array(F, dtype=float)
            self.F = self.Ff
        det = self.Ff[0, 0] * self.Ff[1, 1] - self.Ff[0, 1] * self.Ff[1, 0]
        if abs(abs(det) - 1) > 1e-6:
            raise ValueError("frame must have unit covolume, det = %r" % det)
        scale = float(np.abs(self.Ff).max())
        self.eps = 0.0 if self.exact else 1e-11 * max(scale, 1.0)
        c1, c2, U = gauss_reduce(self.Ff[:, 0], self.Ff[:, 1])
        self._B = np.column_stack([c1, c2])
        self._Binv = np.linalg.inv(self._B)
        self._U = U

    # -- coordinates -------------------------------------------------------
    def alpha(self, v):
        return self.F[0][0] * int(v[0]) + self.F[0][1] * int(v[1])

    def beta(self, v):
        return self.F[1][0] * int(v[0]) + self.F[1][1] * int(v[1])

    def alphas(self, V):
        """Float alpha values of an integer array ``(N, 2)``."""
        V = np.asarray(V, dtype=float).reshape(-1, 2)
        return V @ self.Ff[0]

    def betas(self, V):
        V = np.asarray(V, dtype=float).reshape(-1, 2)
        return V @ self.Ff[1]

    def sign_alpha(self, v):
        """Sign of ``alpha(v)``; exact for QuadraticNumber frames."""
        x = self.alpha(v)
        if self.exact:
            return x.sign()
        if v[0] == 0 and v[1] == 0:
            return 0
        if abs(x) <= 1e-14 * (abs(v[0]) + abs(v[1])) * float(np.abs(self.Ff[0]).max()):
            raise GeometryError("undecidable intersection at tolerance: alpha(%r) = %r"
                                % (tuple(v), x))
        return 1 if x > 0 else -1

    def sign_beta(self, v):
        x = self.beta(v)
        if self.exact:
            return x.sign()
        if v[0] == 0 and v[1] == 0:
            return 0
        if abs(x) <= 1e-14 * (abs(v[0]) + abs(v[1])) * float(np.abs(self.Ff[1]).max()):
            raise GeometryError("undecidable intersection at tolerance: beta(%r) = %r"
                                % (tuple(v), x))
        return 1 if x > 0 else -1

    def scaled(self, lam):
        """Frame ``diag(1/lam, lam) F`` (later point on the same geodesic)."""
        if self.exact:
            return Frame([[self.F[0][0] / lam, self.F[0][1] / lam],
                          [self.F[1][0] * lam, self.F[1][1] * lam]])
        lam = float(lam)
        return Frame([[self.Ff[0, 0] / lam, self.Ff[0, 1] / lam],
                      [self.Ff[1, 0] * lam, self.Ff[1, 1] * lam]])

    def pullback(self, M):
        """Frame of the lattice ``M Z^2``: ``v -> F M v`` for integer ``M``."""
        M = [[int(M[0][0]), int(M[0][1])], [int(M[1][0]), int(M[1][1])]]
        F = self.F
        G = [[F[r][0] * M[0][c] + F[r][1] * M[1][c] for c in range(2)] for r in range(2)]
        return Frame(G)

    # -- lattice search -----------------------------------------------------
    def box(self, a0, a1, b0, b1):
        """Integer vectors with ``alpha in [a0, a1]`` and ``beta in [b0, b1]``.

        Bounds are floats widened by a small margin; callers that care about
        boundary cases filter the result exactly.
        """
        m = 1e-9 * (1 + max(abs(a0), abs(a1), abs(b0), abs(b1)))
        a0, a1, b0, b1 = float(a0) - m, float(a1) + m, float(b0) - m, float(b1) + m
        if a1 < a0 or b1 < b0:
            return np.zeros((0, 2), dtype=np.int64)
        B, Bi = self._B, self._Binv
        if self._U.dtype == np.int64:
            V = _k.box_points(B, Bi, self._U, a0, a1, b0, b1, 5_000_000)
            if len(V) == 1 and V[0, 0] == -1 and V[0, 1] > 5_000_000:
                raise GeometryError("arc explosion: %d lattice points in search box" % V[0, 1])
            return V
        corners = np.array([[a0, a1, a0, a1], [b0, b0, b1, b1]])
        w = Bi @ corners
        lo, hi = math.floor(w[0].min()), math.ceil(w[0].max())
        w0 = np.arange(lo, hi + 1, dtype=np.int64)
        lo1 = np.full(w0.shape, -np.inf)
        hi1 = np.full(w0.shape, np.inf)
        for r, (c0, c1) in ((0, (a0, a1)), (1, (b0, b1))):
            k0, k1 = B[r, 0], B[r, 1]
            base = k0 * w0
            if abs(k1) < 1e-300:
                bad = (base < c0) | (base > c1)
                lo1[bad], hi1[bad] = np.inf, -np.inf
                continue
            p = (c0 - base) / k1
            q = (c1 - base) / k1
            lo1 = np.maximum(lo1, np.minimum(p, q))
            hi1 = np.minimum(hi1, np.maximum(p, q))
        lo1 = np.ceil(lo1)
        hi1 = np.floor(hi1)
        cnt = np.maximum(hi1 - lo1 + 1, 0).astype(np.int64)
        if cnt.sum() == 0:
            return np.zeros((0, 2), dtype=np.int64)
        if cnt.sum() > 5_000_000:
            raise GeometryError("arc explosion: %d lattice points in search box" % cnt.sum())
        rep0 = np.repeat(w0, cnt)
        start = np.repeat(lo1.astype(np.int64), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        W = np.stack([rep0, start + offs])
        V = (self._U @ W).T
        return V.astype(np.int64)


def _first_positive_beta(frame, a_lo, a_hi, lo_open, hi_open, y0=0.0):
    """Vector with the least ``beta > y0`` among ``alpha`` in the given interval.

    ``lo_open``/``hi_open`` exclude the endpoints (only matters at 0, which is
    the only named endpoint used here).
    """
    Y = max(1.0, 4.0 / max(a_hi - a_lo, 1e-12)) + y0
    for _ in range(80):
        V = frame.box(a_lo, a_hi, y0, Y)
        if len(V):
            al, be = frame.alphas(V), frame.betas(V)
            ok = be > y0 + frame.eps
            ok &= (al > a_lo + frame.eps) if lo_open else (al >= a_lo - frame.eps)
            ok &= (al < a_hi - frame.eps) if hi_open else (al <= a_hi + frame.eps)
            if ok.any():
                idx = np.flatnonzero(ok)
                return V[idx[np.argmin(be[idx])]]
        Y = 2 * Y
    raise GeometryError("no return within search limit")


def basic_arcs(frame):
    """The tau/eta construction at the marked point.

    Horizontal arcs of transverse measure 1 leave the origin to the right and
    left. The vertical arc up (and down) is the shortest one meeting both;
    the horizontal arcs are truncated at their last crossing with it, then
    the vertical arcs are extended until they meet the truncated arcs once
    more. The torus lattice is symmetric under ``v -> -v``, so both
    horizontal arcs end at ``+-alpha(va)`` and both vertical arcs at
    ``+-beta(vb)``.

    Returns ``(va, vb, vy)``: integer vectors with ``alpha(va) > 0`` the
    horizontal half-length, ``beta(vb) > 0`` the vertical half-length, and
    ``vy`` realizing the untruncated vertical half-length.
    """
    if not frame.exact and frame._U.dtype == np.int64:
        va, vb, vy, st = _k.basic_arcs_float(frame._B, frame._Binv, frame._U, frame.Ff, frame.eps)
        if st == 1:
            raise GeometryError("arc search did not terminate")
        if st == 2:
            raise GeometryError("undecidable intersection at tolerance in arc construction")
        return tuple(int(x) for x in va), tuple(int(x) for x in vb), tuple(int(x) for x in vy)
    # shortest up-arc meeting the right arc: v with alpha in [-1, 0), beta > 0
    r = _first_positive_beta(frame, -1.0, 0.0, False, True)
    l = _first_positive_beta(frame, 0.0, 1.0, True, False)
    vy = r if frame.beta(r) >= frame.beta(l) else l
    vy = (int(vy[0]), int(vy[1]))
    Y = float(frame.beta(vy))
    # truncation: last crossing x in (0, 1] with |beta| <= Y
    V = frame.box(0.0, 1.0, -Y, Y)
    al, be = frame.alphas(V), frame.betas(V)
    ok = (al > frame.eps) & (al <= 1 + frame.eps) & (np.abs(be) <= Y + frame.eps)
    idx = np.flatnonzero(ok)
    # an exact tie with Y is the vector vy itself (or -vy), which is kept
    va = V[idx[np.argmax(al[idx])]]
    va = (int(va[0]), int(va[1]))
    A = float(frame.alpha(va))
    # extension: first beta > Y with alpha in [-A, A]
    vb = _first_positive_beta_strict(frame, va, vy)
    return tuple(int(x) for x in va), tuple(int(x) for x in vb), tuple(int(x) for x in vy)


def _first_positive_beta_strict(frame, va, vy):
    """Least ``beta(v) > beta(vy)`` with ``|alpha(v)| <= alpha(va)`` (exact ends)."""
    A = float(frame.alpha(va))
    Y = float(frame.beta(vy))
    top = Y + max(1.0, 4.0 / A)
    if not frame.exact:
        return _strict_float(frame, va, vy, A, Y, top)
    for _ in range(80):
        V = frame.box(-A, A, Y, top)
        cand = []
        for v in V:
            v = (int(v[0]), int(v[1]))
            if v == vy or frame.sign_beta((v[0] - vy[0], v[1] - vy[1])) <= 0:
                continue
            if frame.sign_alpha((va[0] - v[0], va[1] - v[1])) < 0:
                continue
            if frame.sign_alpha((va[0] + v[0], va[1] + v[1])) < 0:
                continue
            cand.append(v)
        if cand:
            best = cand[0]
            for v in cand[1:]:
                if frame.sign_beta((best[0] - v[0], best[1] - v[1])) > 0:
                    best = v
            return best
        top = Y + 2 * (top - Y)
    raise GeometryError("vertical arc extension did not terminate")


def _signs(frame, row, D):
    """Vectorized float ``sign_alpha`` (row 0) or ``sign_beta`` (row 1)."""
    r = frame.Ff[row]
    x = D[:, 0] * r[0] + D[:, 1] * r[1]
    tol = 1e-14 * np.abs(D).sum(axis=1) * float(np.abs(r).max())
    zero = (D[:, 0] == 0) & (D[:, 1] == 0)
    if np.any((np.abs(x) <= tol) & ~zero):
        raise GeometryError("undecidable intersection at tolerance")
    return np.where(zero, 0, np.sign(x)).astype(np.int64)


def _strict_float(frame, va, vy, A, Y, top):
    va, vy = np.array(va, dtype=np.int64), np.array(vy, dtype=np.int64)
    for _ in range(80):
        V = frame.box(-A, A, Y, top)
        if len(V):
            ok = _signs(frame, 1, V - vy) > 0
            ok &= _signs(frame, 0, va - V) >= 0
            ok &= _signs(frame, 0, va + V) >= 0
            if ok.any():
                C = V[ok]
                return tuple(int(x) for x in C[np.argmin(frame.betas(C))])
        top = Y + 2 * (top - Y)
    raise GeometryError("vertical arc extension did not terminate")


class CrossPartition:
    """Rectangles cut out by ``H = [-A, A]`` (horizontal) and ``V = [-B, B]``.

    ``A = alpha(va)`` and ``B = beta(vb)``. The configuration must be closed
    up: both ends of ``H`` lie on translates of ``V`` and both ends of ``V``
    on translates of ``H``. The rectangles are the towers over the cells of
    ``H`` between consecutive upper cut points: cell ``a`` spans
    ``[alpha(cuts[a]), alpha(cuts[a+1])] x [0, beta(ret[a])]`` and its top
    edge is the cell translated by ``-alpha(ret[a])`` on ``H``.
    """

    def __init__(self, frame, va, vb):
        self.frame = frame
        self.va = tuple(int(x) for x in va)
        self.vb = tuple(int(x) for x in vb)
        if frame.sign_alpha(self.va) <= 0 or frame.sign_beta(self.vb) <= 0:
            raise ValueError("need alpha(va) > 0 and beta(vb) > 0")
        self._build()

    def _build(self):
        f = self.frame
        A = float(f.alpha(self.va))
        B = float(f.beta(self.vb))
        eps = f.eps
        if not f.exact and f._U.dtype == np.int64:
            cuts, cal, rets, st = _k.cross_float(f._B, f._Binv, f._U, f.Ff, eps,
                                                 self.va[0], self.va[1], self.vb[0], self.vb[1])
            if st:
                raise GeometryError("no return vector for cell %d (configuration not closed up)"
                                    % (st - 1))
            self.cuts, self.cut_alpha, self.rets = cuts, cal, rets
            self.ret_beta = f.betas(rets)
            self.ret_alpha = f.alphas(rets)
            return
        V = f.box(-A, A, -B, B)
        al, be = f.alphas(V), f.betas(V)
        ok = (np.abs(al) <= A + eps) & (be > -B + eps) & (be <= B + eps)
        if f.exact:
            ok = np.array([self._exact_cut(tuple(v)) for v in V], dtype=bool)
        ends = np.array([self.va, (-self.va[0], -self.va[1])], dtype=V.dtype if len(V) else np.int64)
        cuts = np.unique(np.concatenate([V[ok], ends]), axis=0)
        cf = f.alphas(cuts)
        order = np.argsort(cf, kind="stable")
        cuts = cuts[order]
        cf = cf[order]
        if f.exact:
            cuts = [tuple(int(x) for x in v) for v in cuts]
            cuts = _exact_sort(f, cuts)
            cf = f.alphas(np.array(cuts))
        self.cuts = np.array(cuts, dtype=np.int64)
        self.cut_alpha = cf
        self.rets = self._returns(A, B)
        self.ret_beta = f.betas(self.rets)
        self.ret_alpha = f.alphas(self.rets)

    def _exact_cut(self, v):
        f = self.frame
        va, vb = self.va, self.vb
        if f.sign_alpha((va[0] - v[0], va[1] - v[1])) < 0:
            return False
        if f.sign_alpha((va[0] + v[0], va[1] + v[1])) < 0:
            return False
        if f.sign_beta((v[0] + vb[0], v[1] + vb[1])) <= 0:
            return False
        return f.sign_beta((vb[0] - v[0], vb[1] - v[1])) >= 0

    def _returns(self, A, B):
        f = self.frame
        eps = f.eps
        P = f.box(-2 * A, 2 * A, 0.0, 2 * B)
        pa, pb = f.alphas(P), f.betas(P)
        keep = pb > eps
        P, pa, pb = P[keep], pa[keep], pb[keep]
        o = np.argsort(pb, kind="stable")
        P, pa, pb = P[o], pa[o], pb[o]
        K = len(self.cuts) - 1
        lo = self.cut_alpha[1:] - A          # alpha(ret) >= x_{a+1} - A
        hi = self.cut_alpha[:-1] + A         # alpha(ret) <= x_a + A
        out = np.zeros((K, 2), dtype=np.int64)
        first = None if f.exact else _k.first_in_range(pa, lo, hi, eps)
        for a in range(K):
            if first is not None:
                if first[a] < 0:
                    raise GeometryError("no return vector for cell %d (configuration not closed up)" % a)
                out[a] = P[first[a]]
                continue
            m = (pa >= lo[a] - eps) & (pa <= hi[a] + eps)
            idx = np.flatnonzero(m)
            if len(idx) == 0:
                raise GeometryError("no return vector for cell %d (configuration not closed up)" % a)
            if f.exact:
                best = None
                for i in idx:
                    v = tuple(int(x) for x in P[i])
                    if not self._exact_in(v, a, A):
                        continue
                    if best is None or f.sign_beta((best[0] - v[0], best[1] - v[1])) > 0:
                        best = v
                out[a] = best
            else:
                out[a] = P[idx[0]]
        return out

    def _exact_in(self, v, a, A):
        f = self.frame
        c0, c1, va = self.cuts[a], self.cuts[a + 1], self.va
        # alpha(v) >= alpha(c1) - A  and  alpha(v) <= alpha(c0) + A
        if f.sign_alpha((v[0] - int(c1[0]) + va[0], v[1] - int(c1[1]) + va[1])) < 0:
            return False
        return f.sign_alpha((int(c0[0]) + va[0] - v[0], int(c0[1]) + va[1] - v[1])) >= 0

    # -- derived quantities --------------------------------------------------
    def __len__(self):
        return len(self.rets)

    @property
    def A(self):
        return self.frame.alpha(self.va)

    @property
    def B(self):
        return self.frame.beta(self.vb)

    def widths(self):
        return np.diff(self.cut_alpha)

    def heights(self):
        return self.ret_beta

    def area(self):
        """Total area; exact (a QuadraticNumber) for exact frames."""
        f = self.frame
        if f.exact:
            tot = QuadraticNumber(0, 0, f.F[0][0].D)
            for a in range(len(self)):
                c0, c1 = self.cuts[a], self.cuts[a + 1]
                w = f.alpha((int(c1[0]) - int(c0[0]), int(c1[1]) - int(c0[1])))
                tot = tot + w * f.beta(self.rets[a])
            return tot
        return float(np.sum(self.widths() * self.heights()))

    def locate(self, x):
        """Index of the cell containing float alpha ``x`` (``-1`` outside ``H``)."""
        i = int(np.searchsorted(self.cut_alpha, x, side="right")) - 1
        if i < 0 or i >= len(self):
            return -1
        return i

    def rectangles(self):
        """Float list of ``(x0, x1, h)`` per rectangle."""
        return [(self.cut_alpha[a], self.cut_alpha[a + 1], self.ret_beta[a])
                for a in range(len(self))]

    def contains_point(self, p):
        """Index of the rectangle containing the frame point ``p`` modulo the lattice.

        Returns ``(index, (x, y))`` with the point's position in the tower
        coordinates, or ``(-1, None)`` if no rectangle contains it.
        """
        f = self.frame
        A = float(f.alpha(self.va))
        hmax = float(self.ret_beta.max())
        V = f.box(p[0] - A - 1e-12, p[0] + A + 1e-12, p[1] - hmax, p[1])
        for v in V:
            x = p[0] - float(f.alpha(v))
            y = p[1] - float(f.beta(v))
            i = self.locate(x)
            if i >= 0 and -1e-12 <= y <= self.ret_beta[i] + 1e-12:
                return i, (x, y)
        return -1, None


def _exact_sort(f, vecs):
    import functools

    def cmp(u, v):
        return f.sign_alpha((u[0] - v[0], u[1] - v[1]))
    return sorted(vecs, key=functools.cmp_to_key(cmp))


def tower_walk(frame, src_cuts, src_rets, dst):
    """Follow every source rectangle up through the towers of ``dst``.

    ``src_cuts`` and ``src_rets`` are integer vectors of the source partition
    already expressed in the lattice of ``dst.frame``; each source base must
    lie on ``dst``'s horizontal segment. For every source rectangle the walk
    records the bands it crosses. Returns ``(bands, violations)`` where
    ``bands[i]`` is a list of ``(j, cum)``: destination rectangle ``j`` and the
    accumulated return vector ``cum`` below that band.
    """
    f = frame
    if not f.exact and all(np.asarray(x).dtype == np.int64 for x in (src_cuts, src_rets)):
        return _tower_walk_fast(f, src_cuts, src_rets, dst)
    out, bad = [], []
    cuts = dst.cuts
    dca = dst.cut_alpha
    drets = dst.rets
    for i in range(len(src_rets)):
        c0 = (int(src_cuts[i][0]), int(src_cuts[i][1]))
        c1 = (int(src_cuts[i + 1][0]), int(src_cuts[i + 1][1]))
        target = (int(src_rets[i][0]), int(src_rets[i][1]))
        tb = float(f.beta(target))
        cum = (0, 0)
        bands = []
        for _ in range(1_000_000):
            x0 = float(f.alpha((c0[0] - cum[0], c0[1] - cum[1])))
            x1 = float(f.alpha((c1[0] - cum[0], c1[1] - cum[1])))
            j = int(np.searchsorted(dca, 0.5 * (x0 + x1), side="right")) - 1
            if j < 0 or j >= len(drets):
                bad.append(("M1", i, "base outside horizontal segment", len(bands)))
                break
            # exact containment of the shifted base in column j
            d0 = (c0[0] - cum[0] - int(cuts[j][0]), c0[1] - cum[1] - int(cuts[j][1]))
            d1 = (int(cuts[j + 1][0]) - c1[0] + cum[0], int(cuts[j + 1][1]) - c1[1] + cum[1])
            if f.sign_alpha(d0) < 0 or f.sign_alpha(d1) < 0:
                bad.append(("M1", i, "vertical boundary crosses rectangle interior", len(bands)))
                break
            bands.append((j, cum))
            r = drets[j]
            cum = (cum[0] + int(r[0]), cum[1] + int(r[1]))
            if cum == target:
                break
            if float(f.beta(cum)) > tb + 1e-9 * (1 + abs(tb)):
                bad.append(("M1", i, "tower overshoots the rectangle top", len(bands)))
                break
        out.append(bands)
    return out, bad


_FAIL = {_k.OUTSIDE: "base outside horizontal segment",
         _k.CROSSES: "vertical boundary crosses rectangle interior",
         _k.OVERSHOOT: "tower overshoots the rectangle top",
         _k.RUNAWAY: "tower walk did not terminate"}


def _tower_walk_fast(f, src_cuts, src_rets, dst):
    bs, bj, c0, c1, fs, fc, fn = _k.walk_towers(
        f.Ff, np.ascontiguousarray(src_cuts), np.ascontiguousarray(src_rets),
        dst.cuts, dst.cut_alpha, dst.rets)
    out = [[] for _ in range(len(src_rets))]
    for i, j, x, y in zip(bs.tolist(), bj.tolist(), c0.tolist(), c1.tolist()):
        out[i].append((j, (x, y)))
    bad = []
    for i, code, nb in zip(fs.tolist(), fc.tolist(), fn.tolist()):
        if code == _k.UNDECIDABLE:
            raise GeometryError("undecidable intersection at tolerance in tower walk")
        bad.append(("M1", i, _FAIL[code], nb))
    return out, bad
