"""Symbolic coding of torus points by a partition sequence.

A word assigns a rectangle to each fiber of a span. Its cell at fiber ``n``
is a sub-rectangle of the fiber-``n`` rectangle: forward symbols cut out a
horizontal strip and backward symbols a vertical strip. Points are kept in
the integer coordinates of their fiber (the torus is ``R^2 / Z^2``);
``transport`` moves them between fibers along the walk.

Cells shrink exponentially with the word length, so cell and point
arithmetic runs in mpmath at a precision chosen from the span of positions
involved. Scale factors between fibers are read off the frames themselves,
which keeps them exact for quadratic frames.
"""
import math

import mpmath
import numpy as np

from .partition import int_matrix_product, inverse_int, _apply_all
from .quadratic import QuadraticNumber

__all__ = ["transport", "decode_cell", "decode_point", "itinerary",
           "sample_word", "commuting_check", "Cell"]


class Cell:
    """Depth cell at fiber ``n``: rectangle ``b`` of the owner partition,
    ``alpha`` in ``x`` (absolute, owner frame) and ``beta`` in ``y``
    (measured from the base of the rectangle). Bounds are mpf."""

    __slots__ = ("n", "b", "x", "y")

    def __init__(self, n, b, x, y):
        self.n, self.b, self.x, self.y = n, b, x, y

    @property
    def width(self):
        return self.x[1] - self.x[0]

    @property
    def height(self):
        return self.y[1] - self.y[0]

    def __repr__(self):
        return "Cell(n=%d, b=%d, x=(%s, %s), y=(%s, %s))" % (
            self.n, self.b, mpmath.nstr(self.x[0], 8), mpmath.nstr(self.x[1], 8),
            mpmath.nstr(self.y[0], 8), mpmath.nstr(self.y[1], 8))


def _mp(x):
    if isinstance(x, QuadraticNumber):
        return x.to_mpf()
    return mpmath.mpf(x)


def _alpha(frame, v):
    return _mp(frame.alpha((int(v[0]), int(v[1]))))


def _beta(frame, v):
    return _mp(frame.beta((int(v[0]), int(v[1]))))


def _M(seq, a, b):
    """``g_{a+1} ... g_b`` for ``a <= b``: fiber ``b`` vectors to fiber ``a``."""
    return int_matrix_product([seq.geom.step(x) for x in range(a + 1, b + 1)])


def precision_for(seq, lo, hi):
    """Decimal digits that resolve depth cells on fibers ``lo..hi``."""
    T = seq.anchors.T
    span = float(T[hi - seq.n0] - T[lo - seq.n0])
    return 30 + int(span / math.log(10)) * 2


def transport(seq, x, a, b):
    """Lattice coordinates in fiber ``b`` of the fiber-``a`` point ``x`` (mpf pair)."""
    M = inverse_int(_M(seq, a, b)) if a <= b else _M(seq, b, a)
    x0, x1 = _mp(x[0]), _mp(x[1])
    return (M[0][0] * x0 + M[0][1] * x1, M[1][0] * x0 + M[1][1] * x1)


def _scale(seq, e):
    """``exp(-(T_k - T_j))`` for the nontrivial edge ``e = (j, k)``, from the frames."""
    j, k = e
    fj, fk = seq.parts[j].frame, seq.parts[k].frame
    M = _M(seq, j, k)
    # alpha_j(M v) = exp(T_k - T_j) alpha_k(v)
    best = None
    for v in ((1, 0), (0, 1)):
        w = (M[0][0] * v[0] + M[0][1] * v[1], M[1][0] * v[0] + M[1][1] * v[1])
        num, den = fk.alpha(v), fj.alpha(w)
        if best is None or abs(float(den)) > abs(float(best[1])):
            best = (num, den)
    num, den = best
    if isinstance(num, QuadraticNumber):
        return (num / den).to_mpf()
    return _mp(num) / _mp(den)


def _band(seq, f, src, dst):
    e = seq.edge(f)
    tr = seq.trans[e]
    sel = np.flatnonzero((tr.src == src) & (tr.dst == dst))
    if len(sel) == 0:
        raise ValueError("inadmissible word at fiber %d: %d -> %d" % (f, src, dst))
    return e, tuple(int(c) for c in tr.cum[sel[0]])


def decode_cell(seq, n, word, lo):
    """Cell at fiber ``n`` of ``word`` (symbols on fibers ``lo, lo+1, ...``).

    Call inside an mpmath precision context (see :func:`precision_for`).
    """
    hi = lo + len(word) - 1
    if not lo <= n <= hi:
        raise IndexError("fiber %d outside the word span %d..%d" % (n, lo, hi))
    sym = lambda f: int(word[f - lo])
    # vertical extent from the forward symbols
    P = seq.partition(hi)
    y = (mpmath.mpf(0), _beta(P.frame, P.rets[sym(hi)]))
    for f in range(hi - 1, n - 1, -1):
        if seq.edge(f) is None:
            continue
        e, cum = _band(seq, f, sym(f), sym(f + 1))
        dst = seq.parts[e[1]]
        d = _scale(seq, e)
        off = _beta(dst.frame, cum)
        y = (d * (off + y[0]), d * (off + y[1]))
    # horizontal extent from the backward symbols
    P = seq.partition(lo)
    b = sym(lo)
    x = (mpmath.mpf(0), _alpha(P.frame, P.cuts[b + 1]) - _alpha(P.frame, P.cuts[b]))
    for f in range(lo, n):
        if seq.edge(f) is None:
            continue
        e, cum = _band(seq, f, sym(f), sym(f + 1))
        dst = seq.parts[e[1]]
        c0 = _apply_all(inverse_int(_M(seq, *e)), seq.parts[e[0]].cuts[sym(f):sym(f) + 1])[0]
        xoff = _alpha(dst.frame, (int(c0[0]) - cum[0], int(c0[1]) - cum[1])) \
            - _alpha(dst.frame, dst.cuts[sym(f + 1)])
        d = _scale(seq, e)
        x = (xoff + d * x[0], xoff + d * x[1])
    P = seq.partition(n)
    b = sym(n)
    x0 = _alpha(P.frame, P.cuts[b])
    return Cell(n, b, (x0 + x[0], x0 + x[1]), y)


def _frame_inverse(frame):
    F = frame.F
    a, b, c, d = (_mp(F[0][0]), _mp(F[0][1]), _mp(F[1][0]), _mp(F[1][1]))
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def decode_point(seq, n, word, lo):
    """Center of the cell of ``word`` at fiber ``n``, in fiber-``n`` lattice coordinates."""
    c = decode_cell(seq, n, word, lo)
    px, py = (c.x[0] + c.x[1]) / 2, (c.y[0] + c.y[1]) / 2
    j = seq.owner(n)
    Fi = _frame_inverse(seq.parts[j].frame)
    z = (Fi[0][0] * px + Fi[0][1] * py, Fi[1][0] * px + Fi[1][1] * py)
    return transport(seq, z, j, n)


def itinerary(seq, x, n, lo, hi):
    """Rectangle labels of the fiber-``n`` point ``x`` on fibers ``lo..hi``.

    A label is ``-1`` where the point is on no rectangle (a boundary, up to
    rounding).
    """
    out = []
    for f in range(lo, hi + 1):
        j = seq.owner(f)
        y = transport(seq, x, n, j)
        y = np.array([float(y[0] - mpmath.floor(y[0])), float(y[1] - mpmath.floor(y[1]))])
        P = seq.parts[j]
        p = np.asarray(P.frame.Ff) @ y
        out.append(P.contains_point(p)[0])
    return out


def sample_word(seq, lo, hi, rng):
    """A uniformly stepped admissible word on fibers ``lo..hi``."""
    w = [int(rng.integers(seq.k(lo)))]
    for f in range(lo, hi):
        A = seq.matrix(f)
        if A is None:
            w.append(w[-1])
        else:
            nxt = np.flatnonzero(A[w[-1]])
            w.append(int(nxt[rng.integers(len(nxt))]))
    return w


def commuting_check(seq, n, m, word, lo):
    """Decode at fiber 0, move to fiber ``n``, and compare with the shifted decoding.

    ``word`` must cover fibers ``-m .. n+m`` (``lo = -m``). Returns
    ``(ok, labels)``: ``ok`` says that the transported point carries the
    word's labels on fibers ``n-m .. n+m`` (it lies in the depth-``m`` cell
    of the shifted word) and so does the point decoded directly at ``n``.
    """
    with mpmath.workdps(precision_for(seq, lo, lo + len(word) - 1)):
        x0 = decode_point(seq, 0, word, lo)
        xn = transport(seq, x0, 0, n)
        want = list(word[n - m - lo:n + m - lo + 1])
        got = itinerary(seq, xn, n, n - m, n + m)
        direct = decode_point(seq, n, want, n - m)
        got2 = itinerary(seq, direct, n, n - m, n + m)
    return got == want and got2 == want, got
