"""Braid groups acting on integral multicurve coordinates of the punctured disk.

A multicurve on the ``n``-punctured disk is encoded by ``2n - 4`` integers
``(a_1, b_1, ..., a_{n-2}, b_{n-2})`` (Dynnikov coordinates). The braid
generators act by max-plus piecewise-linear maps. Generators are signed
integers: ``i`` is ``sigma_i`` and ``-i`` its inverse. Words act on the left,
so the last letter of a word acts first.
"""
import math

from .walk import Group

__all__ = ["BraidWord", "BraidGroup", "MulticurveCoord", "apply_generator",
           "apply_word", "curve_norm", "log_norm", "lyapunov_growth",
           "reference_curves", "free_reduce"]


def _p(x):
    return x if x > 0 else 0


def _n(x):
    return x if x < 0 else 0


def free_reduce(letters):
    out = []
    for g in letters:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


class BraidWord:
    """Word in the generators of the ``n``-strand braid group."""

    __slots__ = ("n", "letters")

    def __init__(self, n, letters=()):
        if n < 3:
            raise ValueError("need at least 3 punctures")
        letters = tuple(int(g) for g in letters)
        for g in letters:
            if g == 0 or abs(g) > n - 1:
                raise ValueError("generator index %d out of range 1..%d" % (g, n - 1))
        self.n = n
        self.letters = letters

    def reduced(self):
        return BraidWord(self.n, free_reduce(self.letters))

    def inverse(self):
        return BraidWord(self.n, [-g for g in reversed(self.letters)])

    def __mul__(self, other):
        if other.n != self.n:
            raise ValueError("strand counts differ")
        return BraidWord(self.n, self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, BraidWord) and self.n == other.n and \
            free_reduce(self.letters) == free_reduce(other.letters)

    def __hash__(self):
        return hash((self.n, free_reduce(self.letters)))

    def __repr__(self):
        return "BraidWord(%d, %r)" % (self.n, list(self.letters))


class BraidGroup(Group):
    """Braid group on ``n`` strands with freely reduced words as elements.

    Free reduction is a normal form for the free group on the generators,
    so equality here is finer than braid equality. That is enough for the
    walk engine, which only needs a group law and a hashable representation.
    """

    def __init__(self, n):
        self.n = n
        self.identity = BraidWord(n)

    def compose(self, g, h):
        return BraidWord(self.n, free_reduce(g.letters + h.letters))

    def invert(self, g):
        return g.inverse()

    def serialize(self, g):
        return " ".join(str(x) for x in g.letters)

    def generator(self, i):
        return BraidWord(self.n, [i])


class MulticurveCoord(tuple):
    """Tuple ``(a_1, b_1, ..., a_{n-2}, b_{n-2})`` of Python ints."""

    def __new__(cls, values):
        values = tuple(int(v) for v in values)
        if len(values) % 2 or len(values) < 2:
            raise ValueError("need 2n - 4 >= 2 coordinates")
        return super().__new__(cls, values)

    @property
    def n(self):
        return len(self) // 2 + 2

    @classmethod
    def from_ab(cls, a, b):
        out = []
        for x, y in zip(a, b):
            out += [x, y]
        return cls(out)

    def ab(self):
        return list(self[0::2]), list(self[1::2])

    def serialize(self):
        return "%d " % self.n + " ".join(str(v) for v in self)

    @classmethod
    def parse(cls, text):
        vals = [int(v) for v in text.split()]
        c = cls(vals[1:])
        if c.n != vals[0]:
            raise ValueError("puncture count mismatch")
        return c


def _act(a, b, i, sign):
    """In-place action of ``sigma_i^sign`` on coordinate lists ``a, b``."""
    m = len(a)          # n - 2
    if i == 1:
        a0, b0 = a[0], b[0]
        if sign > 0:
            bp = a0 + _p(b0)
            a[0], b[0] = -b0 + _p(bp), bp
        else:
            bp = -a0 + _p(b0)
            a[0], b[0] = b0 - _p(bp), bp
    elif i == m + 1:
        a0, b0 = a[m - 1], b[m - 1]
        if sign > 0:
            bp = a0 + _n(b0)
            a[m - 1], b[m - 1] = -b0 + _n(bp), bp
        else:
            bp = -a0 + _n(b0)
            a[m - 1], b[m - 1] = b0 - _n(bp), bp
    else:
        j = i - 2
        a0, b0, a1, b1 = a[j], b[j], a[j + 1], b[j + 1]
        if sign > 0:
            c = a0 - a1 - _p(b1) + _n(b0)
            a[j] = a0 - _p(b0) - _p(_p(b1) + c)
            b[j] = b1 + _n(c)
            a[j + 1] = a1 - _n(b1) + _p(c - _n(b0))
            b[j + 1] = b0 - _n(c)
        else:
            d = a0 - a1 + _p(b1) - _n(b0)
            a[j] = a0 + _p(b0) + _p(_p(b1) - d)
            b[j] = b1 - _p(d)
            a[j + 1] = a1 + _n(b1) + _n(_n(b0) + d)
            b[j + 1] = b0 + _p(d)


def apply_generator(c, i, sign):
    """Image of the multicurve ``c`` under ``sigma_i^sign``."""
    n = c.n
    if not 1 <= i <= n - 1:
        raise ValueError("generator index %d out of range 1..%d" % (i, n - 1))
    a, b = c.ab()
    _act(a, b, i, 1 if sign > 0 else -1)
    return MulticurveCoord.from_ab(a, b)


def apply_word(word, c):
    """Left action of a braid word (the last letter acts first)."""
    letters = word.letters if isinstance(word, BraidWord) else word
    a, b = c.ab()
    for g in reversed(letters):
        _act(a, b, abs(g), 1 if g > 0 else -1)
    return MulticurveCoord.from_ab(a, b)


def curve_norm(c):
    """``sum |a_i| + |b_i|``; zero exactly for the empty multicurve."""
    return sum(abs(v) for v in c)


def log_norm(x):
    """Natural log of a positive big integer without float overflow."""
    if x <= 0:
        raise ValueError("log of non-positive value")
    k = x.bit_length()
    if k < 1000:
        return math.log(x)
    sh = k - 64
    return math.log(x >> sh) + sh * math.log(2)


def lyapunov_growth(letters, c, horizon):
    """``(1/n) log curve_norm(w_n^{-1} c)`` for the walk ``w_n = g_1 ... g_n``.

    ``letters`` yields the signed generators ``g_1, g_2, ...``; the inverse
    word ``g_n^-1 ... g_1^-1`` is applied, so ``g_1^-1`` acts first.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    a, b = c.ab()
    it = iter(letters)
    for _ in range(horizon):
        g = next(it)
        _act(a, b, abs(g), -1 if g > 0 else 1)
    return log_norm(sum(abs(v) for v in a) + sum(abs(v) for v in b)) / horizon


def reference_curves(n):
    """Shipped reference multicurves for the ``n``-punctured disk.

    The first is the round curve around punctures 1 and 2, the second the
    one around punctures ``n - 1`` and ``n``.
    """
    m = n - 2
    first = MulticurveCoord.from_ab([0] * m, [1] + [0] * (m - 1)) if m > 1 else \
        MulticurveCoord([0, 1])
    last = MulticurveCoord.from_ab([0] * m, [0] * (m - 1) + [-1]) if m > 1 else \
        MulticurveCoord([0, -1])
    return [first, last]
