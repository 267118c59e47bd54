"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Elements are stored as ``p + q*sqrt(D)`` with rational ``p`` and ``q``.
Comparisons are exact, which lets the deterministic presets check
partition identities without any floating point tolerance.
"""
from fractions import Fraction
from math import isqrt
import math

__all__ = ["QuadraticNumber", "quadratic_roots"]


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected int or Fraction, got %r" % type(x).__name__)


class QuadraticNumber:
    """Number ``p + q*sqrt(D)`` with ``p, q`` rational and ``D`` squarefree > 1."""

    __slots__ = ("p", "q", "D")

    def __init__(self, p, q=0, D=5):
        D = int(D)
        if D < 2 or isqrt(D) ** 2 == D:
            raise ValueError("D must be a positive non-square, got %d" % D)
        self.p = _frac(p)
        self.q = _frac(q)
        self.D = D

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.D != self.D:
                raise ValueError("mixing fields Q(sqrt %d) and Q(sqrt %d)"
                                 % (self.D, other.D))
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.D)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.p + o.p, self.q + o.q, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.p, -self.q, self.D)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.p - o.p, self.q - o.q, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.p * o.p + self.q * o.q * self.D,
                               self.p * o.q + self.q * o.p, self.D)

    __rmul__ = __mul__

    def conjugate(self):
        """Galois conjugate ``p - q*sqrt(D)``."""
        return QuadraticNumber(self.p, -self.q, self.D)

    def norm(self):
        """Field norm ``p^2 - D q^2`` (a rational)."""
        return self.p * self.p - self.D * self.q * self.q

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt %d)" % self.D)
        c = self * o.conjugate()
        return QuadraticNumber(c.p / n, c.q / n, self.D)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QuadraticNumber(1, 0, self.D) / (self ** (-k))
        out = QuadraticNumber(1, 0, self.D)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order ------------------------------------------------------------
    def sign(self):
        """Exact sign in {-1, 0, 1} of the real embedding with sqrt(D) > 0."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with D q^2
        d = self.p * self.p - self.D * self.q * self.q
        return sp if d > 0 else (-sp if d < 0 else 0)

    def _cmp(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        c = self._cmp(other)
        return c is not NotImplemented and c == 0

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        return self._cmp(other) < 0

    def __le__(self, other):
        if isinstance(other, float):
            return float(self) <= other
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if isinstance(other, float):
            return float(self) > other
        return self._cmp(other) > 0

    def __ge__(self, other):
        if isinstance(other, float):
            return float(self) >= other
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.D))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.sign() != 0

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.D)

    def __floor__(self):
        f = math.floor(float(self))
        # correct the float guess exactly
        while self < f:
            f -= 1
        while self >= f + 1:
            f += 1
        return f

    def to_mpf(self):
        """Value as an mpmath float at the current working precision."""
        import mpmath
        return (mpmath.mpf(self.p.numerator) / self.p.denominator
                + mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.D))

    def log(self):
        """Natural logarithm as a float (argument must be positive)."""
        if self.sign() <= 0:
            raise ValueError("log of a non-positive number")
        return math.log(float(self))

    def __repr__(self):
        return "QuadraticNumber(%s, %s, D=%d)" % (self.p, self.q, self.D)

    def serialize(self):
        """Return ``"quad D p q r"`` meaning ``(p + q*sqrt(D)) / r`` in lowest terms."""
        r = math.lcm(self.p.denominator, self.q.denominator)
        return "quad %d %d %d %d" % (self.D, self.p * r, self.q * r, r)

    @classmethod
    def parse(cls, text):
        tag, D, p, q, r = text.split()
        if tag != "quad":
            raise ValueError("not a quadratic serialization: %r" % text)
        r = int(r)
        return cls(Fraction(int(p), r), Fraction(int(q), r), int(D))


def quadratic_roots(a, b, c):
    """Exact real roots of ``a x^2 + b x + c`` with integer coefficients.

    Returns the pair ``(larger, smaller)`` as QuadraticNumbers. The
    discriminant must be positive and not a perfect square.
    """
    disc = b * b - 4 * a * c
    if disc <= 0:
        raise ValueError("no distinct real roots")
    # pull square factors out of the discriminant
    D, k = disc, 1
    f = 2
    while f * f <= D:
        while D % (f * f) == 0:
            D //= f * f
            k *= f
        f += 1
    if D == 1:
        raise ValueError("rational roots; discriminant is a square")
    r1 = QuadraticNumber(Fraction(-b, 2 * a), Fraction(k, 2 * a), D)
    r2 = QuadraticNumber(Fraction(-b, 2 * a), Fraction(-k, 2 * a), D)
    return (r1, r2) if r1 > r2 else (r2, r1)
