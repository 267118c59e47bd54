"""Torus model: SL(2, Z) acting on slopes and on the upper half-plane.

The Teichmueller space of flat unit-area tori is the upper half-plane with
``d_T = d_hyp / 2``. A matrix ``[[a, b], [c, d]]`` acts on curves
``(p, q)`` by matrix-vector product and on points by ``(a z + b)/(c z + d)``.
A direction ``(p, q)`` corresponds to the boundary point ``p / q``; with
this convention the flat length ``|p - q z| / sqrt(Im z)`` of the curve
``(p, q)`` is invariant under the simultaneous action.
"""
from fractions import Fraction
from math import gcd
import math

import mpmath

from .quadratic import QuadraticNumber, quadratic_roots
from .walk import Group

__all__ = ["MCGElement", "SL2Z", "act_on_curve", "intersection_number",
           "mobius_act", "teich_distance", "ProjDirection", "TeichGeodesic",
           "geodesic_of", "closest_point_projection", "boundary_limit",
           "NotConverged", "eigendirections", "flat_length", "curve_norm",
           "geodesic_position", "distance_to_geodesic", "PRECISION"]

PRECISION = 40     # decimal digits for high-precision points (> 128-bit)


class NotConverged(RuntimeError):
    """Raised when a boundary limit estimate fails its tolerance."""


class MCGElement:
    """Integer matrix ``[[a, b], [c, d]]`` with ``ad - bc = 1``.

    Equality and hashing use the canonical sign (first nonzero entry
    positive), so ``g`` and ``-g`` are the same mapping class. Products keep
    the raw signs, which the flat-geometry code relies on.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, check=True):
        self.a, self.b, self.c, self.d = int(a), int(b), int(c), int(d)
        if check and self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant of %r is not 1" % (self.entries(),))

    @classmethod
    def from_rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, o):
        return MCGElement(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                          self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
                          check=False)

    def inverse(self):
        return MCGElement(self.d, -self.b, -self.c, self.a, check=False)

    def canonical(self):
        e = self.entries()
        for x in e:
            if x:
                return e if x > 0 else tuple(-y for y in e)
        raise ValueError("zero matrix")

    def __eq__(self, o):
        return isinstance(o, MCGElement) and self.canonical() == o.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def trace(self):
        return self.a + self.d

    def frobenius_sq(self):
        return self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2

    def __repr__(self):
        return "MCGElement([[%d, %d], [%d, %d]])" % self.entries()

    def serialize(self):
        return "%d %d %d %d" % self.canonical()

    @classmethod
    def parse(cls, text):
        return cls(*[int(x) for x in text.split()])


class SL2Z(Group):
    """The mapping class group of the torus as a :class:`Group`."""

    identity = MCGElement(1, 0, 0, 1)

    def compose(self, g, h):
        return g * h

    def invert(self, g):
        return g.inverse()

    def serialize(self, g):
        return g.serialize()


def act_on_curve(g, c):
    """Matrix-vector product ``g (p, q)``."""
    p, q = c
    return (g.a * p + g.b * q, g.c * p + g.d * q)


def intersection_number(c1, c2):
    """Geometric intersection number ``|p1 q2 - p2 q1|`` of torus curves."""
    return abs(c1[0] * c2[1] - c1[1] * c2[0])


def curve_norm(c):
    """Euclidean length of ``(p, q)``, the flat length at ``z = i``."""
    return math.hypot(c[0], c[1]) if max(abs(c[0]), abs(c[1])) < 2 ** 500 else \
        math.exp(0.5 * math.log(c[0] * c[0] + c[1] * c[1]))


def _mpc(z):
    return mpmath.mpc(z)


def mobius_act(g, z):
    """``(a z + b) / (c z + d)`` in high precision."""
    with mpmath.workdps(PRECISION):
        z = _mpc(z)
        return (g.a * z + g.b) / (g.c * z + g.d)


def teich_distance(z1, z2):
    """Teichmueller distance ``d_hyp / 2`` between two upper half-plane points."""
    with mpmath.workdps(PRECISION):
        z1, z2 = _mpc(z1), _mpc(z2)
        if z1.imag <= 0 or z2.imag <= 0:
            raise ValueError("points must lie in the upper half-plane")
        arg = 1 + abs(z1 - z2) ** 2 / (2 * z1.imag * z2.imag)
        return mpmath.acosh(arg) / 2


def flat_length(z, c):
    """Length ``|p - q z| / sqrt(Im z)`` of curve ``c`` in the unit-area torus ``z``."""
    with mpmath.workdps(PRECISION):
        z = _mpc(z)
        return abs(c[0] - c[1] * z) / mpmath.sqrt(z.imag)


class ProjDirection:
    """A direction in RP^1 given by a vector ``(x, y)``.

    ``x`` and ``y`` are floats, mpf values or QuadraticNumbers. The
    associated boundary point of the upper half-plane is ``x / y`` (or
    infinity when ``y = 0``). ``error`` is an angular error bound.
    """

    __slots__ = ("x", "y", "error")

    def __init__(self, x, y, error=0.0):
        if x == 0 and y == 0:
            raise ValueError("zero vector is not a direction")
        self.x, self.y, self.error = x, y, error

    @property
    def exact(self):
        return isinstance(self.x, (QuadraticNumber, int, Fraction)) and \
            isinstance(self.y, (QuadraticNumber, int, Fraction))

    def boundary_point(self):
        if self.y == 0:
            return mpmath.inf
        if self.exact:
            return self.x / self.y if isinstance(self.x, QuadraticNumber) or \
                isinstance(self.y, QuadraticNumber) else Fraction(self.x) / self.y
        with mpmath.workdps(PRECISION):
            return mpmath.mpf(self.x) / mpmath.mpf(self.y)

    def angle(self):
        """Angle in ``[0, pi)``."""
        t = math.atan2(float(self.y), float(self.x))
        return t % math.pi

    def unit(self):
        """Unit float vector ``(x, y)`` with the stored orientation."""
        x, y = float(self.x), float(self.y)
        r = math.hypot(x, y)
        return (x / r, y / r)

    def gap(self, other):
        """Angle between two directions in RP^1, in ``[0, pi/2]``."""
        d = abs(self.angle() - other.angle()) % math.pi
        return min(d, math.pi - d)

    def act(self, g):
        return ProjDirection(g.a * self.x + g.b * self.y, g.c * self.x + g.d * self.y,
                             self.error)

    def serialize(self):
        if self.exact and self.y != 0:
            r = self.boundary_point()
            if isinstance(r, QuadraticNumber):
                return r.serialize()
        return "%.17g %.17g +- %.3g" % (float(self.x), float(self.y), self.error)

    def __repr__(self):
        return "ProjDirection(%s)" % self.serialize()


class TeichGeodesic:
    """Geodesic of the upper half-plane with two distinct boundary endpoints."""

    def __init__(self, e1, e2):
        with mpmath.workdps(PRECISION):
            e1 = _bpt(e1)
            e2 = _bpt(e2)
            if e1 == e2:
                raise ValueError("degenerate foliation pair")
        self.e1, self.e2 = e1, e2

    def endpoints(self):
        return {self.e1, self.e2}

    def __eq__(self, other):
        return isinstance(other, TeichGeodesic) and self.endpoints() == other.endpoints()

    def __hash__(self):
        return hash(frozenset((str(self.e1), str(self.e2))))

    def contains(self, z, tol=1e-25):
        z = _mpc(z)
        return distance_to_geodesic(z, self) < tol

    def act(self, g):
        return TeichGeodesic(_act_boundary(g, self.e1), _act_boundary(g, self.e2))


def _bpt(e):
    if isinstance(e, QuadraticNumber):
        return (mpmath.mpf(e.p.numerator) / e.p.denominator
                + mpmath.mpf(e.q.numerator) / e.q.denominator * mpmath.sqrt(e.D))
    if isinstance(e, Fraction):
        return mpmath.mpf(e.numerator) / e.denominator
    if e in (math.inf, -math.inf) or (isinstance(e, mpmath.mpf) and mpmath.isinf(e)):
        return mpmath.inf
    return mpmath.mpf(e)


def _act_boundary(g, e):
    with mpmath.workdps(PRECISION):
        if mpmath.isinf(e):
            return mpmath.inf if g.c == 0 else mpmath.mpf(g.a) / g.c
        den = g.c * e + g.d
        if den == 0:
            return mpmath.inf
        return (g.a * e + g.b) / den


def geodesic_of(f_plus, f_minus):
    """Geodesic joining the boundary points of two transverse directions."""
    with mpmath.workdps(PRECISION):
        e1 = _bpt(f_plus.boundary_point())
        e2 = _bpt(f_minus.boundary_point())
        if e1 == e2 or (not mpmath.isinf(e1) and not mpmath.isinf(e2)
                        and abs(e1 - e2) < mpmath.mpf(10) ** (-PRECISION + 5)):
            raise ValueError("degenerate foliation pair")
        return TeichGeodesic(e1, e2)


def _normalizer(gamma):
    """Return a function sending ``gamma`` to the imaginary axis, e1 -> inf, e2 -> 0."""
    x1, x2 = gamma.e1, gamma.e2
    if mpmath.isinf(x1):
        return lambda z: z - x2
    if mpmath.isinf(x2):
        return lambda z: 1 / (x1 - z)
    return lambda z: (z - x2) / (x1 - z)


def geodesic_position(z, gamma):
    """Signed ``d_T`` coordinate of the projection of ``z`` onto ``gamma``.

    Increases toward ``gamma.e1``. The zero point is fixed by the normalizer
    (for finite endpoints, the point where ``|z - e2| = |z - e1|`` on gamma).
    """
    with mpmath.workdps(PRECISION):
        w = _normalizer(gamma)(_mpc(z))
        return mpmath.log(abs(w)) / 2


def distance_to_geodesic(z, gamma):
    """``d_T`` from ``z`` to the geodesic ``gamma``."""
    with mpmath.workdps(PRECISION):
        w = _normalizer(gamma)(_mpc(z))
        # distance from w to the imaginary axis: sinh d_hyp = |Re w| / Im w
        return mpmath.asinh(abs(w.real) / abs(w.imag)) / 2


def closest_point_projection(z, gamma):
    """Hyperbolic foot point of ``z`` on ``gamma``."""
    with mpmath.workdps(PRECISION):
        z = _mpc(z)
        x1, x2 = gamma.e1, gamma.e2
        h = _normalizer(gamma)(z)
        r = abs(h)
        if mpmath.isinf(x1):
            return mpmath.mpc(x2, r)
        if mpmath.isinf(x2):
            # h(z) = 1/(x1 - z) = i r  =>  z = x1 - 1/(i r) = x1 + i/r
            return mpmath.mpc(x1, 1 / r)
        # h(z) = (z - x2)/(x1 - z) = w  =>  z = (x2 + w x1)/(1 + w); h reverses
        # orientation when x1 < x2, and then sends gamma to the lower half axis
        w = mpmath.mpc(0, r if h.imag > 0 else -r)
        return (x2 + w * x1) / (1 + w)


def eigendirections(g):
    """Exact expanding and contracting eigendirections of a hyperbolic ``g``.

    Returns ``(expanding, contracting, eigenvalue)`` where the directions are
    :class:`ProjDirection` with QuadraticNumber coordinates ``(r, 1)`` (or
    ``(1, 0)``) and ``eigenvalue`` is the QuadraticNumber of modulus > 1.
    """
    t = g.trace()
    if abs(t) <= 2:
        raise ValueError("matrix is not hyperbolic (|trace| <= 2)")
    lam1, lam2 = quadratic_roots(1, -t, 1)
    big = lam1 if abs(lam1) > abs(lam2) else lam2
    small = lam2 if big is lam1 else lam1
    out = []
    for lam in (big, small):
        # (a - lam) x + b y = 0
        if g.b != 0:
            out.append(ProjDirection(QuadraticNumber(g.b, 0, lam.D) * 1, lam - g.a))
        else:
            out.append(ProjDirection(lam - g.d, QuadraticNumber(g.c, 0, lam.D)))
    # rescale to slope form (r, 1) when possible
    res = []
    for d in out:
        if d.y != 0:
            res.append(ProjDirection(d.x / d.y, QuadraticNumber(1, 0, big.D)))
        else:
            res.append(ProjDirection(QuadraticNumber(1, 0, big.D), QuadraticNumber(0, 0, big.D)))
    return res[0], res[1], big


def _column_direction(g):
    """Dominant column of ``g`` as a float direction (by Euclidean norm)."""
    n1 = g.a * g.a + g.c * g.c
    n2 = g.b * g.b + g.d * g.d
    x, y = (g.a, g.c) if n1 >= n2 else (g.b, g.d)
    return _big_unit(x, y)


def _big_unit(x, y):
    s = max(abs(x), abs(y)).bit_length()
    sh = max(s - 60, 0)
    fx, fy = float(x >> sh if x >= 0 else -((-x) >> sh)), float(y >> sh if y >= 0 else -((-y) >> sh))
    r = math.hypot(fx, fy)
    return fx / r, fy / r


def _big_float(x):
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _gap(u, v):
    c = abs(u[0] * v[1] - u[1] * v[0])
    return math.asin(min(1.0, c))


def boundary_limit(path, side, n, tol):
    """Estimate ``F_+(w) = lim w_n X`` (side ``+1``) or ``F_-`` (side ``-1``).

    The estimate is the dominant column direction of ``w_n`` (or ``w_-n``),
    and the error bound is the angle between the estimates at horizons
    ``n // 2`` and ``n``. Raises :class:`NotConverged` if that exceeds ``tol``.
    """
    if n < 2:
        raise ValueError("horizon must be >= 2")
    s = 1 if side in (1, "+") else -1
    g_half = path.position(s * (n // 2))
    g_full = path.position(s * n)
    u_half = _column_direction(g_half)
    u_full = _column_direction(g_full)
    # the dominant column is only determined up to the singular value ratio
    spread = 2.0 / max(_big_float(g_full.frobenius_sq()), 1.0)
    err = _gap(u_half, u_full) + spread
    if err > tol:
        raise NotConverged("not converged: angular gap %.3g > tol %.3g at horizon %d"
                           % (err, tol, n))
    if u_full[1] < 0 or (u_full[1] == 0 and u_full[0] < 0):
        u_full = (-u_full[0], -u_full[1])
    return ProjDirection(u_full[0], u_full[1], error=err)
