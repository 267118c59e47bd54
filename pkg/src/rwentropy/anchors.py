"""Per-fiber geometry along a sample path of the torus walk.

For each fiber ``n`` the limit directions ``u_n`` (of ``F_+(theta^n w)``) and
``s_n`` (of ``F_-(theta^n w)``) are unit vectors obtained from the stable
recursions ``u_{n-1} ~ g_n u_n`` and ``s_n ~ g_n^{-1} s_{n-1}``, where
``g_n = inverse(w[n-1]) w[n]``. Positions on the fiber geodesics are kept in
one global coordinate: ``T(w_n z)`` for ``z`` on ``Gamma(theta^n w)``. The
global position of the foot point of ``i`` on fiber ``n`` is ``O[n]``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .torus import NotConverged

__all__ = ["step_matrices", "FiberGeometry", "fiber_geometry", "AnchorSequence",
           "select_anchors", "geodesic_point", "frame_matrix"]


def step_matrices(path, m0, m1):
    """Integer arrays ``(m1 - m0, 2, 2)`` of steps ``g_m`` for ``m0 <= m < m1``."""
    els = path.measure.elements
    mats = np.array([[[g.a, g.b], [g.c, g.d]] for g in els], dtype=np.int64)
    return mats[path.step_indices(m0, m1)]


@dataclass
class FiberGeometry:
    """Limit directions and positions on the window ``[n0, n1]``."""
    n0: int
    n1: int
    u: np.ndarray          # (N, 2) unit vectors
    s: np.ndarray
    O: np.ndarray          # global position of the foot point of i
    dist: np.ndarray       # d_T(i, Gamma_n)
    steps: np.ndarray      # g_m for m in [n0 + 1, n1]
    error: float

    def idx(self, n):
        if n < self.n0 or n > self.n1:
            raise IndexError("fiber %d outside [%d, %d]" % (n, self.n0, self.n1))
        return n - self.n0

    def step(self, m):
        return self.steps[m - self.n0 - 1]


def _normalize(v):
    return v / math.hypot(v[0], v[1])


def fiber_geometry(path, n0, n1, pad=96, tol=1e-10, max_pad=1536):
    """Compute :class:`FiberGeometry` for fibers ``n0 <= 0 <= n1``.

    The recursions are started ``pad`` steps outside the window from two
    different vectors; the angle between the two runs bounds the error.
    The pad is doubled (up to ``max_pad``) until the error is below ``tol``.
    """
    if not n0 <= 0 <= n1:
        raise ValueError("window must contain 0")
    G = step_matrices(path, n0 - pad + 1, n1 + pad + 1)      # g_m, m in [n0-pad+1, n1+pad]
    off = n0 - pad + 1

    def g(m):
        return G[m - off]

    N = n1 - n0 + 1
    # backward recursion for u from n1 + pad
    runs = []
    for start in ((1.0, 0.3), (-0.2, 1.0)):
        v = np.array(start)
        for m in range(n1 + pad, n1, -1):
            v = _normalize(g(m) @ v)
        u = np.empty((N, 2))
        u[-1] = v
        for n in range(n1 - 1, n0 - 1, -1):
            v = _normalize(g(n + 1) @ v)
            u[n - n0] = v
        runs.append(u)
    err_u = float(np.max(np.abs(runs[0][:, 0] * runs[1][:, 1] - runs[0][:, 1] * runs[1][:, 0])))
    u = runs[0]
    runs = []
    for start in ((1.0, 0.3), (-0.2, 1.0)):
        v = np.array(start)
        for m in range(n0 - pad + 1, n0 + 1):
            gi = g(m)
            inv = np.array([[gi[1, 1], -gi[0, 1]], [-gi[1, 0], gi[0, 0]]])
            v = _normalize(inv @ v)
        s = np.empty((N, 2))
        s[0] = v
        for n in range(n0 + 1, n1 + 1):
            gi = g(n)
            inv = np.array([[gi[1, 1], -gi[0, 1]], [-gi[1, 0], gi[0, 0]]])
            v = _normalize(inv @ v)
            s[n - n0] = v
        runs.append(s)
    err_s = float(np.max(np.abs(runs[0][:, 0] * runs[1][:, 1] - runs[0][:, 1] * runs[1][:, 0])))
    s = runs[0]
    err = max(err_u, err_s)
    if err > tol:
        if 2 * pad <= max_pad:
            return fiber_geometry(path, n0, n1, 2 * pad, tol, max_pad)
        raise NotConverged("limits not converged: angular error %.3g > %.3g" % (err, tol))
    # position increments c_n = 1/2 log(|g_n u_n| |g_n^-1 s_{n-1}|)
    O = np.zeros(N)
    steps = G[n0 - off + 1:n1 - off + 1]
    for n in range(n0 + 1, n1 + 1):
        gn = g(n)
        inv = np.array([[gn[1, 1], -gn[0, 1]], [-gn[1, 0], gn[0, 0]]])
        gu = gn @ u[n - n0]
        gs = inv @ s[n - 1 - n0]
        c = 0.5 * math.log(math.hypot(gu[0], gu[1]) * math.hypot(gs[0], gs[1]))
        O[n - n0] = O[n - 1 - n0] + c
    O -= O[-n0]
    dist = np.array([_dist_i(u[k], s[k]) for k in range(N)])
    return FiberGeometry(n0, n1, u, s, O, dist, steps, err)


def _dist_i(u, s):
    """``d_T`` from ``i`` to the geodesic joining the boundary points of ``u`` and ``s``."""
    det = u[0] * s[1] - u[1] * s[0]
    # w = M^-1 i with M = [[u0, s0], [u1, s1]] (orientation fixed by sign(det))
    w = (s[1] * 1j - s[0]) / (-u[1] * 1j + u[0])
    if det < 0:
        w = w.conjugate()
    return 0.5 * math.asinh(abs(w.real) / abs(w.imag))


def geodesic_point(u, s, t):
    """Point of ``Gamma(u, s)`` at local position ``t`` (the foot of ``i`` is ``t = 0``)."""
    det = u[0] * s[1] - u[1] * s[0]
    sg = 1.0 if det > 0 else -1.0
    rho = math.exp(2 * t)
    return complex(s[0] + 1j * sg * rho * u[0]) / complex(s[1] + 1j * sg * rho * u[1])


def frame_matrix(u, s, t):
    """Frame at local position ``t``: rows ``alpha`` and ``beta`` on Z^2."""
    det = u[0] * s[1] - u[1] * s[0]
    k = 1.0 / math.sqrt(abs(det))
    ea, eb = math.exp(-t) * k, math.exp(t) * k
    # alpha(v) = ea det(v, s), beta(v) = eb det(u, v)
    return np.array([[ea * s[1], -ea * s[0]], [-eb * u[1], eb * u[0]]])


@dataclass
class AnchorSequence:
    """Records ``(X'_n, X''_n, eps(n), X_n)`` as global positions on the window.

    ``Tp[n]`` is the position of ``w_n X'_n``, ``Tpp[n]`` of ``w_n X''_n`` and
    ``T[n]`` of ``w_n X_n`` on ``Gamma(w)``; all of them lie on that geodesic.
    ``eps[n]`` is the good-time indicator used for the partitions.
    """
    geom: FiberGeometry
    member_plus: np.ndarray
    member_minus: np.ndarray
    Tp: np.ndarray
    Tpp: np.ndarray
    eps: np.ndarray
    T: np.ndarray
    record: np.ndarray
    C: float = 0.0
    log: list = field(default_factory=list)

    @property
    def n0(self):
        return self.geom.n0

    @property
    def n1(self):
        return self.geom.n1

    def good_times(self):
        return [int(n) for n in np.flatnonzero(self.eps) + self.geom.n0]

    def local(self, n, which="X"):
        """The anchor as a point of the upper half-plane in fiber ``n``."""
        k = self.geom.idx(n)
        T = {"X'": self.Tp, "X''": self.Tpp, "X": self.T}[which][k]
        return geodesic_point(self.geom.u[k], self.geom.s[k], T - self.geom.O[k])

    def frame(self, n):
        k = self.geom.idx(n)
        return frame_matrix(self.geom.u[k], self.geom.s[k], self.T[k] - self.geom.O[k])

    def distance_to_base(self, n):
        """``d_T(X_0, X_n)`` computed in fiber ``n``, with ``X_0 = i``."""
        from .torus import teich_distance
        return float(teich_distance(1j, self.local(n)))


def select_anchors(geom, member=None, C=None, nest=None):
    """Anchor selection with record times.

    Parameters
    ----------
    geom : FiberGeometry
    member : callable or None
        ``member(geom, k) -> (bit_plus, bit_minus)``. Defaults to the distance
        condition ``d_T(i, Gamma_n) <= C`` for both bits.
    C : float
        Distance bound for the default membership test.
    nest : callable or None
        ``nest(last_good, n) -> bool``; a record time becomes good only if
        this holds. Used by the partition builder to keep the horizontal
        arcs nested; ``None`` accepts every record.
    """
    N = geom.n1 - geom.n0 + 1
    if member is None:
        if C is None:
            raise ValueError("need a membership test or a distance bound C")
        bits = geom.dist <= C
        mp, mm = bits.copy(), bits.copy()
    else:
        mp = np.zeros(N, dtype=bool)
        mm = np.zeros(N, dtype=bool)
        for k in range(N):
            mp[k], mm[k] = member(geom, k)
    both = mp & mm
    Tp = geom.O.copy()
    Tpp = np.empty(N)
    eps = np.zeros(N, dtype=bool)
    rec = np.zeros(N, dtype=bool)
    T = np.empty(N)
    z = -geom.n0
    log = []
    # fiber 0
    Tpp[z] = Tp[z] if both[z] else 0.0
    if not both[z]:
        log.append("fiber 0 is not a member; X''_0 set to X'_0")
        Tpp[z] = Tp[z]
    eps[z] = rec[z] = True
    T[z] = Tpp[z]
    for side in (1, -1):
        best = abs(Tpp[z])
        last = 0
        n = side
        while geom.n0 <= n <= geom.n1:
            k = n - geom.n0
            prev = k - side
            Tpp[k] = Tp[k] if both[k] else Tpp[prev]
            val = Tpp[k] * side
            is_rec = val > 0 and abs(Tpp[k]) > best
            if abs(Tpp[k]) == best and val > 0:
                log.append("tie at fiber %d resolved to eps = 0" % n)
            rec[k] = is_rec
            good = is_rec and (nest is None or nest(last, n))
            if is_rec and not good:
                log.append("record at fiber %d rejected: arcs not nested" % n)
            best = max(best, abs(Tpp[k]))
            eps[k] = good
            T[k] = Tpp[k] if good else T[prev]
            if good:
                last = n
            n += side
    return AnchorSequence(geom, mp, mm, Tp, Tpp, eps, T, rec,
                          C=float(geom.dist.max()) if C is None else float(C), log=log)
