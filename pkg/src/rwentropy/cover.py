"""Open covers of the torus by metric balls.

Points of the torus are ``R^2 / Z^2`` in lattice coordinates. A ball is
taken in the square flat metric (the base point ``i``); other flat metrics
are given by a frame matrix ``F``, with ``d_F(x, y) = min |F (x - y - l)|``
over lattice vectors ``l``. All set computations run on a uniform grid.
"""
from dataclasses import dataclass
import math

import numpy as np

__all__ = ["OpenCover", "lebesgue_number", "min_subcover", "join_sets",
           "join_count", "fiber_frame", "coding_depth", "CoverError"]


class CoverError(ValueError):
    pass


def _wrap(d):
    return d - np.round(d)


@dataclass
class OpenCover:
    """Balls ``(center, radius)`` in the square metric; radii below 1/2."""
    balls: list

    def __post_init__(self):
        self.balls = [((float(c[0]) % 1.0, float(c[1]) % 1.0), float(r)) for c, r in self.balls]
        for c, r in self.balls:
            if not 0 < r < 0.5:
                raise CoverError("ball radius %r outside (0, 1/2)" % r)

    def __len__(self):
        return len(self.balls)

    @staticmethod
    def grid(n):
        t = (np.arange(n) + 0.5) / n
        X, Y = np.meshgrid(t, t, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def membership(self, pts):
        """Boolean ``(len(pts), len(self))`` matrix of open-ball membership."""
        pts = np.asarray(pts, dtype=float)
        out = np.empty((len(pts), len(self)), dtype=bool)
        for b, (c, r) in enumerate(self.balls):
            d = _wrap(pts - np.array(c))
            out[:, b] = np.hypot(d[:, 0], d[:, 1]) < r
        return out

    def validate(self, n=256):
        """Raise ``CoverError`` if a grid point lies in no ball."""
        pts = self.grid(n)
        miss = ~self.membership(pts).any(axis=1)
        if miss.any():
            raise CoverError("not a cover: grid point %r lies in no ball" % (tuple(pts[miss][0]),))
        return True

    @classmethod
    def regular(cls, k, radius=None):
        """``k x k`` balls on a square grid, radius just past the half-diagonal."""
        r = radius if radius is not None else 0.75 / k
        return cls([(((i + 0.5) / k, (j + 0.5) / k), r) for i in range(k) for j in range(k)])


def _systole(F):
    F = np.asarray(F, dtype=float)
    best = np.inf
    for a in range(-3, 4):
        for b in range(-3, 4):
            if a or b:
                best = min(best, float(np.hypot(*(F @ (a, b)))))
    return best


def _frame_grid(F, n):
    """Grid on a reduced fundamental domain of the lattice in frame ``F``.

    Returns lattice-coordinate points and the covering radius of the grid
    in the metric of ``F``.
    """
    from .flat import gauss_reduce
    b1, b2, U = gauss_reduce(F[:, 0], F[:, 1])
    t = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(t, t, indexing="ij")
    W = np.stack([S.ravel(), T.ravel()], axis=1)
    pts = (W @ np.asarray(U, dtype=float).T) % 1.0
    rad = 0.5 * (np.hypot(*b1) + np.hypot(*b2)) / n
    return pts, rad


def _dist_to_ellipse(p, E, samples, newton=6):
    """Distance from frame points ``p`` to the curve ``E(theta) = E @ (cos, sin)``."""
    th = 2 * np.pi * np.arange(samples) / samples
    curve = np.stack([np.cos(th), np.sin(th)], axis=1) @ E.T
    d2 = ((p[:, None, :] - curve[None, :, :]) ** 2).sum(axis=2)
    t = th[np.argmin(d2, axis=1)]
    h = np.pi / samples
    for _ in range(newton):
        u = np.stack([np.cos(t), np.sin(t)], axis=1)
        du = np.stack([-np.sin(t), np.cos(t)], axis=1)
        q = p - u @ E.T
        Edu = du @ E.T
        Eu = u @ E.T
        g1 = -(q * Edu).sum(axis=1)
        g2 = (Edu ** 2).sum(axis=1) + (q * Eu).sum(axis=1)
        step = np.where(g2 > 0, g1 / np.where(g2 > 0, g2, 1.0), 0.0)
        t = t - np.clip(step, -h, h)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    exact = np.sqrt(((p - u @ E.T) ** 2).sum(axis=1))
    return np.minimum(exact, np.sqrt(d2.min(axis=1)))


def lebesgue_number(cover, F=None, n=96, samples=128):
    """Lebesgue number of ``cover`` for the flat metric of frame ``F``.

    Returns ``(delta, err)``: the grid value and the covering radius of the
    grid, so the true number lies in ``[delta - err, delta]`` up to the
    (Newton-refined) boundary distance error. Every ball of radius below
    the true number, and below half the systole, sits inside some element.
    """
    F = np.eye(2) if F is None else np.asarray(F, dtype=float)
    cover.validate()
    pts, rad = _frame_grid(F, n)
    best = np.zeros(len(pts))
    mem = cover.membership(pts)
    if not mem.any(axis=1).all():
        raise CoverError("not a cover: a grid point lies in no ball")
    for b, (c, r) in enumerate(cover.balls):
        idx = np.flatnonzero(mem[:, b])
        if not len(idx):
            continue
        p = _wrap(pts[idx] - np.array(c)) @ F.T          # lift next to the center
        for s in range(0, len(idx), 4096):
            sl = idx[s:s + 4096]
            best[sl] = np.maximum(best[sl], _dist_to_ellipse(p[s:s + 4096], r * F, samples))
    delta = min(float(best.min()), 0.5 * _systole(F))
    return delta, rad


def min_subcover(sets, exact_limit=12):
    """Least number of the given point sets covering their union.

    ``sets`` is a boolean ``(m, npts)`` array. Empty and dominated sets are
    dropped first. Returns ``(count, exact)``: an exact branch-and-bound
    minimum when at most ``exact_limit`` sets remain, else a greedy count
    (an upper bound, ``exact = False``).
    """
    S = np.asarray(sets, dtype=bool)
    S = S[S.any(axis=1)]
    if not len(S):
        return 0, True
    S = np.unique(S, axis=0)
    keep = []
    for i in range(len(S)):
        dom = False
        for j in range(len(S)):
            if i != j and np.all(S[j] >= S[i]) and (S[j].sum() > S[i].sum()):
                dom = True
                break
        if not dom:
            keep.append(i)
    S = S[keep]
    universe = S.any(axis=0)
    if len(S) > exact_limit:
        return _greedy(S, universe), False
    return _branch_and_bound(S, universe), True


def _greedy(S, universe):
    left = universe.copy()
    n = 0
    while left.any():
        gain = (S & left).sum(axis=1)
        i = int(np.argmax(gain))
        left &= ~S[i]
        n += 1
    return n


def _branch_and_bound(S, universe):
    best = [_greedy(S, universe)]
    cols = np.flatnonzero(universe)
    S = S[:, cols]

    def rec(left, used):
        if used >= best[0]:
            return
        if not left.any():
            best[0] = used
            return
        # branch on the uncovered point with the fewest covering sets
        cnt = S[:, left].sum(axis=0)
        p = np.flatnonzero(left)[int(np.argmin(cnt))]
        # lower bound: at least ceil(|left| / max gain)
        gain = (S & left).sum(axis=1)
        if used + math.ceil(left.sum() / gain.max()) >= best[0]:
            return
        for i in np.flatnonzero(S[:, p])[np.argsort(-gain[S[:, p]])]:
            rec(left & ~S[i], used + 1)

    rec(np.ones(len(cols), dtype=bool), 0)
    return best[0]


def join_sets(cover, maps, n=64):
    """Nonempty elements of the join of ``cover`` pulled back by ``maps``.

    ``maps`` are 2x2 integer matrices ``P_k``; an element is the set of grid
    points ``x`` with ``P_k x`` in ball ``i_k`` for every ``k``. Returns a
    boolean ``(m, n*n)`` array and the index tuples.
    """
    pts = OpenCover.grid(n)
    mems = [cover.membership((pts @ np.asarray(P, dtype=float).T) % 1.0) for P in maps]
    out, labels = [], []

    def rec(k, cur, lab):
        if k == len(mems):
            out.append(cur)
            labels.append(tuple(lab))
            return
        for b in range(len(cover)):
            nxt = cur & mems[k][:, b]
            if nxt.any():
                rec(k + 1, nxt, lab + [b])

    rec(0, np.ones(len(pts), dtype=bool), [])
    return np.array(out).reshape(len(out), len(pts)), labels


def join_count(cover, maps, n=64, exact_limit=12):
    """``N`` of the join (see :func:`join_sets` and :func:`min_subcover`)."""
    S, _ = join_sets(cover, maps, n)
    return min_subcover(S, exact_limit)


def fiber_frame(seq, n):
    """Float frame of fiber ``n`` on its own lattice (the flat metric at ``X_n``)."""
    from .partition import int_matrix_product, inverse_int
    j = seq.owner(n)
    F = np.asarray(seq.parts[j].frame.Ff, dtype=float)
    step = seq.geom.step
    if n >= j:
        M = int_matrix_product([step(x) for x in range(j + 1, n + 1)])
    else:
        M = inverse_int(int_matrix_product([step(x) for x in range(n + 1, j + 1)]))
    return F @ np.array(M, dtype=float)


def coding_depth(seq, n, delta, m_max=None):
    """Least depth ``m`` whose cells at fiber ``n`` have diameter below ``delta``.

    The diameter of a cell is at most the hypotenuse of its largest sides;
    this is a sufficient condition for the cells to refine a cover with
    Lebesgue number ``delta``.
    """
    from .partition import coding_diameter
    lim = min(n - seq.n0, seq.n1 - n)
    if m_max is not None:
        lim = min(lim, m_max)
    for m in range(lim + 1):
        w, h = coding_diameter(seq, n, m)
        if math.hypot(w, h) < delta:
            return m
    raise CoverError("cover too fine: depth exceeds the materialized window at fiber %d" % n)

