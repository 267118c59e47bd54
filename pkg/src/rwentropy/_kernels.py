"""Compiled inner loops for float frames."""
import numpy as np
from numba import njit

OK, OUTSIDE, CROSSES, OVERSHOOT, UNDECIDABLE, RUNAWAY = 0, 1, 2, 3, 4, 5


@njit(cache=True)
def _sgn(r0, r1, rmax, v0, v1):
    if v0 == 0 and v1 == 0:
        return 0
    x = r0 * v0 + r1 * v1
    if abs(x) <= 1e-14 * (abs(v0) + abs(v1)) * rmax:
        return 2
    return 1 if x > 0 else -1


@njit(cache=True)
def walk_towers(F, src_cuts, src_rets, dcuts, dca, drets):
    """Tower walk of every source rectangle; see ``flat.tower_walk``.

    Returns flat arrays ``(src, j, cum0, cum1)`` of bands and
    ``(src, code, nbands)`` of failures.
    """
    a0, a1, b0, b1 = F[0, 0], F[0, 1], F[1, 0], F[1, 1]
    amax = max(abs(a0), abs(a1))
    bs, bj, bc0, bc1 = [0], [0], [0], [0]
    fs, fc, fn = [0], [0], [0]
    bs.pop(); bj.pop(); bc0.pop(); bc1.pop(); fs.pop(); fc.pop(); fn.pop()
    K = dca.shape[0] - 1
    for i in range(src_rets.shape[0]):
        c00, c01 = src_cuts[i, 0], src_cuts[i, 1]
        c10, c11 = src_cuts[i + 1, 0], src_cuts[i + 1, 1]
        t0, t1 = src_rets[i, 0], src_rets[i, 1]
        tb = b0 * t0 + b1 * t1
        u0, u1 = 0, 0
        nb = 0
        code = RUNAWAY
        for _ in range(1000000):
            x0 = a0 * (c00 - u0) + a1 * (c01 - u1)
            x1 = a0 * (c10 - u0) + a1 * (c11 - u1)
            j = np.searchsorted(dca, 0.5 * (x0 + x1), side="right") - 1
            if j < 0 or j >= K:
                code = OUTSIDE
                break
            s0 = _sgn(a0, a1, amax, c00 - u0 - dcuts[j, 0], c01 - u1 - dcuts[j, 1])
            s1 = _sgn(a0, a1, amax, dcuts[j + 1, 0] - c10 + u0, dcuts[j + 1, 1] - c11 + u1)
            if s0 == 2 or s1 == 2:
                code = UNDECIDABLE
                break
            if s0 < 0 or s1 < 0:
                code = CROSSES
                break
            bs.append(i); bj.append(j); bc0.append(u0); bc1.append(u1)
            nb += 1
            u0 += drets[j, 0]
            u1 += drets[j, 1]
            if u0 == t0 and u1 == t1:
                code = OK
                break
            if b0 * u0 + b1 * u1 > tb + 1e-9 * (1 + abs(tb)):
                code = OVERSHOOT
                break
        if code != OK:
            fs.append(i); fc.append(code); fn.append(nb)
    return (np.array(bs), np.array(bj), np.array(bc0), np.array(bc1),
            np.array(fs), np.array(fc), np.array(fn))


@njit(cache=True)
def first_in_range(pa, lo, hi, eps):
    """For each ``(lo[a], hi[a])`` the first index with ``pa`` in range, or -1."""
    out = np.full(lo.shape[0], -1, dtype=np.int64)
    for a in range(lo.shape[0]):
        for k in range(pa.shape[0]):
            if pa[k] >= lo[a] - eps and pa[k] <= hi[a] + eps:
                out[a] = k
                break
    return out


@njit(cache=True)
def box_points(B, Bi, U, a0, a1, b0, b1, cap):
    """Integer vectors ``U w`` whose frame image ``B w`` lies in the box.

    Returns an ``(m, 2)`` array, or a ``(1, 2)`` array holding ``(-1, count)``
    with ``count > cap`` when the box is too large.
    """
    wmin, wmax = np.inf, -np.inf
    for x in (a0, a1):
        for y in (b0, b1):
            w = Bi[0, 0] * x + Bi[0, 1] * y
            wmin = min(wmin, w)
            wmax = max(wmax, w)
    lo0 = int(np.floor(wmin))
    hi0 = int(np.ceil(wmax))
    n0 = hi0 - lo0 + 1
    los = np.empty(n0, dtype=np.int64)
    his = np.empty(n0, dtype=np.int64)
    total = 0
    for t in range(n0):
        w0 = lo0 + t
        lo1, hi1 = -np.inf, np.inf
        for r in range(2):
            c0 = a0 if r == 0 else b0
            c1 = a1 if r == 0 else b1
            base = B[r, 0] * w0
            k1 = B[r, 1]
            if abs(k1) < 1e-300:
                if base < c0 or base > c1:
                    lo1, hi1 = np.inf, -np.inf
                continue
            p = (c0 - base) / k1
            q = (c1 - base) / k1
            lo1 = max(lo1, min(p, q))
            hi1 = min(hi1, max(p, q))
        if hi1 < lo1:
            los[t], his[t] = 0, -1
            continue
        los[t] = int(np.ceil(lo1))
        his[t] = int(np.floor(hi1))
        if his[t] >= los[t]:
            total += his[t] - los[t] + 1
    if total > cap:
        out = np.empty((1, 2), dtype=np.int64)
        out[0, 0], out[0, 1] = -1, total
        return out
    out = np.empty((total, 2), dtype=np.int64)
    m = 0
    for t in range(n0):
        w0 = lo0 + t
        for w1 in range(los[t], his[t] + 1):
            out[m, 0] = U[0, 0] * w0 + U[0, 1] * w1
            out[m, 1] = U[1, 0] * w0 + U[1, 1] * w1
            m += 1
    return out


@njit(cache=True)
def _boxm(B, Bi, U, a0, a1, b0, b1):
    m = 1e-9 * (1 + max(abs(a0), abs(a1), abs(b0), abs(b1)))
    V = box_points(B, Bi, U, a0 - m, a1 + m, b0 - m, b1 + m, 5000000)
    if V.shape[0] == 1 and V[0, 0] == -1 and V[0, 1] > 5000000:
        return np.zeros((0, 2), dtype=np.int64)
    return V


@njit(cache=True)
def _first_beta(B, Bi, U, F, eps, a_lo, a_hi, lo_open, hi_open):
    Y = max(1.0, 4.0 / max(a_hi - a_lo, 1e-12))
    for _ in range(80):
        V = _boxm(B, Bi, U, a_lo, a_hi, 0.0, Y)
        best, bb = -1, np.inf
        for m in range(V.shape[0]):
            al = F[0, 0] * V[m, 0] + F[0, 1] * V[m, 1]
            be = F[1, 0] * V[m, 0] + F[1, 1] * V[m, 1]
            if be <= eps:
                continue
            if lo_open and al <= a_lo + eps:
                continue
            if not lo_open and al < a_lo - eps:
                continue
            if hi_open and al >= a_hi - eps:
                continue
            if not hi_open and al > a_hi + eps:
                continue
            if be < bb:
                best, bb = m, be
        if best >= 0:
            return V[best, 0], V[best, 1], 0
        Y = 2 * Y
    return 0, 0, 1


@njit(cache=True)
def basic_arcs_float(B, Bi, U, F, eps):
    """``(va, vb, vy, status)`` of the arc construction for a float frame.

    ``status`` is 0 on success, 1 if a search did not terminate and 2 on an
    undecidable comparison.
    """
    z = np.zeros(2, dtype=np.int64)
    r0, r1, e1 = _first_beta(B, Bi, U, F, eps, -1.0, 0.0, False, True)
    l0, l1, e2 = _first_beta(B, Bi, U, F, eps, 0.0, 1.0, True, False)
    if e1 or e2:
        return z, z, z, 1
    br = F[1, 0] * r0 + F[1, 1] * r1
    bl = F[1, 0] * l0 + F[1, 1] * l1
    y0, y1 = (r0, r1) if br >= bl else (l0, l1)
    Y = max(br, bl)
    V = _boxm(B, Bi, U, 0.0, 1.0, -Y, Y)
    ba, best = -np.inf, -1
    for m in range(V.shape[0]):
        al = F[0, 0] * V[m, 0] + F[0, 1] * V[m, 1]
        be = F[1, 0] * V[m, 0] + F[1, 1] * V[m, 1]
        if al > eps and al <= 1 + eps and abs(be) <= Y + eps and al > ba:
            ba, best = al, m
    if best < 0:
        return z, z, z, 1
    a0, a1 = V[best, 0], V[best, 1]
    A = F[0, 0] * a0 + F[0, 1] * a1
    amax = max(abs(F[0, 0]), abs(F[0, 1]))
    bmax = max(abs(F[1, 0]), abs(F[1, 1]))
    top = Y + max(1.0, 4.0 / A)
    for _ in range(80):
        V = _boxm(B, Bi, U, -A, A, Y, top)
        best, bb = -1, np.inf
        for m in range(V.shape[0]):
            v0, v1 = V[m, 0], V[m, 1]
            s = _sgn(F[1, 0], F[1, 1], bmax, v0 - y0, v1 - y1)
            t = _sgn(F[0, 0], F[0, 1], amax, a0 - v0, a1 - v1)
            w = _sgn(F[0, 0], F[0, 1], amax, a0 + v0, a1 + v1)
            if s == 2 or t == 2 or w == 2:
                return z, z, z, 2
            if s <= 0 or t < 0 or w < 0:
                continue
            be = F[1, 0] * v0 + F[1, 1] * v1
            if be < bb:
                best, bb = m, be
        if best >= 0:
            va = np.array([a0, a1])
            vb = np.array([V[best, 0], V[best, 1]])
            vy = np.array([y0, y1])
            return va, vb, vy, 0
        top = Y + 2 * (top - Y)
    return z, z, z, 1


@njit(cache=True)
def cross_float(B, Bi, U, F, eps, va0, va1, vb0, vb1):
    """Sorted cut vectors and per-cell return vectors of a cross partition.

    ``status`` is 0 on success and ``1 + a`` when cell ``a`` has no return.
    """
    A = F[0, 0] * va0 + F[0, 1] * va1
    Bv = F[1, 0] * vb0 + F[1, 1] * vb1
    V = _boxm(B, Bi, U, -A, A, -Bv, Bv)
    n = V.shape[0]
    C = np.empty((n + 2, 2), dtype=np.int64)
    m = 0
    for k in range(n):
        al = F[0, 0] * V[k, 0] + F[0, 1] * V[k, 1]
        be = F[1, 0] * V[k, 0] + F[1, 1] * V[k, 1]
        if abs(al) <= A + eps and be > -Bv + eps and be <= Bv + eps:
            C[m, 0], C[m, 1] = V[k, 0], V[k, 1]
            m += 1
    C[m, 0], C[m, 1] = va0, va1
    C[m + 1, 0], C[m + 1, 1] = -va0, -va1
    m += 2
    ca = F[0, 0] * C[:m, 0] + F[0, 1] * C[:m, 1]
    o = np.argsort(ca, kind="mergesort")
    cuts = np.empty((m, 2), dtype=np.int64)
    cal = np.empty(m)
    q = 0
    for k in range(m):
        v0, v1 = C[o[k], 0], C[o[k], 1]
        if q > 0 and cuts[q - 1, 0] == v0 and cuts[q - 1, 1] == v1:
            continue
        cuts[q, 0], cuts[q, 1] = v0, v1
        cal[q] = ca[o[k]]
        q += 1
    cuts = cuts[:q]
    cal = cal[:q]
    P = _boxm(B, Bi, U, -2 * A, 2 * A, 0.0, 2 * Bv)
    pa = F[0, 0] * P[:, 0] + F[0, 1] * P[:, 1]
    pb = F[1, 0] * P[:, 0] + F[1, 1] * P[:, 1]
    keep = np.flatnonzero(pb > eps)
    o2 = keep[np.argsort(pb[keep], kind="mergesort")]
    K = q - 1
    rets = np.zeros((K, 2), dtype=np.int64)
    for a in range(K):
        lo = cal[a + 1] - A - eps
        hi = cal[a] + A + eps
        found = False
        for k in o2:
            if pa[k] >= lo and pa[k] <= hi:
                rets[a, 0], rets[a, 1] = P[k, 0], P[k, 1]
                found = True
                break
        if not found:
            return cuts, cal, rets, 1 + a
    return cuts, cal, rets, 0
