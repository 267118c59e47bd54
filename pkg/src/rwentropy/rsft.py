"""Random (nonautonomous) subshifts of finite type on a finite window.

Fiber ``n`` has alphabet ``{1, ..., k(n)}`` and the 0/1 matrix ``A(n)`` of
shape ``k(n) x k(n+1)`` says which letter may follow which. An
``(s, t)_n``-cylinder fixes the letters at fibers ``n+s, ..., n+t``.
Counting is done with Python integers, so counts are exact.
"""
from dataclasses import dataclass
import math

import numpy as np

__all__ = ["RandomSFT", "CylinderSpec", "count_cylinders", "enumerate_cylinders",
           "shift", "entropy_rate", "LimitExceeded", "WindowError"]


class LimitExceeded(ValueError):
    pass


class WindowError(IndexError):
    pass


@dataclass(frozen=True)
class CylinderSpec:
    """Letters ``y_s .. y_t`` (1-based) placed at fibers ``n+s .. n+t``."""
    n: int
    s: int
    t: int
    letters: tuple

    def __post_init__(self):
        if self.t < self.s:
            raise ValueError("span requires s <= t")
        if len(self.letters) != self.t - self.s + 1:
            raise ValueError("need t - s + 1 letters")


class RandomSFT:
    """Window ``[n_min, n_max]`` of alphabet sizes and transition matrices.

    Parameters
    ----------
    n_min : int
    ks : sequence of int
        ``k(n)`` for ``n = n_min .. n_min + len(ks) - 1``.
    matrices : sequence of array_like or None
        ``A(n)`` for ``n = n_min .. n_max - 1``. ``None`` stands for the
        identity (only allowed when ``k(n) = k(n+1)``).
    """

    def __init__(self, n_min, ks, matrices):
        self.n_min = int(n_min)
        self.ks = [int(k) for k in ks]
        if len(self.ks) < 1:
            raise ValueError("empty window")
        self.n_max = self.n_min + len(self.ks) - 1
        if len(matrices) != len(self.ks) - 1:
            raise ValueError("need one matrix per edge of the window")
        self.matrices = []
        for i, A in enumerate(matrices):
            if A is None:
                if self.ks[i] != self.ks[i + 1]:
                    raise ValueError("identity edge between different alphabet sizes")
                self.matrices.append(None)
                continue
            A = np.asarray(A, dtype=np.uint8)
            if A.shape != (self.ks[i], self.ks[i + 1]):
                raise ValueError("A(%d) has shape %r, expected %r"
                                 % (self.n_min + i, A.shape, (self.ks[i], self.ks[i + 1])))
            if A.max(initial=0) > 1:
                raise ValueError("A(%d) is not a 0/1 matrix" % (self.n_min + i))
            self.matrices.append(A)
        self._rows = {}

    # -- access -------------------------------------------------------------
    def k(self, n):
        self._check(n, n)
        return self.ks[n - self.n_min]

    def A(self, n):
        """Dense matrix ``A(n)`` (identity edges are materialized)."""
        self._check(n, n + 1)
        A = self.matrices[n - self.n_min]
        if A is None:
            return np.eye(self.ks[n - self.n_min], dtype=np.uint8)
        return A

    def _check(self, lo, hi):
        if lo < self.n_min or hi > self.n_max:
            raise WindowError("fibers [%d, %d] outside window [%d, %d]"
                              % (lo, hi, self.n_min, self.n_max))

    def _cols(self, n):
        """Per-column lists of rows with a 1 (cached)."""
        key = ("c", n)
        if key not in self._rows:
            A = self.matrices[n - self.n_min]
            self._rows[key] = _nonzero_lists(np.asarray(A).T)
        return self._rows[key]

    def _rws(self, n):
        key = ("r", n)
        if key not in self._rows:
            A = self.matrices[n - self.n_min]
            self._rows[key] = _nonzero_lists(np.asarray(A))
        return self._rows[key]

    def validate(self):
        """List of problems: letters with no successor or no predecessor."""
        out = []
        for i, A in enumerate(self.matrices):
            if A is None:
                continue
            n = self.n_min + i
            for r in np.flatnonzero(A.sum(axis=1) == 0):
                out.append("A(%d): row %d has no 1 (dead letter)" % (n, r + 1))
            for c in np.flatnonzero(A.sum(axis=0) == 0):
                out.append("A(%d): column %d has no 1 (unreachable letter)" % (n, c + 1))
        return out

    def admissible(self, spec):
        for i in range(spec.s, spec.t + 1):
            y = spec.letters[i - spec.s]
            if not 1 <= y <= self.k(spec.n + i):
                return False
        for i in range(spec.s, spec.t):
            y0 = spec.letters[i - spec.s] - 1
            y1 = spec.letters[i - spec.s + 1] - 1
            if self.A(spec.n + i)[y0, y1] != 1:
                return False
        return True

    # -- counting ----------------------------------------------------------
    def forward_counts(self, start, m_max):
        """``[N(0), ..., N(m_max)]`` where ``N(m)`` counts admissible words on
        fibers ``start .. start+m``."""
        self._check(start, start + m_max)
        r = [1] * self.ks[start - self.n_min]
        out = [len(r)]
        for f in range(start, start + m_max):
            A = self.matrices[f - self.n_min]
            if A is not None:
                cols = self._cols(f)
                r = [sum(r[i] for i in c) for c in cols]
            out.append(sum(r))
        return out

    # -- serialization -------------------------------------------------------
    def dumps(self):
        lines = ["RSFT v1"]
        for i, k in enumerate(self.ks):
            lines.append("%d %d" % (self.n_min + i, k))
        for i, A in enumerate(self.matrices):
            A = self.A(self.n_min + i)
            lines.append("%d %d %d" % (self.n_min + i, A.shape[0], A.shape[1]))
            lines.extend(" ".join(str(int(x)) for x in row) for row in A)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        it = iter(text.splitlines())
        if next(it).strip() != "RSFT v1":
            raise ValueError("missing RSFT v1 header")
        rest = list(it)
        ks, n_min = [], None
        pos = 0
        while pos < len(rest) and len(rest[pos].split()) == 2:
            n, k = map(int, rest[pos].split())
            if n_min is None:
                n_min = n
            if n != n_min + len(ks):
                raise ValueError("fiber lines out of order")
            ks.append(k)
            pos += 1
        mats = []
        while pos < len(rest):
            n, r, c = map(int, rest[pos].split())
            if n != n_min + len(mats):
                raise ValueError("edge blocks out of order")
            rows = [list(map(int, rest[pos + 1 + j].split())) for j in range(r)]
            mats.append(np.array(rows, dtype=np.uint8).reshape(r, c))
            pos += 1 + r
        return cls(n_min, ks, mats)

    def __eq__(self, other):
        if not isinstance(other, RandomSFT):
            return NotImplemented
        if (self.n_min, self.ks) != (other.n_min, other.ks):
            return False
        return all(np.array_equal(self.A(n), other.A(n))
                   for n in range(self.n_min, self.n_max))


def _nonzero_lists(A):
    """Column indices of the nonzero entries of each row of ``A``."""
    r, c = np.nonzero(A)
    cuts = np.searchsorted(r, np.arange(A.shape[0] + 1))
    c = c.tolist()
    return [c[cuts[i]:cuts[i + 1]] for i in range(A.shape[0])]


def count_cylinders(sft, n, s, t):
    """Number of nonempty ``(s, t)_n``-cylinders, exact."""
    if t < s:
        raise ValueError("span requires s <= t")
    return sft.forward_counts(n + s, t - s)[-1]


def enumerate_cylinders(sft, n, s, t, limit):
    """All admissible cylinders in lexicographic order."""
    total = count_cylinders(sft, n, s, t)
    if total > limit:
        raise LimitExceeded("limit exceeded: %d cylinders > %d" % (total, limit))
    base = n + s
    words = [(y,) for y in range(1, sft.k(base) + 1)]
    for f in range(base, n + t):
        A = sft.A(f)
        nxt = []
        for w in words:
            for y in np.flatnonzero(A[w[-1] - 1]):
                nxt.append(w + (int(y) + 1,))
        words = nxt
    return [CylinderSpec(n, s, t, w) for w in words]


def shift(sft, spec):
    """Re-base a cylinder: fiber ``n+1`` with span ``(s-1, t-1)``."""
    out = CylinderSpec(spec.n + 1, spec.s - 1, spec.t - 1, spec.letters)
    sft._check(out.n + out.s, out.n + out.t)
    return out


def entropy_rate(sft, n, K, m_max):
    """``[(m, log N(C_n(K, K+m)) / m) for m = 1..m_max]``."""
    counts = sft.forward_counts(n + K, m_max)
    return [(m, _log(counts[m]) / m) for m in range(1, m_max + 1)]


def _log(x):
    if x <= 0:
        return -math.inf
    k = x.bit_length()
    if k < 1000:
        return math.log(x)
    return math.log(x >> (k - 64)) + (k - 64) * math.log(2)
