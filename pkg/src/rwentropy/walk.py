"""Two-sided random walks on groups.

A group is anything implementing :class:`Group`. A walk is driven by a
finitely supported :class:`ProbabilityMeasure` with exact rational
weights. Increments are drawn from per-block substreams keyed by the seed
and the block index, so materializing a path in a different order never
changes it.

Index conventions: ``step(m) = inverse(w[m-1]) * w[m]`` for every integer
``m``. For ``m >= 1`` the step is the increment of the forward walk, for
``m <= 0`` the step is the inverse of the increment ``inverse(w[m]) * w[m-1]``
of the backward walk, which is drawn from the reflected measure.
"""
from fractions import Fraction
import json

import numpy as np

__all__ = ["Group", "ProbabilityMeasure", "SamplePath", "ShiftedPath",
           "cylinder_probability", "BLOCK"]

BLOCK = 1024


class Group:
    """Minimal interface a group needs for the walk engine."""

    identity = None

    def compose(self, g, h):
        raise NotImplementedError

    def invert(self, g):
        raise NotImplementedError

    def serialize(self, g):
        return str(g)

    def power_product(self, elements):
        out = self.identity
        for g in elements:
            out = self.compose(out, g)
        return out


class ProbabilityMeasure:
    """Finitely supported measure with exact rational weights.

    Parameters
    ----------
    group : Group
    support : list of (label, element, weight)
        ``weight`` is converted to :class:`fractions.Fraction`; all weights
        must be positive and sum to exactly one.
    inverse_labels : dict, optional
        Maps each label to the label of the inverse element. Defaults to
        appending or stripping a trailing ``"^-1"``.
    """

    def __init__(self, group, support, inverse_labels=None):
        if not support:
            raise ValueError("support: empty measure")
        labels, elements, weights = [], [], []
        for label, g, w in support:
            w = Fraction(w)
            if w <= 0:
                raise ValueError("support: weight of %r must be > 0" % (label,))
            labels.append(label)
            elements.append(g)
            weights.append(w)
        if sum(weights) != 1:
            raise ValueError("support: weights sum to %s, not 1" % sum(weights))
        if len(set(labels)) != len(labels):
            raise ValueError("support: repeated labels")
        self.group = group
        self.labels = labels
        self.elements = elements
        self.weights = weights
        if inverse_labels is None:
            inverse_labels = {l: _default_inverse_label(l) for l in labels}
        self.inverse_labels = dict(inverse_labels)
        den = 1
        for w in weights:
            den = den * w.denominator // _gcd(den, w.denominator)
        self.denominator = den
        self._cum = np.cumsum([int(w * den) for w in weights])

    def __len__(self):
        return len(self.labels)

    def weight_of(self, element):
        """Total weight of ``element`` (zero outside the support)."""
        total = Fraction(0)
        for g, w in zip(self.elements, self.weights):
            if g == element:
                total += w
        return total

    def reflected(self):
        """The measure ``g -> mu(g^-1)`` with labels replaced by inverse labels."""
        inv = self.group.invert
        support = [(self.inverse_labels[l], inv(g), w)
                   for l, g, w in zip(self.labels, self.elements, self.weights)]
        back = {self.inverse_labels[l]: l for l in self.labels}
        return ProbabilityMeasure(self.group, support, back)

    def draw(self, rng, size):
        """Indices into the support, sampled exactly from the rational weights."""
        if self.denominator < 2 ** 62:
            u = rng.integers(0, self.denominator, size=size, dtype=np.int64)
        else:
            u = np.array([int(rng.integers(0, 2 ** 62)) * self.denominator
                          // 2 ** 62 for _ in range(size)], dtype=object)
        return np.searchsorted(self._cum, u, side="right").astype(np.int64)

    def is_uniform(self):
        return len(set(self.weights)) == 1


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _default_inverse_label(label):
    s = str(label)
    return s[:-3] if s.endswith("^-1") else s + "^-1"


class SamplePath:
    """Lazily materialized two-sided sample path with ``w[0] = identity``.

    Parameters
    ----------
    measure : ProbabilityMeasure
    seed : int
        64-bit seed. Together with the block index it fully determines
        every increment.
    """

    def __init__(self, measure, seed):
        self.measure = measure
        self.group = measure.group
        self.seed = int(seed) & (2 ** 64 - 1)
        self._reflected = measure.reflected()
        self._blocks = {}
        self._pos = {0: self.group.identity}
        self._hi = 0
        self._lo = 0

    # -- increments -------------------------------------------------------
    def _block(self, side, b):
        key = (side, b)
        blk = self._blocks.get(key)
        if blk is None:
            ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(side, b))
            rng = np.random.default_rng(ss)
            m = self.measure if side == 0 else self._reflected
            blk = m.draw(rng, BLOCK)
            self._blocks[key] = blk
        return blk

    def step_index(self, m):
        """Support index of ``step(m) = inverse(w[m-1]) w[m]``.

        For ``m <= 0`` the backward increment at ``m - 1`` is drawn from the
        reflected measure; its inverse has the same support index in ``mu``.
        """
        if m >= 1:
            side, j = 0, m - 1
        else:
            side, j = 1, -m
        return int(self._block(side, j // BLOCK)[j % BLOCK])

    def step_indices(self, m0, m1):
        """Support indices of ``step(m)`` for ``m0 <= m < m1`` as an array."""
        out = np.empty(max(m1 - m0, 0), dtype=np.int64)
        i = 0
        m = m0
        while m < m1:
            if m >= 1:
                j = m - 1
                b, r = divmod(j, BLOCK)
                take = min(BLOCK - r, m1 - m)
                out[i:i + take] = self._block(0, b)[r:r + take]
            else:
                j = -m
                b, r = divmod(j, BLOCK)
                take = min(r + 1, m1 - m, 1 - m)
                out[i:i + take] = self._block(1, b)[r - take + 1:r + 1][::-1]
            i += take
            m += take
        return out

    def step(self, m):
        return self.measure.elements[self.step_index(m)]

    def step_label(self, m):
        return self.measure.labels[self.step_index(m)]

    def backward_increment(self, n):
        """``inverse(w[n+1]) w[n]`` for ``n <= -1``, an element of supp of the reflected measure."""
        if n > -1:
            raise ValueError("backward increments live at n <= -1")
        return self._reflected.elements[self.step_index(n + 1)]

    # -- positions ---------------------------------------------------------
    def extend(self, n_min, n_max):
        """Materialize positions on ``[n_min, n_max]`` and return ``self``."""
        if n_min > 0 or n_max < 0:
            raise ValueError("window must contain 0")
        G = self.group
        while self._hi < n_max:
            self._hi += 1
            self._pos[self._hi] = G.compose(self._pos[self._hi - 1], self.step(self._hi))
        while self._lo > n_min:
            self._lo -= 1
            self._pos[self._lo] = G.compose(self._pos[self._lo + 1],
                                            self.backward_increment(self._lo))
        return self

    @property
    def window(self):
        return (self._lo, self._hi)

    def position(self, n):
        if n > self._hi or n < self._lo:
            self.extend(min(n, self._lo), max(n, self._hi))
        return self._pos[n]

    def __getitem__(self, n):
        return self.position(n)

    def shift(self, k):
        return ShiftedPath(self, k)

    def dump_jsonl(self, fh, n_min, n_max):
        """Write one JSON record per index with the element's serialization."""
        for n in range(n_min, n_max + 1):
            rec = {"n": n, "element": self.group.serialize(self.position(n))}
            if n != 0:
                rec["step"] = str(self.step_label(n if n > 0 else n + 1))
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


class ShiftedPath:
    """Bernoulli shift view: ``(theta^k w)[n] = inverse(w[k]) w[n+k]``."""

    def __init__(self, path, k):
        if isinstance(path, ShiftedPath):
            k += path.k
            path = path.path
        self.path = path
        self.k = int(k)
        self.measure = path.measure
        self.group = path.group

    def position(self, n):
        G = self.group
        return G.compose(G.invert(self.path.position(self.k)),
                         self.path.position(n + self.k))

    __getitem__ = position

    def step_index(self, m):
        return self.path.step_index(m + self.k)

    def step(self, m):
        return self.path.step(m + self.k)

    def step_label(self, m):
        return self.path.step_label(m + self.k)

    def shift(self, k):
        return ShiftedPath(self, k)


def cylinder_probability(measure, word):
    """Exact probability that ``w[1..n]`` equals ``word``.

    The product over ``i`` of ``mu(inverse(x[i-1]) x[i])`` with
    ``x[0] = identity``; zero if some quotient is outside the support.
    """
    G = measure.group
    prev = G.identity
    p = Fraction(1)
    for x in word:
        w = measure.weight_of(G.compose(G.invert(prev), x))
        if w == 0:
            return Fraction(0)
        p *= w
        prev = x
    return p
