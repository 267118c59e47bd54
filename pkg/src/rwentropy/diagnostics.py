"""Diagnostics along partition sequences: cell contraction and sublinear terms.

The sublinear quantities are averaged over paths at each horizon ``n``:

* ``anchor``: ``d_T(X_0, X_n) / n``, how far the anchor drifts from the base point;
* ``lebesgue``: ``-log delta_n / n`` with ``delta_n`` the Lebesgue number of the
  cover in the flat metric of fiber ``n``;
* ``depth``: ``c(n) / n``, the coding depth needed to refine the cover.

All three should tend to zero; :func:`trend` fits ``log value`` against
``log n`` and reports whether the fit is decreasing.
"""
import math

import numpy as np

from .cover import OpenCover
from .estimators import path_seed, safe_depth
from .partition import build_sequence, coding_diameter, exact_sequence
from .walk import SamplePath

__all__ = ["coding_decay", "coding_decay_ensemble", "sublinear_terms", "trend"]


def coding_decay(seq, n, ms):
    """Fitted exponential decay rate of depth-``m`` cell diameters at fiber ``n``.

    Returns ``(rate, diameters)``; the rate is minus the least-squares slope
    of ``log diameter`` against ``m``.
    """
    ms = list(ms)
    d = np.array([max(coding_diameter(seq, n, m)) for m in ms])
    rate = -np.polyfit(ms, np.log(d), 1)[0]
    return float(rate), d


def _sequence(measure, seed, lo, hi, C):
    path = SamplePath(measure, seed)
    if len(measure) == 1:
        return exact_sequence(path, lo, hi)
    return build_sequence(path, lo, hi, C=C)


def coding_decay_ensemble(measure, paths=20, m_max=256, m_min=16, step=4, seed=0, C=1.0):
    """Per-path decay rates at fiber 0 and a monotonicity flag for each path."""
    rates, mono = [], []
    ms = range(m_min, m_max + 1, step)
    for i in range(paths):
        seq = _sequence(measure, path_seed(seed, i), -m_max - 8, m_max + 8, C)
        r, d = coding_decay(seq, 0, ms)
        rates.append(r)
        # rounding slack: consecutive diameters can tie to the last bit
        mono.append(bool(np.all(d[1:] <= d[:-1] * (1 + 1e-9))))
    return rates, mono


def sublinear_terms(measure, hs, paths=10, seed=0, C=1.0, cover=None, pad=160):
    """Path means of the three sublinear quantities at each horizon in ``hs``."""
    cover = OpenCover.regular(3) if cover is None else cover
    out = {"n": list(hs), "anchor": [], "lebesgue": [], "depth": []}
    acc = {k: np.zeros(len(hs)) for k in ("anchor", "lebesgue", "depth")}
    for i in range(paths):
        seq = _sequence(measure, path_seed(seed, i), -pad, max(hs) + pad, C)
        for j, n in enumerate(hs):
            c, delta = safe_depth(cover, seq, n)
            acc["anchor"][j] += seq.anchors.distance_to_base(n) / n
            acc["lebesgue"][j] += -math.log(delta) / n
            acc["depth"][j] += c / n
    for k in acc:
        out[k] = (acc[k] / paths).tolist()
    return out


def trend(hs, values):
    """``(slope, decreasing, halved)`` for a log-log fit of ``values`` against ``hs``."""
    v = np.asarray(values, dtype=float)
    slope = float(np.polyfit(np.log(hs), np.log(np.maximum(v, 1e-300)), 1)[0])
    return slope, slope < 0, bool(v[-1] < 0.5 * v[0])
