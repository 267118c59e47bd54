"""Shipped generator sets and measures."""
from fractions import Fraction

from .braid import BraidGroup, BraidWord, reference_curves
from .torus import SL2Z, MCGElement
from .walk import ProbabilityMeasure

__all__ = ["PRESETS", "Preset", "get_preset", "torus_measure", "braid_measure",
           "TORUS_CURVES", "braid_curves"]

A = MCGElement(2, 1, 1, 1)
B = MCGElement(3, 2, 1, 1)
T = MCGElement(1, 1, 0, 1)

# primitive starting curves for the torus Lyapunov estimator
TORUS_CURVES = [(1, 0), (0, 1), (1, 1), (2, 1), (1, -2)]


class Preset:
    """A named measure with its model and the non-elementary assertion."""

    def __init__(self, name, model, measure, non_elementary, deterministic=False,
                 description=""):
        self.name = name
        self.model = model
        self.measure = measure
        self.non_elementary = non_elementary
        self.deterministic = deterministic
        self.description = description


def torus_measure(pairs):
    """``pairs``: list of ``(label, MCGElement, weight)``."""
    return ProbabilityMeasure(SL2Z(), pairs)


def braid_measure(n, pairs):
    """``pairs``: list of ``(letters, weight)`` with signed generator letters."""
    G = BraidGroup(n)
    sup = []
    for letters, w in pairs:
        label = " ".join(str(x) for x in letters)
        sup.append((label, BraidWord(n, letters), w))
    inv = {" ".join(str(x) for x in letters):
           " ".join(str(-x) for x in reversed(letters)) for letters, _ in pairs}
    return ProbabilityMeasure(G, sup, inverse_labels=inv)


def _build():
    q = Fraction(1, 4)
    out = {}
    out["golden"] = Preset(
        "golden", "torus", torus_measure([("A", A, 1)]), True, deterministic=True,
        description="the single hyperbolic matrix [[2,1],[1,1]]")
    out["random-ab"] = Preset(
        "random-ab", "torus",
        torus_measure([("A", A, q), ("A^-1", A.inverse(), q), ("B", B, q), ("B^-1", B.inverse(), q)]),
        True, description="uniform on A, B = [[3,2],[1,1]] and their inverses")
    out["random-skew"] = Preset(
        "random-skew", "torus",
        torus_measure([("A", A, Fraction(1, 2)), ("B", B, q), ("B^-1", B.inverse(), q)]),
        True, description="A with weight 1/2, B and B^-1 with weight 1/4")
    out["parabolic"] = Preset(
        "parabolic", "torus",
        torus_measure([("T", T, Fraction(1, 2)), ("T^-1", T.inverse(), Fraction(1, 2))]),
        False, description="uniform on T = [[1,1],[0,1]] and T^-1 (elementary control)")
    out["braid-pa"] = Preset(
        "braid-pa", "braid", braid_measure(3, [((1, -2), 1)]), True, deterministic=True,
        description="sigma_1 sigma_2^-1 on the 3-punctured disk")
    out["braid-random"] = Preset(
        "braid-random", "braid",
        braid_measure(3, [((1,), q), ((-1,), q), ((2,), q), ((-2,), q)]), True,
        description="uniform on sigma_1^{+-1}, sigma_2^{+-1}")
    return out


PRESETS = _build()


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError("unknown preset %r (known: %s)" % (name, ", ".join(sorted(PRESETS))))


def braid_curves(n):
    return reference_curves(n)
