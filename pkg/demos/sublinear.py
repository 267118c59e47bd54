"""Sublinear correction terms along random paths.

Anchor displacement, the log Lebesgue number of a fixed cover in the
moving flat metric, and the coding depth all grow slower than n.
"""
from rwentropy import get_preset, sublinear_terms
from rwentropy.diagnostics import trend

hs = [2 ** k for k in range(4, 11)]
terms = sublinear_terms(get_preset("random-ab").measure, hs, paths=5)
print("n        ", " ".join("%8d" % n for n in hs))
for key in ("anchor", "lebesgue", "depth"):
    slope = trend(hs, terms[key])[0]
    print("%-9s" % key, " ".join("%8.5f" % v for v in terms[key]), "  slope %.2f" % slope)
