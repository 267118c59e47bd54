"""Drift, Lyapunov exponent and partition entropy of the golden automorphism.

All three equal log((3 + sqrt 5) / 2), the log of the larger eigenvalue.
"""
import math

from rwentropy import (estimate_drift, estimate_entropy_sigma, estimate_lyapunov,
                       exact_sequence, get_preset, transition_matrices)
from rwentropy.walk import SamplePath

g = get_preset("golden")
target = math.log((3 + math.sqrt(5)) / 2)

drift = estimate_drift("torus", g.measure, paths=1, horizon=200)
lyap = estimate_lyapunov("torus", g.measure, (1, 0), paths=1, horizon=200)
seq = exact_sequence(SamplePath(g.measure, 0), -64, 104)
print("rectangles per fiber:", seq.k(0))
ent = estimate_entropy_sigma(transition_matrices(seq, 0, 40), m_max=40)

for name, rep in (("drift", drift), ("lyapunov", lyap), ("entropy", ent)):
    print("%-9s %.9f  (Q(n)/n %.6f)" % (name, rep.estimate, rep.literal[-1]))
print("target    %.9f" % target)
