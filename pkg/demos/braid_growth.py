"""Curve growth under the braid sigma_1 sigma_2^-1 and under a random braid walk."""
import math

from rwentropy import estimate_lyapunov, get_preset
from rwentropy.presets import braid_curves

pa = get_preset("braid-pa")
for c in braid_curves(3):
    rep = estimate_lyapunov("braid", pa.measure, c, paths=1, horizon=4096)
    print("pA   curve %-10s %.6f" % (tuple(c), rep.estimate))
print("log dilatation  %.6f" % math.log((3 + math.sqrt(5)) / 2))

walk = get_preset("braid-random")
for c in braid_curves(3):
    rep = estimate_lyapunov("braid", walk.measure, c, paths=40, horizon=1024)
    print("walk curve %-10s %.4f +- %.4f" % (tuple(c), rep.estimate, rep.se))
