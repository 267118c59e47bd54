"""Equality report for the uniform walk on A, B and their inverses.

A small ensemble keeps this quick; the full check uses 200 paths at
horizon 10^4 (``rwentropy verify --config demos/configs/random-ab.json``).
"""
import json

from rwentropy import equality_report, get_preset

p = get_preset("random-ab")
rep, reports = equality_report("torus", p.measure, paths=20, horizon=1024, seed=0,
                               non_elementary=p.non_elementary)
for name, r in reports.items():
    print("%-14s" % name, " ".join("%7.4f" % e for e in r.estimates), " se %.4f" % r.se)
print("horizons      ", reports["drift"].horizons)
print(json.dumps(rep["pairs"], indent=1))
print("pass:", rep["pass"])
