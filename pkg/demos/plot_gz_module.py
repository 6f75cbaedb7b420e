"""
A Gelfand-Zeitlin module at a generic character
===============================================

Start from a generic point of the maximal spectrum, act by the generators of
the rational OGZ algebra of signature (1, 2), and tabulate the weights
reached within a few steps.
"""

import random

from galois_orders import build_cyclic_module, make_family, weight_report
from galois_orders.modules import report_csv
from galois_orders.sampling import generic_point

setting, gens = make_family({"family": "ogz", "r": [1, 2]})
seed = generic_point(setting, random.Random(3))
print("seed:", seed)

m = build_cyclic_module(setting, gens, seed, depth=3)
report = weight_report(m)
print(report["label"], "of dimension", report["dimension"])

# generic characters give one-dimensional weight spaces
print(sorted(set(m.weights.values())))
print(report_csv(m))

###############################################################################
# Matrices are sparse: entry [i, j] is the coefficient of basis j in
# (basis i).X for this right module.
for name, M in report["matrices"].items():
    print(name, M["nonzeros"], "nonzeros")
