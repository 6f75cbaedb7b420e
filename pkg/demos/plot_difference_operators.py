"""
Difference operators and their symmetries
=========================================

Build the operator X_f on three variables, check that the symmetric group
fixes it, and watch it act on a symmetric polynomial.
"""

import random

from galois_orders import FamilyConfig, evaluate, skew_mul
from galois_orders.families import make_Xf
from galois_orders.sampling import random_ratfunc, random_skew
from galois_orders.skew import group_act_skew

# f(x) = x^2 on each coordinate, shifts mu_i: x_i -> x_i + 1
setting, gens = make_Xf(FamilyConfig("Xf", n=3, f_degree=2))
X = gens["Xf"]
print(X.to_text())

# every permutation of the variables fixes X
print(all(group_act_skew(g, X) == X for g in setting.group.elements()))

# X sends the elementary symmetric polynomial e_1 to a polynomial
vt = setting.vt
e1 = vt.x(1, 1) + vt.x(1, 2) + vt.x(1, 3)
print(evaluate(X, e1))

###############################################################################
# Evaluation turns products into composition: X(Y(a)) = (XY)(a).
rng = random.Random(0)
Y = random_skew(setting.ring, rng, 2, 2)
a = random_ratfunc(vt, rng, 2)
print(evaluate(X, evaluate(Y, a)) == evaluate(skew_mul(X, Y), a))
