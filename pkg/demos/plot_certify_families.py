"""
Certifying Galois orders
========================

Rational and quantum orthogonal Gelfand-Zeitlin algebras, checked to be
principal (resp. co-principal) Galois orders by clearing denominators with
the (q-)Vandermonde.
"""

from galois_orders import certify_coprincipal, certify_principal, make_family
from galois_orders.certify import replay_certificate

setting, gens = make_family({"family": "ogz", "r": [2, 2]})
for name, X in gens.items():
    print(name, "=", X.to_text())

cert = certify_principal(setting, gens, samples=10)
print(cert.kind, cert.verdict)
print("clearing polynomial:", cert.evidence["d_sgn"])

# certificates are plain JSON and can be re-checked from scratch
print(replay_certificate(cert.to_json(), setting, gens))

###############################################################################
# Dropping the negative generators of row 1 (the parabolic case) shrinks
# the monoid to a cone; the check still goes through.
setting, gens = make_family({"family": "ogz", "r": [1, 2, 3], "J": [2]})
print(list(gens), certify_principal(setting, gens, samples=5).verdict)

###############################################################################
# The quantum family is co-principal: its dagger images clear.
setting, gens = make_family({"family": "qogz", "r": [1, 2]})
cert = certify_coprincipal(setting, gens, samples=5)
print(cert.kind, cert.verdict)
