"""End-to-end property suites at small sizes, used by ``galois-orders selftest``."""

from __future__ import annotations

import random
import time
from typing import Callable

from .certify import Setting, certify_coprincipal, certify_principal, check_galois_ring, clears
from .families import make_family
from .modules import build_cyclic_module, char_key, group_act_point
from .sampling import generic_point, random_invariant, random_skew
from .skew import SkewElement, evaluate, skew_mul
from .symmetry import GroupSpec, SGN, d_sgn, divide_by_relative_invariant, is_relative_invariant

__all__ = ["SUITES", "run_selftest"]


def _composition(rng: random.Random, bad: bool) -> str:
    for cfg in ({"family": "Xf", "n": 2}, {"family": "ogz", "r": [1, 2]}, {"family": "qogz", "r": [1, 1]}):
        setting, _ = make_family(cfg)
        ring = setting.ring
        for _ in range(5):
            X = random_skew(ring, rng, 2, 2)
            Y = random_skew(ring, rng, 2, 2)
            a = random_invariant(setting.group, rng, 2, 2)
            if evaluate(X, evaluate(Y, a)) != evaluate(skew_mul(X, Y), a):
                raise AssertionError(f"X(Y(a)) != (XY)(a) in {setting.name}")
    return "15 triples"


def _round_trip(rng: random.Random, bad: bool) -> str:
    for cfg in ({"family": "ogz", "r": [2, 3]}, {"family": "qogz", "r": [2, 3]}):
        setting, _ = make_family(cfg)
        d = d_sgn(setting.group)
        for _ in range(5):
            s = random_invariant(setting.group, rng, 2, 2)
            if divide_by_relative_invariant(setting.group, s * d, d) != s:
                raise AssertionError("relative-invariant round trip failed")
    return "10 samples"


def _certification(rng: random.Random, bad: bool) -> str:
    runs = [
        ({"family": "Xf", "n": 2}, certify_principal),
        ({"family": "ogz", "r": [2, 2]}, certify_principal),
        ({"family": "finiteW", "pi": [1, 1]}, certify_principal),
        ({"family": "qogz", "r": [1, 1]}, certify_coprincipal),
    ]
    for cfg, fn in runs:
        setting, gens = make_family(cfg)
        if bad and cfg["family"] == "ogz":
            gens = {name: _shift_on_left(X) for name, X in gens.items()}
        cert = fn(setting, gens, samples=4, seed=rng.randint(0, 10**6))
        if not cert.passed:
            raise AssertionError(f"{setting.name}: {cert.verdict} ({cert.counterexample})")
    return f"{len(runs)} families"


def _shift_on_left(X: SkewElement) -> SkewElement:
    # sum A mu  ->  sum mu . A = sum mu(A) mu
    ring = X.ring
    return ring.element({mu: ring.apply_shift(mu, c) for mu, c in X.terms.items()})


def _negative_controls(rng: random.Random, bad: bool) -> str:
    from .arith import Poly, RatFunc, VarTable
    from .skew import ADDITIVE, MonoidSpec, ShiftOp, SkewRing, orbit_sum

    vt = VarTable([(1, 2, False)])
    group = GroupSpec(vt, ["A"])
    ring = SkewRing(vt, group, MonoidSpec((0, 1), ADDITIVE, (True, True)))
    setting = Setting.build(ring, "S2")
    X = ring.shift({0: 2}) + ring.shift({1: 2})
    if check_galois_ring(setting, [X]).verdict != "fail":
        raise AssertionError("index-2 support accepted")
    x1, x2 = vt.x(1, 1), vt.x(1, 2)
    Y = orbit_sum(ring, RatFunc(Poly.constant(vt, 1), x1 + x2), ShiftOp({0: 1}))
    if clears(Y, x1 - x2)[0]:
        raise AssertionError("symmetric denominator cleared by the Vandermonde")
    if is_relative_invariant(group, x1 + x2, SGN):
        raise AssertionError("x1 + x2 reported sgn-relative-invariant")
    return "3 controls"


def _charkey(rng: random.Random, bad: bool) -> str:
    setting, _ = make_family({"family": "qogz", "r": [3, 2]})
    group = setting.group
    for _ in range(20):
        p = generic_point(setting, rng)
        g = rng.choice(list(group.generators()))
        if char_key(group, group_act_point(g, p)) != char_key(group, p):
            raise AssertionError("CharKey not G-invariant")
    return "20 samples"


def _module(rng: random.Random, bad: bool) -> str:
    setting, gens = make_family({"family": "ogz", "r": [1, 2]})
    m = build_cyclic_module(setting, gens, generic_point(setting, rng), 2)
    if set(m.weights.values()) != {1}:
        raise AssertionError(f"weight dimensions {sorted(set(m.weights.values()))}")
    return f"{m.dimension} basis vectors"


SUITES: list[tuple[str, Callable[[random.Random, bool], str]]] = [
    ("composition", _composition),
    ("relative-invariants", _round_trip),
    ("certification", _certification),
    ("negative-controls", _negative_controls),
    ("charkey", _charkey),
    ("module", _module),
]


def run_selftest(seed: int = 0, bad_convention: bool = False, verbose: bool = False, out=print) -> bool:
    """Run every suite; returns True iff all pass.

    ``bad_convention`` places the OGZ shifts to the left of the coefficients,
    which must make the principal certification fail.
    """
    ok = True
    for name, fn in SUITES:
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        try:
            detail = fn(rng, bad_convention)
            status = "pass"
        except Exception as e:  # report and keep going
            detail = f"{type(e).__name__}: {e}"
            status = "FAIL"
            ok = False
        line = f"{name}: {status} ({detail})"
        if verbose:
            line += f" [{time.perf_counter() - t0:.3f}s]"
        out(line)
    return ok
