import random
import time
from fractions import Fraction

import pytest

from galois_orders.arith import Poly, RatFunc, VarTable
from galois_orders.certify import (
    Setting,
    certify_coprincipal,
    certify_principal,
    check_galois_ring,
    clears,
    dedekind_witness,
    replay_certificate,
)
from galois_orders.families import make_family
from galois_orders.modules import CharacterPoint, SingularCharacter, build_cyclic_module, char_key
from galois_orders.sampling import generic_point, random_invariant, random_ratfunc, random_skew
from galois_orders.skew import ADDITIVE, MULTIPLICATIVE, MonoidSpec, ShiftOp, SkewRing, evaluate, orbit_sum, skew_mul
from galois_orders.symmetry import (
    SGN,
    GroupSpec,
    apply_group,
    d_sgn,
    divide_by_relative_invariant,
    is_relative_invariant,
)
from oracles import cofactor_det, signed_permutation_orbit

F = Fraction


def _within(start, limit):
    elapsed = time.perf_counter() - start
    assert elapsed < limit, f"took {elapsed:.1f}s, target {limit}s"


COMPOSITION_FAMILIES = [
    {"family": "Xf", "n": 3},
    {"family": "ogz", "r": [1, 2]},
    {"family": "qogz", "r": [1, 2]},
    {"family": "finiteW", "pi": [1, 2]},
]


@pytest.mark.criterion(1, "evaluation composition law, 500 triples per family")
def test_composition_law():
    start = time.perf_counter()
    for i, cfg in enumerate(COMPOSITION_FAMILIES):
        setting, _ = make_family(cfg)
        rng = random.Random(100 + i)
        for _ in range(500):
            X = random_skew(setting.ring, rng, 2, rng.randint(0, 3))
            Y = random_skew(setting.ring, rng, 2, rng.randint(0, 3))
            a = random_ratfunc(setting.vt, rng, rng.randint(1, 3))
            assert evaluate(X, evaluate(Y, a)) == evaluate(skew_mul(X, Y), a), cfg
    _within(start, 60)


@pytest.mark.criterion(2, "relative-invariant round trip, 200 samples per group")
def test_relative_invariant_round_trip():
    start = time.perf_counter()
    groups = [
        GroupSpec(VarTable([(1, 2, False)]), ["A"]),
        GroupSpec(VarTable([(1, 3, False)]), ["A"]),
        GroupSpec(VarTable([(1, 2, True)], centrals=("q",)), ["D"]),
        GroupSpec(VarTable([(1, 3, True)], centrals=("q",)), ["D"]),
    ]
    for i, group in enumerate(groups):
        rng = random.Random(200 + i)
        d = d_sgn(group)
        assert is_relative_invariant(group, d, SGN)
        for _ in range(200):
            s = random_invariant(group, rng, 3, 3)
            assert all(apply_group(g, s) == s for g in group.generators())
            assert divide_by_relative_invariant(group, s * d, d) == s
    _within(start, 60)


def _certification_matrix():
    cases = [({"family": "Xf", "n": n, "f_kind": "power_sum", "f_degree": 2}, "principal") for n in (2, 3, 4)]
    for r, Js in (([1, 1], [None, []]), ([1, 2], [None, []]), ([2, 2], [None, []]), ([1, 2, 3], [None, [], [1], [2]])):
        for J in Js:
            cases.append(({"family": "ogz", "r": r} | ({} if J is None else {"J": J}), "principal"))
    for pi in ([1], [1, 1], [1, 2]):
        cases.append(({"family": "finiteW", "pi": pi}, "principal"))
    for r in ([1, 1], [1, 2], [2, 2]):
        for J in (None, []):
            cases.append(({"family": "qogz", "r": r} | ({} if J is None else {"J": J}), "co-principal"))
    return cases


@pytest.mark.criterion(3, "certification matrix with clearing replay")
def test_certification_matrix():
    start = time.perf_counter()
    for cfg, kind in _certification_matrix():
        setting, gens = make_family(cfg)
        fn = certify_principal if kind == "principal" else certify_coprincipal
        cert = fn(setting, gens, samples=20, seed=7)
        assert cert.kind == kind and cert.verdict == "pass", (cfg, cert.counterexample)
        assert replay_certificate(cert, setting, gens), cfg
    _within(start, 300)


@pytest.mark.criterion(4, "negative controls")
def test_negative_controls():
    vt = VarTable([(1, 2, False)])
    group = GroupSpec(vt, ["A"])
    ring = SkewRing(vt, group, MonoidSpec((0, 1), ADDITIVE, (True, True)))
    setting = Setting.build(ring, "S2")
    cert = check_galois_ring(setting, [ring.shift({0: 2}) + ring.shift({1: 2})])
    assert cert.verdict == "fail"
    x1, x2 = vt.x(1, 1), vt.x(1, 2)
    Y = orbit_sum(ring, RatFunc(Poly.constant(vt, 1), x1 + x2), ShiftOp({0: 1}))
    assert clears(Y, x1 - x2, "left") == (False, None)
    assert is_relative_invariant(group, x1 + x2, SGN) is False


def _assert_commutator_shape(setting, plus, minus):
    group_elements = list(setting.group.elements())
    products = [skew_mul(plus, minus), skew_mul(minus, plus)]
    for P in products:
        assert set(P.terms) == {ShiftOp()}
        c = P.terms[ShiftOp()]
        assert c.is_laurent()
        assert all(apply_group(g, c) == c for g in group_elements)
    diff = (products[0] - products[1]).terms.get(ShiftOp(), RatFunc(Poly(setting.vt)))
    assert all(apply_group(g, diff) == diff for g in group_elements)
    return diff


@pytest.mark.criterion(5, "gl_2-type commutator shape")
def test_commutators():
    start = time.perf_counter()
    setting, gens = make_family({"family": "ogz", "r": [1, 2]})
    diff = _assert_commutator_shape(setting, gens["X1+"], gens["X1-"])
    # X+X- - X-X+ = -(x21 - x11)(x22 - x11) + (x21 - x11 - 1)(x22 - x11 - 1), computed by hand
    x11, x21, x22 = (setting.vt.x(*v) for v in ((1, 1), (2, 1), (2, 2)))
    assert diff == RatFunc(-(x21 - x11) * (x22 - x11) + (x21 - x11 - 1) * (x22 - x11 - 1))
    setting, gens = make_family({"family": "qogz", "r": [1, 1]})
    _assert_commutator_shape(setting, gens["X1+"], gens["X1-"])
    _within(start, 30)


@pytest.mark.criterion(6, "Dedekind witnesses against a cofactor oracle")
def test_dedekind_witnesses():
    start = time.perf_counter()
    rings = []
    for n in (1, 2):
        vt = VarTable([(1, n, False)])
        rings.append(SkewRing(vt, GroupSpec(vt, ["A"]), MonoidSpec(tuple(range(n)), ADDITIVE, (True,) * n)))
        vq = VarTable([(1, n, True)], centrals=("q",))
        rings.append(SkewRing(vq, GroupSpec(vq, ["D"]), MonoidSpec(tuple(range(n)), MULTIPLICATIVE, (True,) * n)))
    rng = random.Random(6)
    for R in rings:
        dim = len(R.monoid.mobile)
        for size in range(1, 5):
            for _ in range(3):
                vecs = set()
                while len(vecs) < size:
                    vecs.add(tuple(rng.randint(-3, 3) for _ in range(dim)))
                shifts = [R.monoid.from_vector(v) for v in sorted(vecs)]
                gammas, det = dedekind_witness(R, shifts)
                M = [[R.apply_shift(mu, g).as_poly() for mu in shifts] for g in gammas]
                oracle = cofactor_det(M)
                assert not oracle.is_zero()
                assert oracle == det
    _within(start, 30)


def _blockwise_canon(vt, values):
    """Sort the coordinates of each block: the S_r-orbit canonical form."""
    out, it = [], iter(values)
    for _, r, _ in vt.blocks:
        out.append(tuple(sorted(next(it) for _ in range(r))))
    return tuple(out)


def _oracle_rows(setting, gens, m, coefficient_rules):
    """Module matrix rows recomputed from hand-written coefficient formulas."""
    vt = setting.vt
    index = {_blockwise_canon(vt, p.values): j for j, p in enumerate(m.basis)}
    rows = {name: {} for name in gens}
    for b in m.interior:
        p = dict(zip([vt.variables[i] for i in range(vt.N) if not vt.is_central(i)], m.basis[b].values))
        for name, rules in coefficient_rules.items():
            for coeff, move in rules:
                v = coeff(p)
                if v == 0:
                    continue
                target = dict(p)
                for var, step in move.items():
                    target[var] = target[var] + step
                j = index[_blockwise_canon(vt, [target[var] for var in p])]
                rows[name][(b, j)] = rows[name].get((b, j), 0) + v
    return rows


@pytest.mark.criterion(7, "module engine against direct evaluation")
def test_module_engine_oracle():
    start = time.perf_counter()
    for seed in range(10):
        rng = random.Random(700 + seed)
        # U(f), n = 1, f = x^2: xi_p . X = p^2 xi_{p+1}
        setting, gens = make_family({"family": "Xf", "n": 1, "f_degree": 2})
        p0 = generic_point(setting, rng)
        m = build_cyclic_module(setting, gens, p0, depth=3)
        rules = {"Xf": [(lambda p: p[(1, 1)] ** 2, {(1, 1): 1})]}
        assert _oracle_rows(setting, gens, m, rules)["Xf"] == {k: v for k, v in m.matrices["Xf"].items()}
        assert set(m.weights.values()) == {1} and char_key(setting.group, p0) in m.weights

        # OGZ r = (1, 2): X+ = -(x21 - x11)(x22 - x11) delta, X- = delta^-1, delta: x11 -> x11 - 1 on points
        setting, gens = make_family({"family": "ogz", "r": [1, 2]})
        p0 = generic_point(setting, rng)
        m = build_cyclic_module(setting, gens, p0, depth=3)
        rules = {
            "X1+": [(lambda p: -(p[(2, 1)] - p[(1, 1)]) * (p[(2, 2)] - p[(1, 1)]), {(1, 1): -1})],
            "X1-": [(lambda p: F(1), {(1, 1): 1})],
        }
        oracle = _oracle_rows(setting, gens, m, rules)
        for name in gens:
            assert oracle[name] == m.matrices[name]
        assert set(m.weights.values()) == {1} and char_key(setting.group, p0) in m.weights
    _within(start, 120)


@pytest.mark.criterion(8, "singular characters are detected")
def test_singularity_detection():
    cases = [
        ({"family": "Xf", "n": 2}, (F(2, 5), F(2, 5)), "right"),
        ({"family": "ogz", "r": [2, 2]}, (F(1, 3), F(1, 3), F(2, 7), F(3, 11)), "right"),
        ({"family": "ogz", "r": [2, 3]}, (F(5, 3), F(5, 3), F(2, 7), F(3, 11), F(4, 13)), "right"),
        ({"family": "qogz", "r": [2, 2]}, (F(1, 3), F(1, 3), F(2, 7), F(3, 11)), "left"),
    ]
    for cfg, vals, side in cases:
        setting, gens = make_family(cfg)
        seed = CharacterPoint(setting.vt, vals)
        with pytest.raises(SingularCharacter) as e:
            build_cyclic_module(setting, gens, seed, depth=1, side=side)
        factor = str(e.value.factor)
        assert "x[1,1]" in factor and "x[1,2]" in factor, (cfg, factor)


@pytest.mark.criterion(9, "CharKey equality iff same orbit, 1000 samples")
def test_charkey_orbits():
    start = time.perf_counter()
    rng = random.Random(9)
    pool = [F(v) for v in (1, -1, 2, -2, 3, -3)] + [F(1, 2), F(-1, 2)]
    settings = []
    for r in (1, 2, 3):
        settings.append((GroupSpec(VarTable([(1, r, False)]), ["A"]), False))
        settings.append((GroupSpec(VarTable([(1, r, True)]), ["D"]), True))
    agreements = 0
    for k in range(1000):
        group, signed = settings[k % len(settings)]
        r = group.vt.N
        p = tuple(rng.choice(pool) for _ in range(r))
        orbit = signed_permutation_orbit(p, signed)
        if rng.random() < 0.5:
            q = rng.choice(sorted(orbit))
        else:
            q = tuple(rng.choice(pool) for _ in range(r))
        same_key = char_key(group, CharacterPoint(group.vt, p)) == char_key(group, CharacterPoint(group.vt, q))
        assert same_key == (q in orbit), (group.types, p, q)
        agreements += 1
    assert agreements == 1000
    _within(start, 60)
