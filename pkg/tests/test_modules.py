import csv
import io
import itertools
import json
import random
from fractions import Fraction

import pytest

from galois_orders.arith import VarTable, evaluate_at_point
from galois_orders.families import make_family
from galois_orders.modules import (
    REPORT_LABEL,
    CharacterPoint,
    SingularCharacter,
    act_point,
    build_cyclic_module,
    canonical_form,
    char_key,
    group_act_point,
    report_csv,
    report_json,
    weight_report,
)
from galois_orders.sampling import generic_point, random_invariant
from galois_orders.skew import ShiftOp, dagger, evaluate, skew_mul
from galois_orders.symmetry import GroupSpec

F = Fraction


def point(setting, *vals, q=None):
    return CharacterPoint(setting.vt, tuple(F(v) for v in vals), q)


def test_act_point_examples():
    s, _ = make_family({"family": "Xf", "n": 1})
    p = point(s, 5)
    assert act_point(s.ring, ShiftOp({0: 1}), p).values == (F(4),)
    assert act_point(s.ring, ShiftOp(), p) == p
    s, _ = make_family({"family": "qogz", "r": [1, 1]})
    p = point(s, 8, 3, q=2)
    assert act_point(s.ring, ShiftOp({0: 1}), p).values == (F(4), F(3))


def test_act_point_contract():
    # gamma(act_point(mu, p)) == (mu gamma)(p)
    rng = random.Random(4)
    for cfg in ({"family": "ogz", "r": [1, 2]}, {"family": "qogz", "r": [1, 2]}):
        s, _ = make_family(cfg)
        p = generic_point(s, rng)
        for _ in range(10):
            mu = s.ring.monoid.from_vector([rng.randint(-2, 2) for _ in range(len(s.ring.monoid.mobile))])
            g = random_invariant(s.group, rng, 2, 3)
            lhs = evaluate_at_point(g, act_point(s.ring, mu, p).assignment())
            rhs = evaluate_at_point(s.ring.apply_shift(mu, g), p.assignment())
            assert lhs == rhs


def test_character_point_validation():
    s, _ = make_family({"family": "qogz", "r": [1, 1]})
    with pytest.raises(ValueError):
        point(s, 0, 1)
    with pytest.raises(ValueError):
        point(s, 1, 2, q=1)
    with pytest.raises(ValueError):
        point(s, 1)
    with pytest.raises(ValueError):
        CharacterPoint.from_mapping(s.vt, {"x[1,1]": 3})
    assert CharacterPoint.from_mapping(s.vt, {"x[1,1]": 3, "x[2,1]": 5}).q == F(2)


@pytest.mark.parametrize("step,expected", [(1, ["1/2", "3/2", "5/2", "7/2"]), (-1, ["1/2", "-1/2", "-3/2", "-5/2"])])
def test_uf_basis_follows_the_step(step, expected):
    s, gens = make_family({"family": "Xf", "n": 1, "xf_step": step})
    m = build_cyclic_module(s, gens, point(s, F(1, 2)), depth=3)
    assert [str(p.values[0]) for p in m.basis] == expected
    assert set(m.weights.values()) == {1}
    assert m.truncated


def test_ogz_generic_dimensions_are_one():
    s, gens = make_family({"family": "ogz", "r": [1, 2]})
    m = build_cyclic_module(s, gens, generic_point(s, random.Random(1)), depth=2)
    assert set(m.weights.values()) == {1}
    assert len(m.weights) == m.dimension


def test_depth_monotonicity():
    s, gens = make_family({"family": "ogz", "r": [1, 2]})
    seed = generic_point(s, random.Random(6))
    prev = None
    for d in range(4):
        m = build_cyclic_module(s, gens, seed, depth=d)
        keys = [canonical_form(s.group, p) for p in m.basis]
        if prev is not None:
            assert keys[:len(prev)] == prev
        prev = keys
    assert build_cyclic_module(s, gens, seed, depth=0).dimension == 1


def _interior_rows(m, max_level):
    return [i for i, lvl in enumerate(m.levels) if lvl <= max_level]


@pytest.mark.parametrize("cfg,side", [
    ({"family": "ogz", "r": [1, 2]}, "right"),
    ({"family": "Xf", "n": 2}, "right"),
    ({"family": "qogz", "r": [1, 2]}, "left"),
])
def test_matrices_form_a_representation(cfg, side):
    s, gens = make_family(cfg)
    names = list(gens)
    X, Y = gens[names[0]], gens[names[-1]]
    ops = {"X": X, "Y": Y, "XY": skew_mul(X, Y)}
    m = build_cyclic_module(s, ops, generic_point(s, random.Random(2)), depth=3, side=side)
    MX, MY, MXY = (m.dense(k) for k in ("X", "Y", "XY"))
    n = m.dimension
    for i in _interior_rows(m, 1):
        for j in range(n):
            if side == "right":
                # xi.(XY) = (xi.X).Y
                prod = sum(MX[i][k] * MY[k][j] for k in range(n))
                assert MXY[i][j] == prod
            else:
                # (XY).xi = X.(Y.xi)
                prod = sum(MX[j][k] * MY[k][i] for k in range(n))
                assert MXY[j][i] == prod


def test_module_matches_direct_evaluation():
    # xi_p(X gamma) = sum_j M[p, j] gamma(p_j) for invariant gamma
    rng = random.Random(9)
    s, gens = make_family({"family": "ogz", "r": [1, 2]})
    m = build_cyclic_module(s, gens, generic_point(s, rng), depth=2)
    for name, X in gens.items():
        M = m.dense(name)
        for b in m.interior:
            g = random_invariant(s.group, rng, 2, 3)
            lhs = evaluate_at_point(evaluate(X, g), m.basis[b].assignment())
            rhs = sum(M[b][j] * evaluate_at_point(g, p.assignment()) for j, p in enumerate(m.basis))
            assert lhs == rhs


def test_left_module_matches_dagger_evaluation():
    rng = random.Random(10)
    s, gens = make_family({"family": "qogz", "r": [1, 1]})
    m = build_cyclic_module(s, gens, generic_point(s, rng), depth=2, side="left")
    for name, X in gens.items():
        M = m.dense(name)
        Xd = dagger(X, allow_opposite=True)
        for b in m.interior:
            g = random_invariant(s.group, rng, 2, 2)
            lhs = evaluate_at_point(evaluate(Xd, g), m.basis[b].assignment())
            rhs = sum(M[j][b] * evaluate_at_point(g, p.assignment()) for j, p in enumerate(m.basis))
            assert lhs == rhs


def test_charkey_is_orbit_invariant():
    rng = random.Random(3)
    for types, blocks in ((["A"], [(1, 3, False)]), (["D"], [(1, 3, True)])):
        vt = VarTable(blocks)
        group = GroupSpec(vt, types)
        for _ in range(10):
            p = CharacterPoint(vt, tuple(F(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(3)))
            for g in group.elements():
                q = group_act_point(g, p)
                assert char_key(group, q) == char_key(group, p)
                assert canonical_form(group, q) == canonical_form(group, p)


def test_weight_report_single_point():
    s, gens = make_family({"family": "Xf", "n": 1})
    m = build_cyclic_module(s, gens, point(s, F(1, 3)), depth=0)
    r = weight_report(m)
    assert r["label"] == REPORT_LABEL
    assert r["dimension"] == 1 and len(r["weights"]) == 1
    assert r["matrices"]["Xf"]["nonzeros"] == 0
    assert r["truncated"]


def test_weight_report_rows_and_empty_generators():
    s, gens = make_family({"family": "Xf", "n": 1})
    m = build_cyclic_module(s, gens, point(s, F(1, 3)), depth=2)
    r = json.loads(report_json(m))
    assert len(r["weights"]) == m.dimension == 3
    assert r["matrices"]["Xf"]["entries"][0] == [0, 1, str(F(1, 3))]  # x(p) with f = x
    m = build_cyclic_module(s, {}, point(s, F(1, 3)), depth=2)
    assert m.dimension == 1 and not m.truncated


def test_csv_weight_table():
    s, gens = make_family({"family": "ogz", "r": [1, 2]})
    m = build_cyclic_module(s, gens, generic_point(s, random.Random(5)), depth=1)
    rows = list(csv.reader(io.StringIO(report_csv(m))))
    assert rows[0][0] == "weight" and rows[0][-1] == "dimension"
    assert len(rows) == 1 + len(m.weights)
    assert all(r[-1] == "1" for r in rows[1:])


def test_singular_characters_are_reported():
    s, gens = make_family({"family": "ogz", "r": [2, 2]})
    with pytest.raises(SingularCharacter) as e:
        build_cyclic_module(s, gens, point(s, F(1, 3), F(1, 3), F(2, 7), F(3, 11)), depth=1)
    assert "x[1,1]" in str(e.value.factor) and "x[1,2]" in str(e.value.factor)
    s, gens = make_family({"family": "qogz", "r": [2, 2]})
    with pytest.raises(SingularCharacter):
        build_cyclic_module(s, gens, point(s, F(1, 3), F(-1, 3), F(2, 7), F(3, 11)), depth=1, side="left")


def test_group_images_of_seed_collapse_to_one_basis_vector():
    s, gens = make_family({"family": "ogz", "r": [2, 2]})
    seed = generic_point(s, random.Random(12))
    base = build_cyclic_module(s, gens, seed, depth=1)
    for g in itertools.islice(s.group.elements(), 4):
        other = build_cyclic_module(s, gens, group_act_point(g, seed), depth=1)
        # same orbits, possibly reached in a different order
        assert {canonical_form(s.group, p) for p in other.basis} == {canonical_form(s.group, p) for p in base.basis}
        assert canonical_form(s.group, other.basis[0]) == canonical_form(s.group, seed)


def test_bad_arguments():
    s, gens = make_family({"family": "Xf", "n": 1})
    with pytest.raises(ValueError):
        build_cyclic_module(s, gens, point(s, 1), side="up")
    with pytest.raises(ValueError):
        build_cyclic_module(s, gens, point(s, 1), depth=-1)
