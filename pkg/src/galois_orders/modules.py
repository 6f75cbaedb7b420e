"""Cyclic Gelfand-Zeitlin modules at generic characters.

A character ``xi`` of ``Gamma`` is represented by a lifting point ``p`` of
``Specm Lambda``; two points give the same character iff they lie in one
``G``-orbit, which is detected with :func:`char_key` (the values of the
invariant generators).

For a principal family the right cyclic module ``xi U`` acts by

    xi_p . X = sum_mu x_mu(p) xi_{act_point(mu, p)},

stored as row-vector matrices (entry ``[p, p']``).  Co-principal families
use the left module, where ``X`` acts through ``dagger(X)`` and matrices
act on column vectors (entry ``[p', p]``).

Exploration is breadth-first to a fixed depth; what comes out is a
truncation of the cyclic module, labelled as such in reports.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .arith import DenominatorVanishes, Poly, VarTable, evaluate_at_point
from .certify import Setting
from .skew import ADDITIVE, ShiftOp, SkewElement, SkewRing, dagger
from .symmetry import GroupElement, GroupSpec, invariant_generators

__all__ = [
    "CharacterPoint",
    "CharKey",
    "SingularCharacter",
    "WeightModuleData",
    "act_point",
    "group_act_point",
    "char_key",
    "canonical_form",
    "build_cyclic_module",
    "weight_report",
    "report_json",
    "report_csv",
    "DEFAULT_Q",
    "REPORT_LABEL",
]

DEFAULT_Q = Fraction(2)
REPORT_LABEL = "cyclic module truncation"


class SingularCharacter(ValueError):
    """A generator coefficient has a vanishing denominator at a visited point."""

    def __init__(self, factor, point: "CharacterPoint", generator: str, shift: list[int]):
        self.factor = factor
        self.point = point
        self.generator = generator
        self.shift = shift
        super().__init__(
            f"singular character: factor {factor} of the coefficient of {generator} at shift {shift} "
            f"vanishes at {point}"
        )


@dataclass(frozen=True)
class CharacterPoint:
    """Exact values of the block variables, plus ``q`` for multiplicative settings."""

    vt: VarTable
    values: tuple[Fraction, ...]
    q: Fraction | None = None
    provenance: str = "user"

    def __post_init__(self):
        block_vars = [i for i in range(self.vt.N) if not self.vt.is_central(i)]
        if len(self.values) != len(block_vars):
            raise ValueError(f"expected {len(block_vars)} coordinates, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        for i, v in zip(block_vars, self.values):
            if self.vt.laurent[i] and v == 0:
                raise ValueError(f"Laurent coordinate {self.vt.name(i)} must be nonzero")
        if "q" in self.vt.centrals:
            q = DEFAULT_Q if self.q is None else Fraction(self.q)
            if q in (0, 1, -1):
                raise ValueError(f"q must avoid 0 and +-1, got {q}")
            object.__setattr__(self, "q", q)

    @classmethod
    def from_mapping(cls, vt: VarTable, values: Mapping, q=None, provenance: str = "user") -> "CharacterPoint":
        """Build from ``{variable id | name | index: value}`` covering all block variables."""
        by_index = {}
        for k, v in values.items():
            if isinstance(k, str) and k.startswith("x["):
                b, i = (int(s) for s in k[2:-1].split(","))
                k = (b, i)
            i = k if isinstance(k, int) else vt.index(k)
            by_index[i] = Fraction(v)
        block_vars = [i for i in range(vt.N) if not vt.is_central(i)]
        missing = [vt.name(i) for i in block_vars if i not in by_index]
        if missing:
            raise ValueError(f"seed does not assign {', '.join(missing)}")
        return cls(vt, tuple(by_index[i] for i in block_vars), q, provenance)

    def assignment(self) -> dict[int, Fraction]:
        """Full assignment for evaluation (``u`` set to 0; generators must not use it)."""
        out = {}
        it = iter(self.values)
        for i, v in enumerate(self.vt.variables):
            if isinstance(v, tuple):
                out[i] = next(it)
            elif v == "q":
                out[i] = self.q
            else:
                out[i] = Fraction(0)
        return out

    def value(self, var) -> Fraction:
        i = var if isinstance(var, int) else self.vt.index(var)
        return self.assignment()[i]

    def to_json(self) -> dict:
        out = {self.vt.name(i): str(v) for i, v in self.assignment().items() if not self.vt.is_central(i)}
        if self.q is not None:
            out["q"] = str(self.q)
        return out

    def __str__(self):
        return "{" + ", ".join(f"{k}: {v}" for k, v in self.to_json().items()) + "}"


@dataclass(frozen=True)
class CharKey:
    """Values of the invariant generators at a point: the ``Gamma``-character."""

    values: tuple[Fraction, ...]

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def _with_values(p: CharacterPoint, assignment: Mapping[int, Fraction], provenance: str) -> CharacterPoint:
    vals = tuple(assignment[i] for i in range(p.vt.N) if not p.vt.is_central(i))
    return CharacterPoint(p.vt, vals, p.q, provenance)


def act_point(ring: SkewRing, mu: ShiftOp, p: CharacterPoint) -> CharacterPoint:
    """The point ``p'`` with ``gamma(p') = (mu gamma)(p)`` for every ``gamma``."""
    if mu.is_identity():
        return p
    a = p.assignment()
    for i, s in mu.items:
        if ring.monoid.mode == ADDITIVE:
            a[i] = a[i] - s
        else:
            a[i] = a[i] * p.q ** (-s)
    return _with_values(p, a, "shift-derived")


def group_act_point(g: GroupElement, p: CharacterPoint) -> CharacterPoint:
    """The point ``p'`` with ``gamma(p') = (g gamma)(p)``: a relabelling of the lift."""
    a = p.assignment()
    out = dict(a)
    for i in range(p.vt.N):
        if p.vt.is_central(i):
            continue
        t, sign = g.variable_image(i)
        out[i] = sign * a[t]
    return _with_values(p, out, p.provenance)


_INVARIANTS: dict = {}


def _invariants(group: GroupSpec) -> list[Poly]:
    hit = _INVARIANTS.get(group)
    if hit is None:
        hit = _INVARIANTS[group] = invariant_generators(group)
    return hit


def char_key(group: GroupSpec, p: CharacterPoint) -> CharKey:
    a = p.assignment()
    return CharKey(tuple(evaluate_at_point(g, a) for g in _invariants(group)))


def canonical_form(group: GroupSpec, p: CharacterPoint) -> tuple:
    """Orbit canonical form: sorted coordinates for type A blocks, block fingerprints for type D."""
    vt = group.vt
    a = p.assignment()
    out = []
    for (b, r, _), t in zip(vt.blocks, group.types):
        idx = vt.block_variables(b)
        if t == "A":
            out.append(tuple(sorted(a[i] for i in idx)))
        else:
            sub = GroupSpec(VarTable([(b, r, True)]), ["D"])
            vals = {j: a[i] for j, i in enumerate(idx)}
            out.append(tuple(evaluate_at_point(g, vals) for g in _invariants(sub)))
    return tuple(out)


@dataclass
class WeightModuleData:
    basis: list[CharacterPoint]
    keys: list[CharKey]
    matrices: dict[str, dict[tuple[int, int], Fraction]]
    weights: dict[CharKey, int]
    depth: int
    side: str
    levels: list[int]
    truncated: bool
    interior: list[int] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def dense(self, name: str) -> list[list[Fraction]]:
        n = len(self.basis)
        M = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), v in self.matrices[name].items():
            M[i][j] = v
        return M


def _named(generators) -> dict[str, SkewElement]:
    if isinstance(generators, Mapping):
        return dict(generators)
    return {f"X{i}": g for i, g in enumerate(generators, 1)}


def build_cyclic_module(
    setting: Setting,
    generators,
    seed: CharacterPoint,
    depth: int = 2,
    side: str = "right",
) -> WeightModuleData:
    """Breadth-first truncation of the cyclic module generated by ``xi_seed``.

    ``side='right'`` is for principal families, ``side='left'`` for
    co-principal ones (action through the dagger images).  Raises
    :class:`SingularCharacter` if a coefficient denominator vanishes at a
    visited point.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if seed.vt != setting.vt:
        raise ValueError("seed point belongs to a different variable table")
    group = setting.group
    gens = _named(generators)
    ops = {}
    for name, X in gens.items():
        Y = X if side == "right" else dagger(X, allow_opposite=True)
        if "u" in setting.vt.centrals:
            ui = setting.vt.index("u")
            if any(ui in c.involves() for c in Y.terms.values()):
                raise ValueError(f"generator {name} involves u; pass its u-coefficients instead")
        ops[name] = (Y.ring, Y.sorted_terms())

    def canon(p):
        return canonical_form(group, p)

    basis = [seed]
    index = {canon(seed): 0}
    levels = [0]
    matrices: dict[str, dict[tuple[int, int], Fraction]] = {name: {} for name in ops}
    queue = deque([0])
    truncated = False
    interior = []
    while queue:
        b = queue.popleft()
        p = basis[b]
        expand = levels[b] < depth
        a = p.assignment()
        for name, (ring, terms) in ops.items():
            for mu, c in terms:
                target = act_point(ring, mu, p)
                key = canon(target)
                if key not in index:
                    if not expand:
                        truncated = True
                        continue
                    index[key] = len(basis)
                    basis.append(target)
                    levels.append(levels[b] + 1)
                    queue.append(index[key])
                if not expand:
                    continue
                try:
                    v = evaluate_at_point(c, a)
                except DenominatorVanishes as e:
                    raise SingularCharacter(e.factor, p, name, ring.monoid.to_vector(mu)) from None
                if v == 0:
                    continue
                j = index[key]
                cell = (b, j) if side == "right" else (j, b)
                M = matrices[name]
                M[cell] = M.get(cell, Fraction(0)) + v
                if M[cell] == 0:
                    del M[cell]
        if expand:
            interior.append(b)
    keys = [char_key(group, p) for p in basis]
    weights: dict[CharKey, int] = {}
    for k in keys:
        weights[k] = weights.get(k, 0) + 1
    return WeightModuleData(basis, keys, matrices, weights, depth, side, levels, truncated, interior)


# -- reports -------------------------------------------------------------------


def weight_report(m: WeightModuleData) -> dict:
    """Plain-data report: basis, weight table, sparse matrices, truncation flag."""
    convention = (
        "right module: row vector times matrix, entry [i, j] is the coefficient of basis j in (basis i).X"
        if m.side == "right"
        else "left module: matrix times column vector, entry [i, j] is the coefficient of basis i in X.(basis j)"
    )
    n = len(m.basis)
    return {
        "label": REPORT_LABEL,
        "side": m.side,
        "convention": convention,
        "depth": m.depth,
        "truncated": m.truncated,
        "dimension": n,
        "basis": [
            {"index": i, "level": lvl, "point": p.to_json(), "key": [str(v) for v in k.values]}
            for i, (p, k, lvl) in enumerate(zip(m.basis, m.keys, m.levels))
        ],
        "weights": [{"key": [str(v) for v in k.values], "dimension": d} for k, d in m.weights.items()],
        "matrices": {
            name: {
                "nonzeros": len(M),
                "density": (len(M) / (n * n)) if n else 0.0,
                "entries": [[i, j, str(v)] for (i, j), v in sorted(M.items())],
            }
            for name, M in m.matrices.items()
        },
    }


def report_json(m: WeightModuleData) -> str:
    return json.dumps(weight_report(m), indent=2) + "\n"


def report_csv(m: WeightModuleData) -> str:
    """Weight table only: one row per character."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    width = max((len(k.values) for k in m.weights), default=0)
    w.writerow(["weight"] + [f"gamma{i + 1}" for i in range(width)] + ["dimension"])
    for idx, (k, d) in enumerate(m.weights.items()):
        w.writerow([idx] + [str(v) for v in k.values] + [d])
    return buf.getvalue()
