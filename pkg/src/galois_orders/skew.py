"""The skew monoid ring ``L * M`` of difference operators.

Elements are finite sums ``sum_mu x_mu mu`` stored in left-normal form
(coefficient to the left of the shift) with multiplication

    (a mu) (b nu) = (a mu(b)) (mu nu).

A shift ``mu`` acts on the mobile variables either additively,
``x -> x - s``, or multiplicatively, ``x -> q^{-s} x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import Poly, RatFunc, Scale, Translate, VarTable, parse, substitute
from .symmetry import DEFAULT_GROUP_CAP, GroupElement, GroupSpec, apply_group

__all__ = [
    "ADDITIVE",
    "MULTIPLICATIVE",
    "ShiftOp",
    "MonoidSpec",
    "SkewRing",
    "SkewElement",
    "StabilizerViolation",
    "NonInvertibleShift",
    "NonAdmissibleShift",
    "skew_mul",
    "group_act_skew",
    "support",
    "evaluate",
    "orbit_sum",
    "stabilizer",
    "dagger",
]

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


class StabilizerViolation(ValueError):
    pass


class NonInvertibleShift(ValueError):
    pass


class NonAdmissibleShift(ValueError):
    pass


class ShiftOp:
    """Integer shift vector on mobile variables, stored sparsely.

    Composition is coordinatewise addition; the identity is the empty map.
    """

    __slots__ = ("items", "_hash")

    def __init__(self, shifts: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(shifts, Mapping):
            shifts = shifts.items()
        self.items = tuple(sorted((int(i), int(s)) for i, s in shifts if s))
        self._hash = hash(self.items)

    @classmethod
    def unit(cls, var_index: int, step: int = 1) -> "ShiftOp":
        return cls({var_index: step})

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def get(self, i: int) -> int:
        for j, s in self.items:
            if j == i:
                return s
        return 0

    def is_identity(self) -> bool:
        return not self.items

    def __mul__(self, other: "ShiftOp") -> "ShiftOp":
        d = dict(self.items)
        for i, s in other.items:
            d[i] = d.get(i, 0) + s
        return ShiftOp(d)

    def __pow__(self, n: int) -> "ShiftOp":
        return ShiftOp({i: n * s for i, s in self.items})

    def inverse(self) -> "ShiftOp":
        return ShiftOp({i: -s for i, s in self.items})

    def __eq__(self, other):
        return isinstance(other, ShiftOp) and self.items == other.items

    def __lt__(self, other):
        return self.items < other.items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ShiftOp({dict(self.items)})"


IDENTITY = ShiftOp()


@dataclass(frozen=True)
class MonoidSpec:
    """The monoid ``M`` as a cone in ``Z^mobile``.

    Coordinate ``j`` is either invertible (both directions allowed) or a
    one-sided ray in direction ``orientation[j]``.  A shift is admissible
    when every one-sided coordinate has the sign of its orientation.
    """

    mobile: tuple[int, ...]
    mode: str
    invertible: tuple[bool, ...]
    orientation: tuple[int, ...] = None

    def __post_init__(self):
        if self.mode not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown shift mode {self.mode!r}")
        if len(self.invertible) != len(self.mobile):
            raise ValueError("one invertibility flag per mobile coordinate required")
        if self.orientation is None:
            object.__setattr__(self, "orientation", (1,) * len(self.mobile))
        if len(self.orientation) != len(self.mobile) or any(o not in (1, -1) for o in self.orientation):
            raise ValueError("orientation entries must be +1 or -1")
        if len(set(self.mobile)) != len(self.mobile):
            raise ValueError("duplicate mobile variable")

    @property
    def is_group(self) -> bool:
        return all(self.invertible)

    def coordinate(self, var_index: int) -> int:
        return self.mobile.index(var_index)

    def admissible(self, mu: ShiftOp) -> bool:
        for i, s in mu.items:
            if i not in self.mobile:
                return False
            j = self.mobile.index(i)
            if not self.invertible[j] and s * self.orientation[j] < 0:
                return False
        return True

    def is_invertible(self, mu: ShiftOp) -> bool:
        return self.admissible(mu) and self.admissible(mu.inverse())

    def opposite(self) -> "MonoidSpec":
        return MonoidSpec(self.mobile, self.mode, self.invertible, tuple(-o for o in self.orientation))

    def generators(self) -> list[ShiftOp]:
        """Monoid generators: +-e_j for invertible j, orientation*e_j otherwise."""
        out = []
        for j, i in enumerate(self.mobile):
            if self.invertible[j]:
                out.append(ShiftOp.unit(i, 1))
                out.append(ShiftOp.unit(i, -1))
            else:
                out.append(ShiftOp.unit(i, self.orientation[j]))
        return out

    def to_vector(self, mu: ShiftOp) -> list[int]:
        return [mu.get(i) for i in self.mobile]

    def from_vector(self, vec: Sequence[int]) -> ShiftOp:
        if len(vec) != len(self.mobile):
            raise ValueError(f"shift vector {list(vec)} must have length {len(self.mobile)}")
        return ShiftOp(zip(self.mobile, vec))


class SkewRing:
    """The ring ``L * M`` together with the group ``G`` acting on it."""

    def __init__(self, vt: VarTable, group: GroupSpec, monoid: MonoidSpec):
        if group.vt != vt:
            raise ValueError("group acts on a different variable table")
        if monoid.mode == MULTIPLICATIVE and "q" not in vt.centrals:
            raise ValueError("multiplicative shifts need the central parameter q")
        for i in monoid.mobile:
            if vt.is_central(i):
                raise ValueError(f"central parameter {vt.name(i)} cannot be mobile")
        self.vt = vt
        self.group = group
        self.monoid = monoid
        self._shift_cache: dict = {}

    def __eq__(self, other):
        return (
            isinstance(other, SkewRing)
            and self.vt == other.vt
            and self.group == other.group
            and self.monoid == other.monoid
        )

    def __hash__(self):
        return hash((self.vt, self.group, self.monoid))

    def opposite(self) -> "SkewRing":
        return SkewRing(self.vt, self.group, self.monoid.opposite())

    # -- constructors -----------------------------------------------------

    def element(self, terms: Mapping[ShiftOp, object] | Iterable, check: bool = True) -> "SkewElement":
        if isinstance(terms, Mapping):
            terms = terms.items()
        d: dict[ShiftOp, RatFunc] = {}
        for mu, c in terms:
            c = self.coerce(c)
            if check and not self.monoid.admissible(mu):
                raise NonAdmissibleShift(f"{mu} is not in the monoid cone")
            if mu in d:
                c = d[mu] + c
            d[mu] = c
        return SkewElement(self, {m: c for m, c in d.items() if not c.is_zero()})

    def coerce(self, c) -> RatFunc:
        if isinstance(c, RatFunc):
            return c
        if isinstance(c, Poly):
            return RatFunc(c)
        return RatFunc(Poly.constant(self.vt, c))

    def scalar(self, c) -> "SkewElement":
        return self.element({IDENTITY: c})

    def one(self) -> "SkewElement":
        return self.scalar(1)

    def zero(self) -> "SkewElement":
        return SkewElement(self, {})

    def shift(self, mu: ShiftOp | Mapping[int, int], coeff=1) -> "SkewElement":
        if not isinstance(mu, ShiftOp):
            mu = ShiftOp({(k if isinstance(k, int) else self.vt.index(k)): s for k, s in mu.items()})
        return self.element({mu: coeff})

    # -- actions ----------------------------------------------------------

    def shift_substitution(self, mu: ShiftOp) -> dict:
        if self.monoid.mode == ADDITIVE:
            return {i: Translate(Fraction(-s)) for i, s in mu.items}
        return {i: Scale(Fraction(1), -s) for i, s in mu.items}

    def apply_shift(self, mu: ShiftOp, a):
        """``mu(a)``: the automorphism of ``L`` attached to ``mu``."""
        if mu.is_identity():
            return a if isinstance(a, RatFunc) else self.coerce(a)
        a = self.coerce(a)
        if a.num.is_constant() and a.den.is_constant():
            return a
        key = (mu, a)
        hit = self._shift_cache.get(key)
        if hit is not None:
            return hit
        out = substitute(a, self.shift_substitution(mu))
        if len(self._shift_cache) > 200_000:
            self._shift_cache.clear()
        self._shift_cache[key] = out
        return out

    def conjugate_shift(self, g: GroupElement, mu: ShiftOp) -> ShiftOp:
        """``g mu g^-1`` as a shift."""
        out = {}
        for i, s in mu.items:
            t, sign = g.variable_image(i)
            out[t] = sign * s if self.monoid.mode == ADDITIVE else s
        return ShiftOp(out)

    def from_json(self, data: Sequence[Mapping]) -> "SkewElement":
        return self.element(
            (self.monoid.from_vector(t["shift"]), parse(self.vt, t["coefficient"])) for t in data
        )

    def from_text(self, text: str) -> "SkewElement":
        """Inverse of :meth:`SkewElement.to_text`."""
        terms = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line == "0":
                continue
            vec, _, coeff = line.partition(":")
            vec = [int(v) for v in vec.strip().strip("[]").split(",") if v.strip()]
            terms.append((self.monoid.from_vector(vec), parse(self.vt, coeff)))
        return self.element(terms)


class SkewElement:
    """An element ``sum x_mu mu`` of ``L * M`` (immutable)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SkewRing, terms: dict[ShiftOp, RatFunc]):
        self.ring = ring
        self.terms = terms

    def support(self) -> set[ShiftOp]:
        return set(self.terms)

    def coefficient(self, mu: ShiftOp) -> RatFunc:
        return self.terms.get(mu, self.ring.coerce(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, SkewElement):
            return other
        if isinstance(other, (RatFunc, Poly, int, Fraction)):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = dict(self.terms)
        for mu, c in other.terms.items():
            v = d[mu] + c if mu in d else c
            if v.is_zero():
                d.pop(mu, None)
            else:
                d[mu] = v
        return SkewElement(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        return SkewElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return skew_mul(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return skew_mul(other, self)

    def __pow__(self, n: int):
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SkewElement):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        return self.ring.vt == other.ring.vt and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, a):
        return evaluate(self, a)

    def sorted_terms(self) -> list[tuple[ShiftOp, RatFunc]]:
        m = self.ring.monoid
        return sorted(self.terms.items(), key=lambda t: m.to_vector(t[0]))

    def to_json(self) -> list[dict]:
        m = self.ring.monoid
        return [{"shift": m.to_vector(mu), "coefficient": str(c)} for mu, c in self.sorted_terms()]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        m = self.ring.monoid
        return "\n".join(f"{m.to_vector(mu)}: {c}" for mu, c in self.sorted_terms())

    def __str__(self):
        if not self.terms:
            return "0"
        m = self.ring.monoid
        return " + ".join(f"({c})*{m.to_vector(mu)}" for mu, c in self.sorted_terms())

    def __repr__(self):
        return f"SkewElement({self})"


def skew_mul(a: SkewElement, b: SkewElement) -> SkewElement:
    """Bilinear extension of ``(a mu)(b nu) = a mu(b) (mu nu)``."""
    ring = a.ring
    out: dict[ShiftOp, RatFunc] = {}
    for mu, x in a.terms.items():
        for nu, y in b.terms.items():
            c = x * ring.apply_shift(mu, y)
            key = mu * nu
            if key in out:
                out[key] = out[key] + c
            else:
                out[key] = c
    return SkewElement(ring, {k: v for k, v in out.items() if not v.is_zero()})


def group_act_skew(g: GroupElement, a: SkewElement) -> SkewElement:
    """``g(x mu) = g(x) (g mu g^-1)``."""
    ring = a.ring
    out = {}
    for mu, c in a.terms.items():
        out[ring.conjugate_shift(g, mu)] = apply_group(g, c)
    return SkewElement(ring, out)


def is_invariant_skew(a: SkewElement) -> bool:
    """Fixed by every group generator (sufficient since ``G`` acts by automorphisms)."""
    return all(group_act_skew(g, a) == a for g in a.ring.group.generators())


def support(a: SkewElement) -> set[ShiftOp]:
    return a.support()


def evaluate(X: SkewElement, a) -> RatFunc:
    """``X(a) = sum_mu x_mu * mu(a)``."""
    ring = X.ring
    a = ring.coerce(a)
    out = ring.coerce(0)
    for mu, c in X.terms.items():
        out = out + c * ring.apply_shift(mu, a)
    return out


def stabilizer(ring: SkewRing, mu: ShiftOp) -> list[GroupElement]:
    """Generators of ``G_mu = {g : g mu g^-1 = mu}``.

    Block-wise: permutations preserving the level sets of the shift pattern,
    plus (multiplicative type D blocks) all even sign changes.
    """
    spec = ring.group
    ident = spec.identity()
    gens = []
    for b, (t, r) in enumerate(zip(spec.types, spec.sizes)):
        idx = spec._var_index[b]
        pattern = [mu.get(i) for i in idx]
        levels: dict[int, list[int]] = {}
        for pos, s in enumerate(pattern):
            levels.setdefault(s, []).append(pos)
        for positions in levels.values():
            for p0, p1 in zip(positions, positions[1:]):
                perm = list(range(r))
                perm[p0], perm[p1] = p1, p0
                gens.append(ident._replace_block(b, tuple(perm), None))
        if t == "D" and r >= 2:
            if ring.monoid.mode == ADDITIVE:
                raise NotImplementedError("type D blocks are only supported with multiplicative shifts")
            for j in range(1, r):
                signs = [1] * r
                signs[0] = signs[j] = -1
                gens.append(ident._replace_block(b, None, tuple(signs)))
    return gens


def orbit_sum(ring: SkewRing, a, mu: ShiftOp, cap: int = DEFAULT_GROUP_CAP) -> SkewElement:
    """``[a mu] = sum_{g in G/G_mu} g(a) (g mu g^-1)``; ``a`` must be ``G_mu``-fixed."""
    a = ring.coerce(a)
    for g in stabilizer(ring, mu):
        if apply_group(g, a) != a:
            raise StabilizerViolation(f"{a} is not fixed by the stabilizer element {g} of {mu}")
    out: dict[ShiftOp, RatFunc] = {}
    for g in ring.group.elements(cap):
        nu = ring.conjugate_shift(g, mu)
        if nu not in out:
            out[nu] = apply_group(g, a)
    return ring.element(out, check=False)


def dagger(X: SkewElement, allow_opposite: bool = False) -> SkewElement:
    """Anti-isomorphism fixing ``L`` and inverting shifts: ``(x mu)^+ = mu^-1(x) mu^-1``.

    When some support shift has no inverse in the monoid the image lives in
    ``L * M^-1``; this requires ``allow_opposite`` and the result is attached
    to the opposite ring.
    """
    ring = X.ring
    invertible = all(ring.monoid.is_invertible(mu) for mu in X.terms)
    if not invertible and not allow_opposite:
        bad = [mu for mu in X.terms if not ring.monoid.is_invertible(mu)]
        raise NonInvertibleShift(f"shifts {bad} have no inverse in the monoid")
    target = ring if invertible else ring.opposite()
    out = {}
    for mu, c in X.terms.items():
        inv = mu.inverse()
        out[inv] = ring.apply_shift(inv, c)
    return SkewElement(target, out)
