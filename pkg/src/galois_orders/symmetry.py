"""Products of symmetric groups and type-D signed permutation groups.

A :class:`GroupSpec` attaches one factor to every block of a
:class:`~galois_orders.arith.VarTable`: type ``"A"`` is the full symmetric
group on the block, type ``"D"`` is ``G(2,2,r)``, permutations together with
sign changes of even parity.  An element acts on variables by
``g(x[k,i]) = alpha[k][i] * x[k, sigma_k(i)]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .arith import NotDivisible, Poly, RatFunc, Scale, VarTable, exact_divide, substitute

__all__ = [
    "GroupSpec",
    "GroupElement",
    "GroupTooLarge",
    "TRIVIAL",
    "SGN",
    "LinearCharacter",
    "apply_group",
    "symmetrize",
    "is_relative_invariant",
    "is_invariant",
    "vandermonde",
    "q_vandermonde",
    "divide_by_relative_invariant",
    "invariant_generators",
    "elementary_symmetric",
]

DEFAULT_GROUP_CAP = 100_000


class GroupTooLarge(RuntimeError):
    pass


class GroupSpec:
    """One group factor per block of ``vt``."""

    def __init__(self, vt: VarTable, types: Sequence[str]):
        types = tuple(types)
        if len(types) != len(vt.blocks):
            raise ValueError(f"need one group type per block ({len(vt.blocks)}), got {len(types)}")
        for (b, _, laurent), t in zip(vt.blocks, types):
            if t not in ("A", "D"):
                raise ValueError(f"unknown group type {t!r} for block {b}")
            if t == "D" and not laurent:
                raise ValueError(f"type D requires a Laurent block; block {b} is polynomial")
        self.vt = vt
        self.types = types
        self.sizes = tuple(n for _, n, _ in vt.blocks)
        self._var_index = [vt.block_variables(b) for b, _, _ in vt.blocks]

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.vt == other.vt and self.types == other.types

    def __hash__(self):
        return hash((self.vt, self.types))

    def __repr__(self):
        return f"GroupSpec({''.join(self.types)}, sizes={self.sizes})"

    @property
    def order(self) -> int:
        out = 1
        for t, r in zip(self.types, self.sizes):
            out *= math.factorial(r) * (2 ** (r - 1) if t == "D" else 1)
        return out

    def identity(self) -> "GroupElement":
        return GroupElement(
            self,
            tuple(tuple(range(r)) for r in self.sizes),
            tuple((1,) * r for r in self.sizes),
        )

    def element(self, perms=None, signs=None) -> "GroupElement":
        """Build an element from 1-based permutations and sign vectors per block."""
        perms = perms or [None] * len(self.sizes)
        signs = signs or [None] * len(self.sizes)
        p = tuple(
            tuple(range(r)) if s is None else tuple(int(i) - 1 for i in s)
            for s, r in zip(perms, self.sizes)
        )
        a = tuple((1,) * r if s is None else tuple(int(x) for x in s) for s, r in zip(signs, self.sizes))
        return GroupElement(self, p, a)

    def generators(self) -> list["GroupElement"]:
        """Adjacent transpositions per block; D blocks add the flip of x1, x2."""
        gens = []
        ident = self.identity()
        for b, (t, r) in enumerate(zip(self.types, self.sizes)):
            for i in range(r - 1):
                perm = list(range(r))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                gens.append(ident._replace_block(b, tuple(perm), None))
            if t == "D" and r >= 2:
                signs = (-1, -1) + (1,) * (r - 2)
                gens.append(ident._replace_block(b, None, signs))
        return gens

    def elements(self, cap: int = DEFAULT_GROUP_CAP) -> Iterator["GroupElement"]:
        if self.order > cap:
            raise GroupTooLarge(f"group of order {self.order} exceeds enumeration cap {cap}")
        per_block = []
        for t, r in zip(self.types, self.sizes):
            perms = list(itertools.permutations(range(r)))
            if t == "D":
                signs = [s for s in itertools.product((1, -1), repeat=r) if math.prod(s) == 1]
            else:
                signs = [(1,) * r]
            per_block.append([(p, s) for p in perms for s in signs])
        for combo in itertools.product(*per_block):
            yield GroupElement(self, tuple(c[0] for c in combo), tuple(c[1] for c in combo))


@dataclass(frozen=True)
class GroupElement:
    """Block-wise permutation (0-based images) with sign vectors."""

    spec: GroupSpec
    perms: tuple[tuple[int, ...], ...]
    signs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for t, p, s in zip(self.spec.types, self.perms, self.signs):
            if sorted(p) != list(range(len(p))):
                raise ValueError(f"{p} is not a permutation")
            if any(x not in (1, -1) for x in s):
                raise ValueError(f"sign vector {s} must have entries +-1")
            if t == "A" and any(x != 1 for x in s):
                raise ValueError("type A blocks carry no sign changes")
            if math.prod(s) != 1:
                raise ValueError(f"sign vector {s} violates the product-one constraint")

    def _replace_block(self, b, perm, signs):
        perms = list(self.perms)
        sg = list(self.signs)
        if perm is not None:
            perms[b] = perm
        if signs is not None:
            sg[b] = signs
        return GroupElement(self.spec, tuple(perms), tuple(sg))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        # (g h)(x_i) = g(h(x_i)) = h_sign_i * g_sign_{h(i)} * x_{g(h(i))}
        perms = []
        signs = []
        for pg, sg, ph, sh in zip(self.perms, self.signs, other.perms, other.signs):
            perms.append(tuple(pg[ph[i]] for i in range(len(ph))))
            signs.append(tuple(sh[i] * sg[ph[i]] for i in range(len(ph))))
        return GroupElement(self.spec, tuple(perms), tuple(signs))

    def inverse(self) -> "GroupElement":
        perms = []
        signs = []
        for p, s in zip(self.perms, self.signs):
            inv = [0] * len(p)
            sig = [1] * len(p)
            for i, j in enumerate(p):
                inv[j] = i
                sig[j] = s[i]
            perms.append(tuple(inv))
            signs.append(tuple(sig))
        return GroupElement(self.spec, tuple(perms), tuple(signs))

    def is_identity(self) -> bool:
        return all(p == tuple(range(len(p))) for p in self.perms) and all(
            all(x == 1 for x in s) for s in self.signs
        )

    def sgn(self) -> int:
        out = 1
        for p in self.perms:
            out *= _perm_sign(p)
        return out

    def substitution(self) -> dict[int, Scale]:
        """Variable images as a substitution map keyed by variable index."""
        idx = self.spec._var_index
        out = {}
        for b, (p, s) in enumerate(zip(self.perms, self.signs)):
            for i, (j, a) in enumerate(zip(p, s)):
                if j != i or a != 1:
                    out[idx[b][i]] = Scale(Fraction(a), 0, idx[b][j])
        return out

    def variable_image(self, var_index: int) -> tuple[int, int]:
        """``(target index, sign)`` with ``g(x_var) = sign * x_target``."""
        for b, block in enumerate(self.spec._var_index):
            if var_index in block:
                i = block.index(var_index)
                return block[self.perms[b][i]], self.signs[b][i]
        return var_index, 1

    def __repr__(self):
        parts = []
        for t, p, s in zip(self.spec.types, self.perms, self.signs):
            one = tuple(i + 1 for i in p)
            parts.append(f"{one}{s}" if t == "D" else f"{one}")
        return f"GroupElement({', '.join(parts)})"


def _perm_sign(p: Sequence[int]) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class LinearCharacter:
    tag: str

    def __post_init__(self):
        if self.tag not in ("trivial", "sgn"):
            raise ValueError(f"unsupported character {self.tag!r}")

    def __call__(self, g: GroupElement) -> int:
        return 1 if self.tag == "trivial" else g.sgn()


TRIVIAL = LinearCharacter("trivial")
SGN = LinearCharacter("sgn")


def apply_group(g: GroupElement, a):
    """Apply ``g`` as an algebra automorphism; preserves Poly vs RatFunc."""
    sub = g.substitution()
    if not sub:
        return a
    r = substitute(a, sub)
    if isinstance(a, Poly):
        return r.as_poly()
    return r


def symmetrize(spec: GroupSpec, a, cap: int = DEFAULT_GROUP_CAP):
    """Reynolds operator ``(1/|G|) sum_g g(a)``."""
    total = None
    for g in spec.elements(cap):
        img = apply_group(g, a)
        total = img if total is None else total + img
    return total * Fraction(1, spec.order)


def is_relative_invariant(spec: GroupSpec, a, chi: LinearCharacter = TRIVIAL) -> bool:
    """Check ``g(a) == chi(g) a`` on the generators of the group."""
    for g in spec.generators():
        img = apply_group(g, a)
        if chi(g) == 1:
            if img != a:
                return False
        elif img != -a:
            return False
    return True


def is_invariant(spec: GroupSpec, a) -> bool:
    return is_relative_invariant(spec, a, TRIVIAL)


def vandermonde(spec: GroupSpec) -> Poly:
    """Product over blocks of ``prod_{i<j} (x_i - x_j)``."""
    if "D" in spec.types:
        raise ValueError("vandermonde is defined for type A blocks; use q_vandermonde")
    vt = spec.vt
    out = Poly.constant(vt, 1)
    for b, _, _ in vt.blocks:
        xs = [vt.gen(i) for i in vt.block_variables(b)]
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                out = out * (xs[i] - xs[j])
    return out


def q_vandermonde(spec: GroupSpec) -> RatFunc:
    """Product of ``((x_i/x_j) - (x_j/x_i)) / (q - q^-1)`` over ``i < j`` in each block."""
    vt = spec.vt
    if "q" not in vt.centrals:
        raise ValueError("q_vandermonde requires the central parameter q")
    if "A" in spec.types and any(t == "A" and r > 1 for t, r in zip(spec.types, spec.sizes)):
        raise ValueError("q_vandermonde is defined for type D blocks")
    q = vt.gen("q")
    scale = RatFunc(q) / (q * q - 1)  # 1/(q - q^-1)
    out = RatFunc(Poly.constant(vt, 1))
    for b, _, _ in vt.blocks:
        xs = [vt.gen(i) for i in vt.block_variables(b)]
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                # x_i/x_j - x_j/x_i = (x_i^2 - x_j^2) x_i^-1 x_j^-1
                out = out * RatFunc((xs[i] * xs[i] - xs[j] * xs[j]) * (xs[i] * xs[j]) ** -1) * scale
    return out


def d_sgn(spec: GroupSpec):
    """The sign-character relative invariant generating ``Lambda^G_sgn`` over ``Gamma``."""
    if "D" in spec.types:
        return q_vandermonde(spec)
    return vandermonde(spec)


def divide_by_relative_invariant(spec: GroupSpec, a, d):
    """Return ``a/d`` for a sgn-relative invariant ``a``, certified ``G``-invariant.

    Raises :class:`NotDivisible` when the quotient is not a Laurent
    polynomial in the block variables.
    """
    ra = a if isinstance(a, RatFunc) else RatFunc(a)
    rd = d if isinstance(d, RatFunc) else RatFunc(d)
    # a/d = (a.num * d.den) / (a.den * d.num); central-only denominators are scalars
    quotient = ra / rd
    if not quotient.is_laurent():
        num = ra.num * rd.den
        den = rd.num * ra.den
        exact_divide(num, den)  # raises with the remainder witness
        raise NotDivisible(num, den, quotient.den)
    if quotient * rd != ra:
        raise ArithmeticError("re-multiplication check failed")
    if not is_invariant(spec, quotient):
        raise ArithmeticError(f"quotient {quotient} is not G-invariant")
    if isinstance(a, Poly) and quotient.is_poly():
        return quotient.as_poly()
    return quotient


def elementary_symmetric(polys: Sequence[Poly], k: int) -> Poly:
    vt = polys[0].vt
    # coefficients of prod (1 + t x_i), built incrementally
    e = [Poly.constant(vt, 1)] + [Poly(vt)] * len(polys)
    for x in polys:
        for j in range(len(polys), 0, -1):
            e[j] = e[j] + e[j - 1] * x
    return e[k]


def invariant_generators(spec: GroupSpec) -> list[Poly]:
    """Invariant fingerprint set of ``Gamma``.

    Type A blocks give ``e_1 .. e_r``; type D blocks give ``e_1 .. e_{r-1}``
    of the squared variables together with ``P = x_1...x_r`` and ``P^-1``.
    Central parameters are not included.
    """
    vt = spec.vt
    out = []
    for (b, r, _), t in zip(vt.blocks, spec.types):
        xs = [vt.gen(i) for i in vt.block_variables(b)]
        if t == "A":
            out.extend(elementary_symmetric(xs, k) for k in range(1, r + 1))
        else:
            sq = [x * x for x in xs]
            out.extend(elementary_symmetric(sq, k) for k in range(1, r))
            prod = xs[0]
            for x in xs[1:]:
                prod = prod * x
            out.append(prod)
            out.append(prod ** -1)
    return out
