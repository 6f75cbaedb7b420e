"""Exact sparse Laurent polynomials and rational functions over Q.

Polynomial kernels (multiplication, gcd, exact division, composition) are
delegated to FLINT's ``fmpq_mpoly`` through python-flint.  This module adds
what FLINT does not model directly:

* Laurent variables (per block) and the Laurent central parameter ``q``;
  a Laurent polynomial is stored as ``P * x^shift`` with ``P`` an ordinary
  polynomial not divisible by any Laurent variable;
* a canonical rational-function form ``num/den`` where ``den`` is an
  ordinary, integer-primitive polynomial with positive leading coefficient
  under graded-lex order, coprime to ``num`` and free of Laurent monomial
  factors.  Equal values therefore have identical representations;
* substitutions realising translations, signed permutations and
  ``q``-scalings of variables;
* a small infix parser/printer (``x[1,2]``, ``q``, ``u``, ``^``, ``*``, ``/``).

All objects are immutable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import flint

__all__ = [
    "VarTable",
    "Poly",
    "RatFunc",
    "Translate",
    "Scale",
    "NotDivisible",
    "DenominatorVanishes",
    "SubstitutionError",
    "poly_arith",
    "gcd_poly",
    "exact_divide",
    "substitute",
    "evaluate_at_point",
    "parse",
]

CENTRAL_NAMES = ("q", "u")


class NotDivisible(ArithmeticError):
    """Raised by exact division; ``remainder`` is the division witness."""

    def __init__(self, dividend, divisor, remainder):
        self.dividend = dividend
        self.divisor = divisor
        self.remainder = remainder
        super().__init__(f"{divisor} does not divide {dividend} (remainder {remainder})")


class DenominatorVanishes(ZeroDivisionError):
    def __init__(self, value, point, factor=None):
        self.value = value
        self.point = point
        self.factor = factor
        msg = f"denominator of {value} vanishes at {point}"
        if factor is not None:
            msg += f" (factor {factor})"
        super().__init__(msg)


class SubstitutionError(ValueError):
    pass


def _fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, flint.fmpz):
        return flint.fmpq(c)
    raise TypeError(f"not an exact rational: {c!r}")


def _frac(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class VarTable:
    """Ordered variable table: blocks of indexed variables plus centrals.

    ``blocks`` is a sequence of ``(block_id, count, laurent)``; variable ids
    are ``(block_id, i)`` with ``1 <= i <= count``.  ``centrals`` is a subset
    of ``("q", "u")``; ``q`` is always Laurent, ``u`` never is.
    """

    def __init__(self, blocks: Sequence[tuple[int, int, bool]], centrals: Iterable[str] = ()):
        blocks = tuple((int(b), int(n), bool(l)) for b, n, l in blocks)
        ids = [b for b, _, _ in blocks]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate block ids in {ids}")
        for b, n, _ in blocks:
            if n < 1:
                raise ValueError(f"block {b} has non-positive size {n}")
        centrals = tuple(centrals)
        for c in centrals:
            if c not in CENTRAL_NAMES:
                raise ValueError(f"unknown central parameter {c!r}")
        if len(set(centrals)) != len(centrals):
            raise ValueError("duplicate central parameter")
        # fixed order keeps the canonical form independent of user ordering
        centrals = tuple(c for c in CENTRAL_NAMES if c in centrals)
        self.blocks = blocks
        self.centrals = centrals
        self.variables: tuple = tuple(
            (b, i) for b, n, _ in blocks for i in range(1, n + 1)
        ) + centrals
        laurent = [l for _, n, l in blocks for _ in range(n)]
        laurent += [c == "q" for c in centrals]
        self.laurent = tuple(laurent)
        self.laurent_indices = tuple(i for i, l in enumerate(laurent) if l)
        self.N = len(self.variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        names = tuple(
            f"x{v[0]}_{v[1]}" if isinstance(v, tuple) else v for v in self.variables
        )
        self.ctx = flint.fmpq_mpoly_ctx.get(names, "deglex")
        self.zero_shift = (0,) * self.N
        self._key = (blocks, centrals)

    def __eq__(self, other):
        return isinstance(other, VarTable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"VarTable(blocks={list(self.blocks)}, centrals={list(self.centrals)})"

    def index(self, var) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r}") from None

    def name(self, i: int) -> str:
        v = self.variables[i]
        if isinstance(v, tuple):
            return f"x[{v[0]},{v[1]}]"
        return v

    def block_variables(self, block_id: int) -> list[int]:
        return [i for i, v in enumerate(self.variables) if isinstance(v, tuple) and v[0] == block_id]

    def block_is_laurent(self, block_id: int) -> bool:
        for b, _, l in self.blocks:
            if b == block_id:
                return l
        raise KeyError(block_id)

    def is_central(self, i: int) -> bool:
        return not isinstance(self.variables[i], tuple)

    def gen(self, var) -> "Poly":
        i = var if isinstance(var, int) else self.index(var)
        return Poly(self, self.ctx.gens()[i], self.zero_shift)

    def x(self, block: int, i: int) -> "Poly":
        return self.gen((block, i))

    def monomial(self, exps: Mapping | Sequence[int], coeff=1) -> "Poly":
        if isinstance(exps, Mapping):
            vec = [0] * self.N
            for v, e in exps.items():
                vec[v if isinstance(v, int) else self.index(v)] = int(e)
        else:
            vec = list(exps)
        return Poly.from_terms(self, {tuple(vec): coeff})

    def const(self, c) -> "Poly":
        return Poly.constant(self, c)

    def rat(self, c) -> "RatFunc":
        return RatFunc(Poly.constant(self, c))

    def parse(self, text: str) -> "RatFunc":
        return parse(self, text)


def _strip_laurent(vt: VarTable, p, shift):
    """Move Laurent monomial content of ``p`` into ``shift``."""
    if p.is_zero():
        return p, vt.zero_shift
    if not vt.laurent_indices:
        return p, shift
    monoms = p.monoms()
    mins = [0] * vt.N
    found = False
    for i in vt.laurent_indices:
        m = int(min(e[i] for e in monoms))
        if m:
            mins[i] = m
            found = True
    if not found:
        return p, shift
    p = p / vt.ctx.term(exp_vec=tuple(mins))
    return p, tuple(s + m for s, m in zip(shift, mins))


class Poly:
    """Laurent polynomial ``P * x^shift`` with exact rational coefficients.

    Negative exponents are only allowed on Laurent-flagged variables.  The
    pair ``(P, shift)`` is canonical: ``P`` has no Laurent monomial factor.
    """

    __slots__ = ("vt", "p", "shift")

    def __init__(self, vt: VarTable, p=None, shift=None):
        if p is None:
            p = vt.ctx.constant(0)
        shift = vt.zero_shift if shift is None else tuple(shift)
        for i, s in enumerate(shift):
            if s < 0 and not vt.laurent[i]:
                raise ValueError(f"negative exponent on non-Laurent variable {vt.name(i)}")
        p, shift = _strip_laurent(vt, p, shift)
        self.vt = vt
        self.p = p
        self.shift = shift

    @classmethod
    def _raw(cls, vt, p, shift):
        obj = object.__new__(cls)
        obj.vt = vt
        obj.p = p
        obj.shift = shift
        return obj

    @classmethod
    def constant(cls, vt: VarTable, c) -> "Poly":
        return cls._raw(vt, vt.ctx.constant(_fmpq(c)), vt.zero_shift)

    @classmethod
    def from_terms(cls, vt: VarTable, terms: Mapping[Sequence[int], object]) -> "Poly":
        """Build from ``{exponent vector: coefficient}``; exponents may be negative."""
        terms = {tuple(int(e) for e in k): _fmpq(c) for k, c in terms.items()}
        terms = {k: c for k, c in terms.items() if c != 0}
        if not terms:
            return cls(vt)
        for k in terms:
            if len(k) != vt.N:
                raise ValueError(f"exponent vector {k} has wrong length (expected {vt.N})")
        mins = tuple(min(min(k[i] for k in terms), 0) for i in range(vt.N))
        for i, m in enumerate(mins):
            if m < 0 and not vt.laurent[i]:
                raise ValueError(f"negative exponent on non-Laurent variable {vt.name(i)}")
        shifted = {tuple(e - m for e, m in zip(k, mins)): c for k, c in terms.items()}
        return cls(vt, vt.ctx.from_dict(shifted), mins)

    # -- inspection -------------------------------------------------------

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Terms in canonical (descending graded-lex) order."""
        s = self.shift
        return {
            tuple(int(e) + d for e, d in zip(k, s)): _frac(c) for k, c in self.p.terms()
        }

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def is_constant(self) -> bool:
        return self.p.is_constant() and not any(self.shift)

    def is_monomial(self) -> bool:
        return len(self.p) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _frac(self.p.leading_coefficient()) if not self.p.is_zero() else Fraction(0)

    def involves(self) -> set[int]:
        """Indices of variables occurring in the polynomial."""
        if self.p.is_zero():
            return set()
        degs = self.p.degrees()
        return {i for i in range(self.vt.N) if degs[i] > 0 or self.shift[i] != 0}

    def degree_in(self, i: int) -> int:
        return int(self.p.degrees()[i]) + self.shift[i]

    def total_degree(self) -> int:
        return max(sum(k) for k in self.terms()) if not self.is_zero() else -1

    def __len__(self):
        return len(self.p)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.vt is not self.vt and other.vt != self.vt:
                raise ValueError("polynomials over different variable tables")
            return other
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return Poly.constant(self.vt, other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.shift == other.shift:
            return Poly(self.vt, self.p + other.p, self.shift)
        lo = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        ctx = self.vt.ctx
        a = self.p * ctx.term(exp_vec=tuple(s - m for s, m in zip(self.shift, lo)))
        b = other.p * ctx.term(exp_vec=tuple(s - m for s, m in zip(other.shift, lo)))
        return Poly(self.vt, a + b, lo)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.vt, -self.p, self.shift)

    def __sub__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p * other.p
        if p.is_zero():
            return Poly(self.vt)
        # product of polynomials free of Laurent monomial factors stays free
        return Poly._raw(self.vt, p, tuple(a + b for a, b in zip(self.shift, other.shift)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RatFunc(self) / other

    def __rtruediv__(self, other):
        return RatFunc(Poly.constant(self.vt, other) if not isinstance(other, Poly) else other) / self

    def __pow__(self, n: int):
        if n < 0:
            if self.is_monomial():
                k, c = next(iter(self.terms().items()))
                return Poly.from_terms(self.vt, {tuple(n * e for e in k): Fraction(1) / c ** (-n)})
            return RatFunc(self) ** n
        return Poly._raw(self.vt, self.p ** n, tuple(n * s for s in self.shift)) if n else Poly.constant(self.vt, 1)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return other == self
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.vt, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vt == other.vt and self.shift == other.shift and self.p == other.p

    def __hash__(self):
        return hash((tuple(self.p.terms()).__repr__(), self.shift))

    def __bool__(self):
        return not self.p.is_zero()

    def __str__(self):
        return _format_poly(self)

    def __repr__(self):
        return f"Poly({self})"

    # -- helpers ----------------------------------------------------------

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """Split into ``(content, primitive part)`` with positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        c = _content(self.p)
        return _frac(c), Poly._raw(self.vt, self.p / c, self.shift)

    def evaluate(self, point: Mapping) -> Fraction:
        return _eval_poly(self, _point_vector(self.vt, point))

    def coefficient_in(self, var, d: int) -> "Poly":
        """Coefficient of ``var^d`` viewing ``self`` as a polynomial in ``var``."""
        i = var if isinstance(var, int) else self.vt.index(var)
        out = {}
        for k, c in self.terms().items():
            if k[i] == d:
                k = list(k)
                k[i] = 0
                out[tuple(k)] = c
        return Poly.from_terms(self.vt, out)


def _content(p) -> flint.fmpq:
    """Rational content of ``p`` signed by its leading coefficient."""
    num = 0
    den = 1
    for c in p.coeffs():
        num = math.gcd(num, int(c.p))
        den = den * int(c.q) // math.gcd(den, int(c.q))
    c = flint.fmpq(num, den)
    return -c if p.leading_coefficient() < 0 else c


class RatFunc:
    """Normalised quotient ``num/den`` of a Laurent polynomial by a polynomial."""

    __slots__ = ("vt", "num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RatFunc):
            if den is None:
                self.vt, self.num, self.den = num.vt, num.num, num.den
                return
            r = num / den
            self.vt, self.num, self.den = r.vt, r.num, r.den
            return
        vt = num.vt
        if den is None:
            self.vt, self.num, self.den = vt, num, Poly.constant(vt, 1)
            return
        if isinstance(den, RatFunc):
            r = RatFunc(num) / den
            self.vt, self.num, self.den = r.vt, r.num, r.den
            return
        if not isinstance(den, Poly):
            den = Poly.constant(vt, den)
        self.vt = vt
        self.num, self.den = _normalize(vt, num.p, num.shift, den.p, den.shift)

    @classmethod
    def _raw(cls, vt, num, den):
        obj = object.__new__(cls)
        obj.vt = vt
        obj.num = num
        obj.den = den
        return obj

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.p.is_zero()

    def is_poly(self) -> bool:
        return self.den.p.is_one()

    def is_laurent(self) -> bool:
        """True when the denominator involves central parameters only.

        ``q``- and ``u``-polynomials are scalars of the coefficient field at
        every admissible specialisation, so such elements count as Laurent
        polynomials in the block variables.
        """
        if self.den.p.is_one():
            return True
        degs = self.den.p.degrees()
        return all(degs[i] == 0 for i in range(self.vt.N) if not self.vt.is_central(i))

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def involves(self) -> set[int]:
        return self.num.involves() | self.den.involves()

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc._raw(other.vt, other, Poly.constant(other.vt, 1))
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return RatFunc._raw(self.vt, Poly.constant(self.vt, other), Poly.constant(self.vt, 1))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        vt = self.vt
        if self.den.p == other.den.p:
            n = self.num + other.num
            if self.den.p.is_one():
                return RatFunc._raw(vt, n, self.den)
            num, den = _normalize(vt, n.p, n.shift, self.den.p, vt.zero_shift)
            return RatFunc._raw(vt, num, den)
        d1, d2 = self.den.p, other.den.p
        g = d1.gcd(d2)
        if g.is_one():
            n = self.num * Poly._raw(vt, d2, vt.zero_shift) + other.num * Poly._raw(vt, d1, vt.zero_shift)
            num, den = _normalize(vt, n.p, n.shift, d1 * d2, vt.zero_shift)
        else:
            c1 = d2 / g
            c2 = d1 / g
            n = self.num * Poly._raw(vt, c1, vt.zero_shift) + other.num * Poly._raw(vt, c2, vt.zero_shift)
            num, den = _normalize(vt, n.p, n.shift, d1 * c1, vt.zero_shift)
        return RatFunc._raw(vt, num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(self.vt, -self.num, self.den)

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
        vt = self.vt
        if self.num.is_zero() or other.num.is_zero():
            return RatFunc._raw(vt, Poly(vt), Poly.constant(vt, 1))
        if self.den.p.is_one() and other.den.p.is_one():
            return RatFunc._raw(vt, self.num * other.num, self.den)
        # cross-cancellation keeps the gcds small
        a, b = self.num.p, other.num.p
        da, db = self.den.p, other.den.p
        g1 = a.gcd(db) if not db.is_one() else None
        g2 = b.gcd(da) if not da.is_one() else None
        if g1 is not None and not g1.is_one():
            a, db = a / g1, db / g1
        if g2 is not None and not g2.is_one():
            b, da = b / g2, da / g2
        shift = tuple(x + y for x, y in zip(self.num.shift, other.num.shift))
        num, den = _normalize(vt, a * b, shift, da * db, vt.zero_shift, coprime=True)
        return RatFunc._raw(vt, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        vt = self.vt
        num, den = _normalize(
            vt, self.den.p, tuple(-s for s in self.num.shift), self.num.p, vt.zero_shift, coprime=True
        )
        return RatFunc._raw(vt, num, den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc(Poly.constant(self.vt, 1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((hash(self.num), hash(self.den)))

    def __bool__(self):
        return not self.num.is_zero()

    def __str__(self):
        if self.den.p.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"

    def evaluate(self, point: Mapping) -> Fraction:
        return evaluate_at_point(self, point)


def _normalize(vt, np_, nshift, dp, dshift, coprime=False):
    """Canonical ``(num, den)`` for ``(np_*x^nshift) / (dp*x^dshift)``."""
    if dp.is_zero():
        raise ZeroDivisionError("zero denominator")
    if np_.is_zero():
        return Poly(vt), Poly.constant(vt, 1)
    dp, dshift = _strip_laurent(vt, dp, tuple(dshift))
    if any(dshift):
        nshift = tuple(a - b for a, b in zip(nshift, dshift))
    if not coprime and not dp.is_constant():
        g = np_.gcd(dp)
        if not g.is_one():
            np_ = np_ / g
            dp = dp / g
    c = _content(dp)
    if c != 1:
        np_ = np_ / c
        dp = dp / c
    num = Poly._raw(vt, np_, tuple(nshift))
    num_p, num_s = _strip_laurent(vt, np_, tuple(nshift))
    if num_p is not np_:
        num = Poly._raw(vt, num_p, num_s)
    return num, Poly._raw(vt, dp, vt.zero_shift)


# ---------------------------------------------------------------------------
# public operations


def _as_rat(a) -> RatFunc:
    if isinstance(a, RatFunc):
        return a
    if isinstance(a, Poly):
        return RatFunc(a)
    raise TypeError(f"expected Poly or RatFunc, got {type(a).__name__}")


def poly_arith(a, b, kind: str) -> RatFunc:
    """Exact ``add``/``sub``/``mul`` of two polynomials or rational functions."""
    a, b = _as_rat(a), _as_rat(b)
    if a.vt != b.vt:
        raise ValueError("operands over different variable tables")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def gcd_poly(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor, primitive over Z with positive leading coefficient.

    Laurent monomials are units, so only the ordinary parts are compared.
    """
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    vt = a.vt
    g = a.p.gcd(b.p)
    g, _ = _strip_laurent(vt, g, vt.zero_shift)
    return Poly._raw(vt, g / _content(g), vt.zero_shift)


def exact_divide(a: Poly, b: Poly) -> Poly:
    """Return ``c`` with ``a == b*c``; raise :class:`NotDivisible` otherwise."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    vt = a.vt
    if a.is_zero():
        return Poly(vt)
    quo, rem = divmod(a.p, b.p)
    if not rem.is_zero():
        raise NotDivisible(a, b, Poly(vt, rem, a.shift))
    shift = tuple(x - y for x, y in zip(a.shift, b.shift))
    for i, s in enumerate(shift):
        if s < 0 and not vt.laurent[i]:
            raise NotDivisible(a, b, Poly.constant(vt, 0))
    return Poly(vt, quo, shift)


# -- substitution -------------------------------------------------------------


@dataclass(frozen=True)
class Translate:
    """Image ``x -> x + offset``."""

    offset: Fraction


@dataclass(frozen=True)
class Scale:
    """Image ``x -> coeff * q^qpow * target`` (``target`` defaults to ``x``)."""

    coeff: Fraction = Fraction(1)
    qpow: int = 0
    target: object = None


def _monomial_map_poly(vt: VarTable, a: Poly, images: dict[int, tuple[int, Fraction, int]]) -> Poly:
    """Apply ``x_i -> c_i q^{k_i} x_{t_i}`` termwise."""
    qi = vt.index("q") if "q" in vt.centrals else None
    out: dict[tuple[int, ...], flint.fmpq] = {}
    shift = a.shift
    for k, c in a.p.terms():
        e = [int(x) + s for x, s in zip(k, shift)]
        new = [0] * vt.N
        coeff = c
        for i, ex in enumerate(e):
            if not ex:
                continue
            img = images.get(i)
            if img is None:
                new[i] += ex
                continue
            t, sc, qp = img
            new[t] += ex
            if sc != 1:
                coeff = coeff * _fmpq(sc ** ex)
            if qp:
                new[qi] += qp * ex
        key = tuple(new)
        out[key] = out.get(key, 0) + coeff
    for key in out:
        for i, ex in enumerate(key):
            if ex < 0 and not vt.laurent[i]:
                raise SubstitutionError(
                    f"substitution produces negative exponent on non-Laurent variable {vt.name(i)}"
                )
    return Poly.from_terms(vt, out)


def _translate_parts(vt: VarTable, r: RatFunc, offsets: dict[int, Fraction]) -> RatFunc:
    gens = vt.ctx.gens()
    images = [gens[i] + _fmpq(offsets[i]) if i in offsets else gens[i] for i in range(vt.N)]
    pos = tuple(max(s, 0) for s in r.num.shift)
    neg = tuple(max(-s, 0) for s in r.num.shift)
    n = r.num.p * vt.ctx.term(exp_vec=pos) if any(pos) else r.num.p
    d = r.den.p * vt.ctx.term(exp_vec=neg) if any(neg) else r.den.p
    n2 = n.compose(*images) if any(i in offsets for i in _degree_support(n)) else n
    d2 = d.compose(*images) if any(i in offsets for i in _degree_support(d)) else d
    num, den = _normalize(vt, n2, vt.zero_shift, d2, vt.zero_shift)
    return RatFunc._raw(vt, num, den)


def _degree_support(p) -> list[int]:
    if p.is_zero():
        return []
    return [i for i, d in enumerate(p.degrees()) if d > 0]


def substitute(a, mapping: Mapping) -> RatFunc:
    """Simultaneous substitution of variables.

    ``mapping`` sends variable ids (or indices) to :class:`Translate` or
    :class:`Scale` images.  Translations are applied first; they only touch
    their own variable so the composite equals the simultaneous map.
    """
    r = _as_rat(a)
    vt = r.vt
    offsets: dict[int, Fraction] = {}
    mono: dict[int, tuple[int, Fraction, int]] = {}
    for var, img in mapping.items():
        i = var if isinstance(var, int) else vt.index(var)
        if isinstance(img, Translate):
            if img.offset:
                offsets[i] = Fraction(img.offset)
        elif isinstance(img, Scale):
            t = i if img.target is None else (img.target if isinstance(img.target, int) else vt.index(img.target))
            if img.qpow and "q" not in vt.centrals:
                raise SubstitutionError("q-scaling requested without central parameter q")
            if t != i or img.coeff != 1 or img.qpow:
                mono[i] = (t, Fraction(img.coeff), int(img.qpow))
        else:
            raise SubstitutionError(f"unsupported image {img!r} for {vt.name(i)}")
    if offsets:
        r = _translate_parts(vt, r, offsets)
    if mono:
        num = _monomial_map_poly(vt, r.num, mono)
        den = _monomial_map_poly(vt, r.den, mono)
        n2, d2 = _normalize(vt, num.p, num.shift, den.p, den.shift)
        r = RatFunc._raw(vt, n2, d2)
    return r


# -- evaluation ---------------------------------------------------------------


def _point_vector(vt: VarTable, point: Mapping) -> list[Fraction]:
    vals = [None] * vt.N
    for k, v in point.items():
        i = k if isinstance(k, int) else vt.index(k)
        vals[i] = Fraction(v)
    missing = [vt.name(i) for i, v in enumerate(vals) if v is None]
    if missing:
        raise ValueError(f"point does not assign {', '.join(missing)}")
    return vals


def _eval_poly(a: Poly, vals: Sequence[Fraction]) -> Fraction:
    args = [flint.fmpq(v.numerator, v.denominator) for v in vals]
    v = _frac(a.p(*args)) if not a.p.is_zero() else Fraction(0)
    for i, s in enumerate(a.shift):
        if s:
            if vals[i] == 0:
                if s < 0:
                    raise DenominatorVanishes(a, vals, factor=a.vt.name(i))
                return Fraction(0)
            v *= vals[i] ** s
    return v


def evaluate_at_point(a, point: Mapping) -> Fraction:
    """Exact value of ``a`` at a point assigning every variable.

    Raises :class:`DenominatorVanishes` naming a vanishing irreducible factor
    of the denominator.
    """
    r = _as_rat(a)
    vt = r.vt
    vals = _point_vector(vt, point)
    for i, s in enumerate(r.num.shift):
        if s < 0 and vals[i] == 0:
            raise DenominatorVanishes(r, point, factor=vt.name(i))
    den = _eval_poly(r.den, vals)
    if den == 0:
        raise DenominatorVanishes(r, point, factor=vanishing_factor(r.den, vals))
    return _eval_poly(r.num, vals) / den


def vanishing_factor(den: Poly, vals: Sequence[Fraction]) -> Poly | None:
    """An irreducible factor of ``den`` vanishing at ``vals`` (diagnostics only)."""
    _, factors = den.p.factor()
    args = [flint.fmpq(v.numerator, v.denominator) for v in vals]
    for f, _ in factors:
        if f(*args) == 0:
            g = Poly(den.vt, f)
            return g.primitive()[1]
    return None


# -- printing and parsing -------------------------------------------------------


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_poly(a: Poly) -> str:
    if a.is_zero():
        return "0"
    vt = a.vt
    parts = []
    for k, c in a.terms().items():
        factors = []
        for i, e in enumerate(k):
            if e == 0:
                continue
            name = vt.name(i)
            factors.append(name if e == 1 else f"{name}^{e}")
        neg = c < 0
        mag = -c if neg else c
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_format_coeff(mag)}*{body}"
        else:
            body = _format_coeff(mag)
        parts.append((neg, body))
    out = ("-" if parts[0][0] else "") + parts[0][1]
    for neg, body in parts[1:]:
        out += (" - " if neg else " + ") + body
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|(x\[\s*-?\d+\s*,\s*\d+\s*\])|([qu])|(\S))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SyntaxError(f"cannot tokenize {text[pos:]!r}")
        num, var, central, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif var is not None:
            tokens.append(("var", var))
        elif central is not None:
            tokens.append(("var", central))
        else:
            if op not in "+-*/^()":
                raise SyntaxError(f"unexpected character {op!r} in {text!r}")
            tokens.append(("op", op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, vt: VarTable, text: str):
        self.vt = vt
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise SyntaxError(f"expected {value or 'token'} in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> RatFunc:
        r = self.expr()
        if self.pos != len(self.tokens):
            raise SyntaxError(f"trailing input in {self.text!r}")
        return r

    def expr(self):
        r = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            r = r + rhs if op == "+" else r - rhs
        return r

    def term(self):
        r = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            r = r * rhs if op == "*" else r / rhs
        return r

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            paren = self.peek() == ("op", "(")
            if paren:
                self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num":
                raise SyntaxError(f"integer exponent expected in {self.text!r}")
            if paren:
                self.take(")")
            return base ** (sign * int(val))
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return RatFunc(Poly.constant(self.vt, int(val)))
        if kind == "var":
            self.take()
            if val in CENTRAL_NAMES:
                return RatFunc(self.vt.gen(val))
            b, i = (int(s) for s in val[2:-1].split(","))
            return RatFunc(self.vt.gen((b, i)))
        if (kind, val) == ("op", "("):
            self.take()
            r = self.expr()
            self.take(")")
            return r
        raise SyntaxError(f"unexpected token {val!r} in {self.text!r}")


def parse(vt: VarTable, text: str) -> RatFunc:
    """Parse infix text such as ``(x[1,1] - q^-1*x[1,2])/(x[1,1] + 2)``."""
    return _Parser(vt, text).parse()


Value = Union[Poly, RatFunc]
