"""Seeded random samplers for polynomials, operators and generic points."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .arith import Poly, RatFunc, VarTable
from .certify import Setting
from .skew import SkewElement, SkewRing
from .symmetry import GroupSpec, invariant_generators

__all__ = [
    "random_poly",
    "random_ratfunc",
    "random_skew",
    "random_invariant",
    "generic_point",
]


def _coeff(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 1, 2, 3]))


def random_poly(vt: VarTable, rng: random.Random, degree: int = 3, terms: int = 3,
                variables: Sequence[int] | None = None) -> Poly:
    """Sparse random polynomial; Laurent variables may get negative exponents."""
    idx = list(range(vt.N)) if variables is None else list(variables)
    out = {}
    for _ in range(terms):
        e = [0] * vt.N
        budget = rng.randint(0, degree)
        for _ in range(budget):
            i = rng.choice(idx)
            if vt.laurent[i] and rng.random() < 0.3:
                e[i] -= 1
            else:
                e[i] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + _coeff(rng)
    return Poly.from_terms(vt, out)


def random_ratfunc(vt: VarTable, rng: random.Random, degree: int = 3,
                   variables: Sequence[int] | None = None) -> RatFunc:
    num = random_poly(vt, rng, degree, 2, variables)
    den = random_poly(vt, rng, max(1, degree - 1), 2, variables)
    while den.is_zero():
        den = random_poly(vt, rng, max(1, degree - 1), 2, variables)
    return RatFunc(num, den)


def random_skew(ring: SkewRing, rng: random.Random, terms: int = 2, degree: int = 3,
                max_step: int = 1) -> SkewElement:
    """Random element of ``L * M`` with admissible shifts and rational coefficients."""
    monoid = ring.monoid
    out = {}
    for _ in range(terms):
        while True:
            vec = [rng.randint(-max_step, max_step) for _ in monoid.mobile]
            mu = monoid.from_vector(vec)
            if monoid.admissible(mu):
                break
        c = random_ratfunc(ring.vt, rng, degree) if rng.random() < 0.5 else RatFunc(random_poly(ring.vt, rng, degree))
        out[mu] = out[mu] + c if mu in out else c
    return ring.element(out)


def random_invariant(group: GroupSpec, rng: random.Random, degree: int = 3, terms: int = 3) -> Poly:
    """Random polynomial in the invariant generators (each product of weighted degree <= ``degree``)."""
    vt = group.vt
    base = invariant_generators(group)
    out = Poly.constant(vt, _coeff(rng))
    for _ in range(terms):
        m = Poly.constant(vt, _coeff(rng))
        for _ in range(rng.randint(1, degree)):
            m = m * rng.choice(base)
        out = out + m
    return out


def generic_point(setting: Setting, rng: random.Random, q=None):
    """A random point whose coordinates have distinct prime denominators.

    Differences of two coordinates are then never integers and ratios are
    never powers of an integer ``q``, which keeps every shifted point off
    the walls where the standard families have poles.
    """
    from .modules import CharacterPoint

    vt = setting.vt
    slots = [i for i in range(vt.N) if not vt.is_central(i)]
    if len(slots) > len(_PRIMES):
        raise ValueError(f"generic_point supports at most {len(_PRIMES)} coordinates")
    primes = rng.sample(_PRIMES, len(slots))
    vals = []
    for p in primes:
        n = rng.randint(1, 4 * p)
        while n % p == 0:
            n = rng.randint(1, 4 * p)
        vals.append(Fraction(rng.choice([-1, 1]) * n, p))
    return CharacterPoint(vt, tuple(vals), q, "sampled")


_PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79]
