"""Concrete operator families and their settings.

Every constructor returns ``(setting, generators)`` where ``generators`` is
an ordered ``{name: SkewElement}`` dict.  Variables of row ``k`` live in
block ``k``; rows ``1..n-1`` are mobile and row ``n`` is fixed.  All
constructed generators are checked for ``G``-invariance.

Placement of coefficients:

* ``Xf``, ``ogz`` and ``finiteW`` put the coefficient to the left of the
  shift, ``X = sum A mu``, so ``d_sgn * X`` is a polynomial operator and the
  family is principal;
* ``qogz`` puts the shift on the left, ``X = sum delta^{+-1} A``, so the
  dagger image is ``sum A delta^{-+1}`` and the family is co-principal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .arith import Poly, RatFunc, VarTable
from .certify import Setting
from .skew import ADDITIVE, MULTIPLICATIVE, MonoidSpec, ShiftOp, SkewElement, SkewRing, is_invariant_skew
from .symmetry import GroupSpec, apply_group, is_invariant

__all__ = [
    "FamilyConfig",
    "EquivarianceViolation",
    "make_family",
    "make_Xf",
    "make_ogz",
    "make_qogz",
    "make_finite_w",
    "finite_w_A",
    "u_coefficients",
    "FAMILIES",
]

FAMILIES = ("Xf", "ogz", "qogz", "finiteW")
F_KINDS = ("power", "power_sum", "custom")


class EquivarianceViolation(ValueError):
    pass


@dataclass
class FamilyConfig:
    """Family selection and parameters.

    ``r`` is the signature (ogz, qogz), ``pi`` the shape (finiteW), ``n`` the
    number of variables (Xf).  ``J`` lists the rows keeping their negative
    generators; ``None`` means all of ``1..n-1``.

    For ``Xf`` the tuple ``f`` is chosen by ``f_kind``: ``power`` gives
    ``f_i = x_i^k``, ``power_sum`` gives ``f_i = x_1^k + ... + x_n^k`` for
    every ``i``, ``custom`` takes the strings in ``f``.  ``xf_step`` is the
    translation ``mu_i(x_i) = x_i + xf_step``.
    """

    family: str
    r: tuple[int, ...] = ()
    pi: tuple[int, ...] = ()
    n: int = 0
    J: tuple[int, ...] | None = None
    f_kind: str = "power"
    f_degree: int = 1
    f: tuple[str, ...] = ()
    xf_step: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        self.r = tuple(int(v) for v in self.r)
        self.pi = tuple(int(v) for v in self.pi)
        if self.family in ("ogz", "qogz"):
            if not self.r or any(v < 1 for v in self.r):
                raise ValueError(f"signature r must be a non-empty tuple of positive integers, got {self.r}")
            rows = len(self.r)
        elif self.family == "finiteW":
            if not self.pi or any(v < 1 for v in self.pi):
                raise ValueError(f"shape pi must be a non-empty tuple of positive integers, got {self.pi}")
            if any(a > b for a, b in zip(self.pi, self.pi[1:])):
                raise ValueError(f"shape pi must be weakly increasing, got {self.pi}")
            rows = len(self.pi)
        else:
            if self.n < 1:
                raise ValueError(f"Xf needs n >= 1, got {self.n}")
            if self.f_kind not in F_KINDS:
                raise ValueError(f"unknown f_kind {self.f_kind!r}")
            if self.f_kind == "custom" and len(self.f) != self.n:
                raise ValueError(f"custom f needs {self.n} entries, got {len(self.f)}")
            if self.f_degree < 0:
                raise ValueError("f_degree must be non-negative")
            if self.xf_step not in (1, -1):
                raise ValueError("xf_step must be +1 or -1")
            rows = 1
        if self.J is None:
            self.J = tuple(range(1, rows))
        else:
            self.J = tuple(sorted(set(int(j) for j in self.J)))
            bad = [j for j in self.J if not 1 <= j <= rows - 1]
            if bad:
                raise ValueError(f"parabolic set J must lie in 1..{rows - 1}, got {bad}")

    @property
    def rows(self) -> int:
        if self.family in ("ogz", "qogz"):
            return len(self.r)
        if self.family == "finiteW":
            return len(self.pi)
        return 1

    @classmethod
    def from_dict(cls, data: dict) -> "FamilyConfig":
        known = {k: data[k] for k in ("family", "r", "pi", "n", "J", "f_kind", "f_degree", "f", "xf_step") if k in data}
        if "f" in known:
            known["f"] = tuple(known["f"])
        return cls(**known)

    def to_dict(self) -> dict:
        out = {"family": self.family}
        if self.family in ("ogz", "qogz"):
            out["r"] = list(self.r)
        elif self.family == "finiteW":
            out["pi"] = list(self.pi)
        else:
            out.update(n=self.n, f_kind=self.f_kind, f_degree=self.f_degree, xf_step=self.xf_step)
            if self.f_kind == "custom":
                out["f"] = list(self.f)
        out["J"] = list(self.J)
        return out


def _check_invariant(gens: dict[str, SkewElement]) -> None:
    for name, X in gens.items():
        if not is_invariant_skew(X):
            raise EquivarianceViolation(f"generator {name} is not G-invariant")


def _row_monoid(vt: VarTable, rows: int, J: Sequence[int], mode: str) -> MonoidSpec:
    mobile, inv = [], []
    for k in range(1, rows):
        for i in vt.block_variables(k):
            mobile.append(i)
            inv.append(k in J)
    return MonoidSpec(tuple(mobile), mode, tuple(inv))


def _prod(items, one):
    out = one
    for x in items:
        out = out * x
    return out


# -- U(f) ---------------------------------------------------------------------


def _xf_f(vt: VarTable, cfg: FamilyConfig) -> list[Poly]:
    xs = [vt.x(1, i) for i in range(1, cfg.n + 1)]
    if cfg.f_kind == "power":
        return [x ** cfg.f_degree for x in xs]
    if cfg.f_kind == "power_sum":
        p = _prod([], Poly.constant(vt, 0))
        for x in xs:
            p = p + x ** cfg.f_degree
        return [p] * cfg.n
    out = []
    for s in cfg.f:
        v = vt.parse(s)
        if not v.is_poly():
            raise ValueError(f"f entries must be polynomials, got {s!r}")
        out.append(v.as_poly())
    return out


def make_Xf(cfg: FamilyConfig) -> tuple[Setting, dict[str, SkewElement]]:
    """``X_f = sum_i f_i / prod_{j != i}(x_j - x_i) mu_i`` on ``S_n`` with ``M = N^n``."""
    n = cfg.n
    vt = VarTable([(1, n, False)])
    group = GroupSpec(vt, ["A"])
    step = -cfg.xf_step  # x -> x - s
    monoid = MonoidSpec(tuple(range(n)), ADDITIVE, (False,) * n, (step,) * n)
    ring = SkewRing(vt, group, monoid)
    f = _xf_f(vt, cfg)
    # equivariance sigma(f_i) = f_sigma(i)
    for g in group.generators():
        for i in range(n):
            t, _ = g.variable_image(i)
            if apply_group(g, f[i]) != f[t]:
                raise EquivarianceViolation(f"f is not equivariant: {g} maps f_{i + 1} to {apply_group(g, f[i])}")
    xs = [vt.x(1, i) for i in range(1, n + 1)]
    terms = {}
    for i in range(n):
        den = _prod((xs[j] - xs[i] for j in range(n) if j != i), Poly.constant(vt, 1))
        terms[ShiftOp.unit(i, step)] = RatFunc(f[i], den)
    gens = {"Xf": ring.element(terms)}
    _check_invariant(gens)
    return Setting.build(ring, f"Xf(n={n})"), gens


# -- rational OGZ ---------------------------------------------------------------


def make_ogz(cfg: FamilyConfig) -> tuple[Setting, dict[str, SkewElement]]:
    """Rational OGZ algebra ``U_J(r)``: ``X_k^+-`` with ``delta^{ki}(x_ki) = x_ki - 1``."""
    r = cfg.r
    n = len(r)
    vt = VarTable([(k, r[k - 1], False) for k in range(1, n + 1)])
    group = GroupSpec(vt, ["A"] * n)
    ring = SkewRing(vt, group, _row_monoid(vt, n, cfg.J, ADDITIVE))
    one = Poly.constant(vt, 1)

    def x(k, i):
        return vt.x(k, i)

    def size(k):
        return r[k - 1] if 1 <= k <= n else 0

    gens = {}
    for k in range(1, n):
        for sign, label in ((1, "+"), (-1, "-")):
            if sign < 0 and k not in cfg.J:
                continue
            terms = {}
            for i in range(1, size(k) + 1):
                num = _prod((x(k + sign, j) - x(k, i) for j in range(1, size(k + sign) + 1)), one)
                den = _prod((x(k, j) - x(k, i) for j in range(1, size(k) + 1) if j != i), one)
                A = RatFunc(num * (-sign), den)
                mu = ShiftOp.unit(vt.index((k, i)), sign)
                terms[mu] = A
            gens[f"X{k}{label}"] = ring.element(terms)
    _check_invariant(gens)
    return Setting.build(ring, f"ogz(r={','.join(map(str, r))})"), gens


# -- quantum OGZ ----------------------------------------------------------------


def make_qogz(cfg: FamilyConfig) -> tuple[Setting, dict[str, SkewElement]]:
    """Quantum OGZ algebra ``U_q(r; J)`` with ``delta^{ki}(x_ki) = q^-1 x_ki``.

    Groups are ``G(2,2,r_k)`` (permutations with an even number of sign
    changes); generators are ``X_k^+- = sum_i (delta^{ki})^{+-1} . A_ki^+-``
    with the shift on the left.
    """
    r = cfg.r
    n = len(r)
    vt = VarTable([(k, r[k - 1], True) for k in range(1, n + 1)], centrals=("q",))
    group = GroupSpec(vt, ["D"] * n)
    ring = SkewRing(vt, group, _row_monoid(vt, n, cfg.J, MULTIPLICATIVE))
    one = RatFunc(Poly.constant(vt, 1))
    q = vt.gen("q")
    qq = RatFunc(q * q - 1, q)  # q - q^-1

    def x(k, i):
        return RatFunc(vt.x(k, i))

    def size(k):
        return r[k - 1] if 1 <= k <= n else 0

    def bracket(a, b):
        t = a / b
        return (t - t.inverse()) / qq

    gens = {}
    for k in range(1, n):
        for sign, label in ((1, "+"), (-1, "-")):
            if sign < 0 and k not in cfg.J:
                continue
            terms = {}
            for i in range(1, size(k) + 1):
                num = _prod((bracket(x(k + sign, j), x(k, i)) for j in range(1, size(k + sign) + 1)), one)
                den = _prod((bracket(x(k, j), x(k, i)) for j in range(1, size(k) + 1) if j != i), one)
                A = x(k, i) ** (-(size(k + sign) - size(k))) * num / den * (-sign)
                mu = ShiftOp.unit(vt.index((k, i)), sign)
                terms[mu] = ring.apply_shift(mu, A)
            gens[f"X{k}{label}"] = ring.element(terms)
    _check_invariant(gens)
    return Setting.build(ring, f"qogz(r={','.join(map(str, r))})"), gens


# -- finite W-algebras ----------------------------------------------------------


def _finite_w_vt(pi: Sequence[int]) -> VarTable:
    n = len(pi)
    # row r carries all x^k_{ri} with i <= r, k <= p_i, flattened
    return VarTable([(row, sum(pi[:row]), False) for row in range(1, n + 1)], centrals=("u",))


def finite_w_A(setting: Setting, row: int) -> Poly:
    """``A_row(u) = prod_{v in row} (u + v)``; its ``u``-coefficients lie in ``Gamma``."""
    vt = setting.vt
    u = vt.gen("u")
    return _prod((u + vt.gen(i) for i in vt.block_variables(row)), Poly.constant(vt, 1))


def make_finite_w(cfg: FamilyConfig, flat: bool = False) -> tuple[Setting, dict[str, SkewElement]]:
    """Finite W-algebra ``W_J(pi)`` via ``B_r^+-(u) = sum (delta^l_{rj})^{+-1} X^+-_{rlj}(u)``.

    With ``flat=False`` the generators are the ``u``-polynomial operators
    ``B1+``, ``B1-``, ...; with ``flat=True`` they are their
    ``u``-coefficients (see :func:`u_coefficients`).
    """
    pi = cfg.pi
    n = len(pi)
    vt = _finite_w_vt(pi)
    group = GroupSpec(vt, ["A"] * n)
    ring = SkewRing(vt, group, _row_monoid(vt, n, cfg.J, ADDITIVE))
    one = Poly.constant(vt, 1)
    u = vt.gen("u")

    def row_vars(row):
        if 1 <= row <= n:
            return [vt.gen(i) for i in vt.block_variables(row)]
        return []

    gens = {}
    for row in range(1, n):
        xs = row_vars(row)
        for sign, label in ((1, "+"), (-1, "-")):
            if sign < 0 and row not in cfg.J:
                continue
            nbr = row_vars(row + sign)
            terms = {}
            for a, xa in enumerate(xs):
                others = [xb for b, xb in enumerate(xs) if b != a]
                num = _prod((u + xb for xb in others), one) * _prod((y - xa for y in nbr), one)
                den = _prod((xb - xa for xb in others), one)
                mu = ShiftOp.unit(vt.block_variables(row)[a], sign)
                terms[mu] = RatFunc(num * (-sign), den)
            gens[f"B{row}{label}"] = ring.element(terms)
    _check_invariant(gens)
    setting = Setting.build(ring, f"finiteW(pi={','.join(map(str, pi))})")
    for row in range(1, n + 1):
        A = finite_w_A(setting, row)
        for d in range(A.degree_in(vt.index("u")) + 1):
            if not is_invariant(group, A.coefficient_in("u", d)):
                raise EquivarianceViolation(f"coefficient u^{d} of A_{row}(u) is not in Gamma")
    if flat:
        flat_gens = {}
        for name, B in gens.items():
            flat_gens.update(u_coefficients(B, name))
        return setting, flat_gens
    return setting, gens


def u_coefficients(X: SkewElement, name: str = "X") -> dict[str, SkewElement]:
    """Split an operator with coefficients polynomial in ``u`` into its ``u^d`` parts."""
    vt = X.ring.vt
    ui = vt.index("u")
    for c in X.terms.values():
        if c.den.degree_in(ui) > 0:
            raise ValueError("coefficient denominators must not involve u")
    top = max((c.num.degree_in(ui) for c in X.terms.values()), default=-1)
    out = {}
    for d in range(top + 1):
        part = {mu: RatFunc(c.num.coefficient_in(ui, d), c.den) for mu, c in X.terms.items()}
        elem = X.ring.element(part)
        if not elem.is_zero():
            out[f"{name}[u^{d}]"] = elem
    return out


def make_family(cfg: FamilyConfig | dict, flat: bool = True) -> tuple[Setting, dict[str, SkewElement]]:
    """Dispatch on ``cfg.family``; finite W generators are flattened by default."""
    if isinstance(cfg, dict):
        cfg = FamilyConfig.from_dict(cfg)
    if cfg.family == "Xf":
        return make_Xf(cfg)
    if cfg.family == "ogz":
        return make_ogz(cfg)
    if cfg.family == "qogz":
        return make_qogz(cfg)
    return make_finite_w(cfg, flat=flat)
