"""Galois orders over skew monoid rings of difference operators."""

from .arith import Poly, RatFunc, VarTable
from .certify import Certificate, Setting, certify_coprincipal, certify_principal, check_galois_ring, dedekind_witness
from .families import FamilyConfig, make_family
from .modules import CharacterPoint, build_cyclic_module, weight_report
from .skew import MonoidSpec, ShiftOp, SkewRing, dagger, evaluate, skew_mul
from .symmetry import GroupSpec

__version__ = "0.1.0"
