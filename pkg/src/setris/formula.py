"""Constraint algebra: atoms, their connectives, and derived-constraint expansion."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Kind", "Atom", "And", "Or", "Formula", "TRUE", "FALSE", "conj", "disj_of",
    "expand_derived", "to_dnf", "negate", "atoms_of", "PRIMITIVE", "DERIVED", "INTEGER",
    "eq", "neq", "member", "nmember", "un", "disj", "subset", "inters", "diff",
    "nun", "ndisj", "nsubset", "ninters", "ndiff", "size", "le", "lt", "ge", "gt",
]


class Kind(enum.Enum):
    EQ = "eq"
    NEQ = "neq"
    IN = "in"
    NIN = "nin"
    UN = "un"
    DISJ = "disj"
    SUBSET = "subset"
    INTERS = "inters"
    DIFF = "diff"
    NUN = "nun"
    NDISJ = "ndisj"
    NSUBSET = "nsubset"
    NINTERS = "ninters"
    NDIFF = "ndiff"
    SIZE = "size"
    LE = "le"
    LT = "lt"
    GE = "ge"
    GT = "gt"
    INTEQ = "inteq"
    INTNEQ = "intneq"
    TRUE = "true"
    FALSE = "false"
    # internal: negated size (true for non-sets), and a labeling request
    NSIZE = "nsize"
    LABEL = "label"


ARITY = {k: 2 for k in Kind}
ARITY.update({Kind.UN: 3, Kind.INTERS: 3, Kind.DIFF: 3, Kind.NUN: 3, Kind.NINTERS: 3,
              Kind.NDIFF: 3, Kind.TRUE: 0, Kind.FALSE: 0, Kind.LABEL: 1})

PRIMITIVE = frozenset({Kind.EQ, Kind.NEQ, Kind.IN, Kind.NIN, Kind.UN, Kind.DISJ})
DERIVED = frozenset({Kind.SUBSET, Kind.INTERS, Kind.DIFF, Kind.NUN, Kind.NDISJ,
                     Kind.NSUBSET, Kind.NINTERS, Kind.NDIFF})
INTEGER = frozenset({Kind.LE, Kind.LT, Kind.GE, Kind.GT, Kind.INTEQ, Kind.INTNEQ})

NEGATION = {
    Kind.EQ: Kind.NEQ, Kind.IN: Kind.NIN, Kind.SUBSET: Kind.NSUBSET, Kind.UN: Kind.NUN,
    Kind.DISJ: Kind.NDISJ, Kind.INTERS: Kind.NINTERS, Kind.DIFF: Kind.NDIFF,
    Kind.LE: Kind.GT, Kind.LT: Kind.GE, Kind.INTEQ: Kind.INTNEQ, Kind.SIZE: Kind.NSIZE,
    Kind.TRUE: Kind.FALSE,
}
NEGATION.update({v: k for k, v in list(NEGATION.items())})


@dataclass(frozen=True)
class Atom:
    kind: Kind
    args: tuple = ()

    def __post_init__(self):
        if len(self.args) != ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} expects {ARITY[self.kind]} arguments, "
                             f"got {len(self.args)}")

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


Formula = Union[Atom, And, Or]

TRUE = Atom(Kind.TRUE)
FALSE = Atom(Kind.FALSE)


def conj(*fs) -> Formula:
    fs = [f for f in fs if f is not None]
    if not fs:
        return TRUE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj_of(*fs) -> Formula:
    if not fs:
        return FALSE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def _mk(kind):
    return lambda *args: Atom(kind, tuple(args))


eq = _mk(Kind.EQ)
neq = _mk(Kind.NEQ)
member = _mk(Kind.IN)
nmember = _mk(Kind.NIN)
un = _mk(Kind.UN)
disj = _mk(Kind.DISJ)
subset = _mk(Kind.SUBSET)
inters = _mk(Kind.INTERS)
diff = _mk(Kind.DIFF)
nun = _mk(Kind.NUN)
ndisj = _mk(Kind.NDISJ)
nsubset = _mk(Kind.NSUBSET)
ninters = _mk(Kind.NINTERS)
ndiff = _mk(Kind.NDIFF)
size = _mk(Kind.SIZE)
le = _mk(Kind.LE)
lt = _mk(Kind.LT)
ge = _mk(Kind.GE)
gt = _mk(Kind.GT)


def expand_derived(a: Atom) -> Formula:
    """Rewrite a derived atom into primitive ones, introducing fresh variables."""
    from .terms import fresh_var

    k, x = a.kind, a.args
    if k is Kind.SUBSET:
        A, B = x
        return un(A, B, B)
    if k is Kind.INTERS:
        A, B, C = x
        d1, d2 = fresh_var(), fresh_var()
        return conj(un(C, d1, A), un(C, d2, B), disj(d1, d2))
    if k is Kind.DIFF:
        A, B, C = x
        n = fresh_var()
        return conj(un(C, n, A), disj(B, C), un(n, B, B))
    if k is Kind.NSUBSET:
        A, B = x
        n = fresh_var()
        return conj(member(n, A), nmember(n, B))
    if k is Kind.NDISJ:
        A, B = x
        n = fresh_var()
        return conj(member(n, A), member(n, B))
    if k is Kind.NUN:
        A, B, C = x
        n = fresh_var()
        return disj_of(conj(member(n, C), nmember(n, A), nmember(n, B)),
                       conj(member(n, A), nmember(n, C)),
                       conj(member(n, B), nmember(n, C)))
    if k is Kind.NINTERS:
        A, B, C = x
        n = fresh_var()
        return disj_of(conj(member(n, C), disj_of(nmember(n, A), nmember(n, B))),
                       conj(member(n, A), member(n, B), nmember(n, C)))
    if k is Kind.NDIFF:
        A, B, C = x
        n = fresh_var()
        return disj_of(conj(member(n, C), disj_of(nmember(n, A), member(n, B))),
                       conj(member(n, A), nmember(n, B), nmember(n, C)))
    raise ValueError(f"{k.value} is not a derived constraint")


def negate(f: Formula) -> Formula:
    """Dual formula: And/Or swapped, every atom replaced by its negative counterpart."""
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if f.kind is Kind.LABEL:
        return TRUE
    return Atom(NEGATION[f.kind], f.args)


def to_dnf(f: Formula) -> list:
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, Or):
        return to_dnf(f.left) + to_dnf(f.right)
    left, right = to_dnf(f.left), to_dnf(f.right)
    return [l + r for l in left for r in right]


def atoms_of(f: Formula) -> list:
    if isinstance(f, Atom):
        return [f]
    return atoms_of(f.left) + atoms_of(f.right)
