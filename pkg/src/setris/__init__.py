"""Constraint solving over hereditarily finite sets with restricted intensional sets."""
from .formula import (
    FALSE, TRUE, And, Atom, Kind, Or, conj, diff, disj, disj_of, eq, expand_derived, ge, gt,
    inters, le, lt, member, ndiff, ndisj, negate, neq, ninters, nmember, nsubset, nun, size,
    subset, un,
)
from .ris import NotExpandable, UnsafeRis
from .solver import Outcome, ResourceLimit, Solution, Solver, Status
from .terms import (
    EMPTY, Arith, ArithError, Cons, Interval, MalformedRis, Pair, Ris, Var, fresh_var, mk_ris,
    mk_set, mk_tuple,
)

__version__ = "0.1.0"


def var(name: str) -> Var:
    """A named user variable."""
    return fresh_var(name)


__all__ = [
    "Solver", "Outcome", "Status", "Solution", "ResourceLimit", "UnsafeRis", "NotExpandable",
    "MalformedRis", "ArithError", "Var", "var", "fresh_var", "Pair", "Arith", "Cons",
    "Interval", "Ris", "EMPTY", "mk_set", "mk_tuple", "mk_ris", "Atom", "And", "Or", "Kind",
    "TRUE", "FALSE", "conj", "disj_of", "negate", "expand_derived", "eq", "neq", "member",
    "nmember", "un", "disj", "subset", "inters", "diff", "nun", "ndisj", "nsubset", "ninters",
    "ndiff", "size", "le", "lt", "ge", "gt",
]
