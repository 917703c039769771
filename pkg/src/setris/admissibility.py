"""Syntactic admissibility classifier for formulas with intensional sets.

:func:`tau` reduces a formula to conjunctions of union constraints, which
:func:`t_classify` turns into equations over abstract set shapes. The formula
is flagged when one of those equations mixes P-dependent and P-free sides.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import DERIVED, And, Atom, Kind, Or, expand_derived, to_dnf
from .terms import EMPTY, Cons, Empty, Interval, Pair, Ris, Var, fresh_var, split_set

__all__ = ["S", "P", "U", "Unknown", "Verdict", "tau", "t_classify", "check_admissible",
           "shape_problems", "render_texpr"]


@dataclass(frozen=True)
class _S:
    def __repr__(self):
        return "S"


S = _S()


@dataclass(frozen=True)
class P:
    arg: object


@dataclass(frozen=True)
class U:
    left: object
    right: object


@dataclass(frozen=True, eq=False)
class Unknown:
    var: Var

    def __eq__(self, other):
        return isinstance(other, Unknown) and other.var is self.var

    def __hash__(self):
        return hash(self.var)


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.admissible

    def __str__(self):
        if self.admissible:
            return "admissible"
        lhs, rhs = self.witness
        return f"non-admissible: {render_texpr(lhs)} = {render_texpr(rhs)}"


def render_texpr(t) -> str:
    if isinstance(t, _S):
        return "S"
    if isinstance(t, Unknown):
        return f"T(_{t.var.name})"
    if isinstance(t, P):
        return f"P({render_texpr(t.arg)})"
    return f"U({render_texpr(t.left)}, {render_texpr(t.right)})"


# ------------------------------------------------------------------ tau
def _expand_all(f):
    if isinstance(f, And):
        return And(_expand_all(f.left), _expand_all(f.right))
    if isinstance(f, Or):
        return Or(_expand_all(f.left), _expand_all(f.right))
    if f.kind in DERIVED:
        return _expand_all(expand_derived(f))
    return f


def _is_set(t, set_vars) -> bool:
    return isinstance(t, (Empty, Cons, Interval, Ris)) or (isinstance(t, Var) and t in set_vars)


def _infer_set_vars(atoms) -> set:
    out: set = set()

    def mark(t):
        if isinstance(t, Var):
            out.add(t)
        elif isinstance(t, Cons):
            _, tail = split_set(t, {})
            mark(tail)
        elif isinstance(t, Ris):
            mark(t.domain)

    changed = True
    while changed:
        before = len(out)
        for a in atoms:
            k, args = a.kind, a.args
            if k in (Kind.UN, Kind.DISJ):
                for x in args:
                    mark(x)
            elif k in (Kind.IN, Kind.NIN):
                mark(args[1])
            elif k is Kind.SIZE:
                mark(args[0])
            elif k in (Kind.EQ, Kind.NEQ):
                if any(_is_set(x, out) for x in args):
                    for x in args:
                        mark(x)
            for x in args:
                if isinstance(x, (Cons, Ris)):
                    mark(x)
        changed = len(out) != before
    return out


def _vars_in(t, acc):
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            acc.append(x)
        elif isinstance(x, Pair):
            stack += [x.first, x.second]
        elif isinstance(x, Cons):
            stack += [x.elem, x.rest]
        elif isinstance(x, Ris):
            stack.append(x.domain)
            bound = x.bound_vars
            inner: list = []
            _formula_vars(x.filter, inner)
            _vars_in(x.pattern, inner)
            acc.extend(v for v in inner if v not in bound)
        elif hasattr(x, "args") and not isinstance(x, Atom):
            stack.extend(x.args)
    return acc


def _formula_vars(f, acc):
    if isinstance(f, (And, Or)):
        _formula_vars(f.left, acc)
        _formula_vars(f.right, acc)
    else:
        for a in f.args:
            _vars_in(a, acc)
    return acc


def _innermost(t):
    while isinstance(t, Ris):
        t = t.domain
    return t


def _removable(atom, others) -> bool:
    keys = []
    for x in atom.args:
        if isinstance(x, Var):
            keys.append(x)
        elif isinstance(x, Ris) and isinstance(_innermost(x), Var):
            keys.append(_innermost(x))
        else:
            return False
    elsewhere = set()
    for o in others:
        if o is not atom:
            elsewhere.update(_formula_vars(o, []))
    return not any(k in elsewhere for k in keys)


def _tau_conj(atoms) -> list:
    atoms = [a for a in atoms if a.kind not in (Kind.TRUE,)]
    set_vars = _infer_set_vars(atoms)
    # 1: drop isolated unions of variables and variable-RIS
    kept = [a for a in atoms if not (a.kind is Kind.UN and _removable(a, atoms))]
    # 2: equalities between set terms become two unions
    uns = []
    for a in kept:
        if _definition(a, kept):
            continue
        if a.kind is Kind.UN:
            uns.append(a.args)
        elif a.kind is Kind.EQ:
            x, y = a.args
            if (_is_set(x, set_vars) or _is_set(y, set_vars)) and not (
                    isinstance(x, Empty) or isinstance(y, Empty)):
                uns.append((x, y, y))
                uns.append((y, x, x))
    # 3: hoist partially specified extensional arguments
    out = []
    work = list(uns)
    while work:
        args = list(work.pop(0))
        for i, x in enumerate(args):
            if isinstance(x, Cons):
                elems, tail = split_set(x, {}, max_interval=0)
                if not isinstance(tail, Empty):
                    n = fresh_var()
                    work.append((_closed(elems), tail, n))
                    args[i] = n
        out.append(Atom(Kind.UN, tuple(args)))
    # 4: everything else is dropped
    return out


def _spine(t):
    """Variables reached through set tails and RIS domains."""
    while True:
        if isinstance(t, Var):
            return t
        if isinstance(t, Cons):
            t = split_set(t, {}, max_interval=0)[1]
        elif isinstance(t, Ris):
            t = t.domain
        else:
            return None


def _definition(atom, kept) -> bool:
    # X = T where X appears in no other union or set equality: substituting T
    # for X only touches atoms the transformation drops anyway
    if atom.kind is not Kind.EQ:
        return False
    for x, t in (atom.args, atom.args[::-1]):
        if isinstance(x, Var) and isinstance(t, (Cons, Ris)) and _spine(t) is not x:
            others = [o for o in kept if o is not atom and o.kind in (Kind.UN, Kind.EQ)]
            if not any(x in _formula_vars(o, []) for o in others):
                return True
    return False


def _closed(elems):
    out = EMPTY
    for e in reversed(elems):
        out = Cons(e, out)
    return out


def tau(f) -> list:
    """Disjuncts of union constraints that abstract the set part of ``f``."""
    return [_tau_conj(conj) for conj in to_dnf(_expand_all(f))]


# ------------------------------------------------------------------ T function
def _t(term):
    if isinstance(term, Var):
        return Unknown(term)
    if isinstance(term, (Empty, Interval)):
        return S
    if isinstance(term, Cons):
        _, tail = split_set(term, {}, max_interval=0)
        return _t(tail) if not isinstance(tail, Interval) else S
    if isinstance(term, Ris):
        inner = _t(term.domain)
        return inner if term.identity_pattern else P(inner)
    return S


def _substitute(t, defs, guard):
    if isinstance(t, Unknown):
        if t.var in guard or t.var not in defs:
            return t
        return _substitute(defs[t.var], defs, guard | {t.var})
    if isinstance(t, P):
        return P(_substitute(t.arg, defs, guard))
    if isinstance(t, U):
        return U(_substitute(t.left, defs, guard), _substitute(t.right, defs, guard))
    return t


def t_classify(conj) -> list:
    """Equations ``(T(C), U(T(A), T(B)))`` after substitution closure."""
    raw = [(_t(c), U(_t(a), _t(b))) for a, b, c in (u.args for u in conj)]
    defs: dict = {}
    for lhs, rhs in raw:
        if isinstance(lhs, Unknown) and lhs.var not in defs:
            defs[lhs.var] = rhs
    out = []
    for lhs, rhs in raw:
        guard = frozenset([lhs.var]) if isinstance(lhs, Unknown) else frozenset()
        out.append((_substitute(lhs, {}, guard), _substitute(rhs, defs, guard)))
    return out


def _has_p(t) -> bool:
    """Does ``t`` contain a P applied (eventually) to a variable?"""
    if isinstance(t, P):
        return _mentions_var(t.arg) or _has_p(t.arg)
    if isinstance(t, U):
        return _has_p(t.left) or _has_p(t.right)
    return False


def _mentions_var(t) -> bool:
    if isinstance(t, Unknown):
        return True
    if isinstance(t, P):
        return _mentions_var(t.arg)
    if isinstance(t, U):
        return _mentions_var(t.left) or _mentions_var(t.right)
    return False


def check_admissible(f) -> Verdict:
    for conj in tau(f):
        for lhs, rhs in t_classify(conj):
            x, y, z = _has_p(lhs), _has_p(rhs.left), _has_p(rhs.right)
            if (x and not (y and z)) or ((y or z) and not x):
                return Verdict(False, (lhs, rhs))
    return Verdict(True)


def shape_problems(f) -> list:
    """RIS terms in ``f`` whose control term or pattern is outside the admissible shapes."""
    out, seen = [], set()
    for r in _iter_ris(f):
        if id(r) not in seen:
            seen.add(id(r))
            if not r.admissible_shape:
                out.append(r)
    return out


def _iter_ris(x):
    if isinstance(x, (And, Or)):
        yield from _iter_ris(x.left)
        yield from _iter_ris(x.right)
    elif isinstance(x, Atom):
        for a in x.args:
            yield from _iter_ris(a)
    elif isinstance(x, Ris):
        yield x
        yield from _iter_ris(x.domain)
        yield from _iter_ris(x.filter)
        yield from _iter_ris(x.pattern)
    elif isinstance(x, Pair):
        yield from _iter_ris(x.first)
        yield from _iter_ris(x.second)
    elif isinstance(x, Cons):
        yield from _iter_ris(x.elem)
        yield from _iter_ris(x.rest)

