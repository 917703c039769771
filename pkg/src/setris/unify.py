"""Rewrite rules for the primitive set constraints over extensional sets and variables.

Every rule returns ``None`` when the atom is irreducible (solved form), or a
list of :class:`Branch` alternatives.  An empty list means failure.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import Atom, Kind
from .terms import (
    EMPTY, Cons, Empty, Interval, Pair, Ris, Var, Arith, fresh_var, ground_value,
    is_set_term, mk_set, occurs, split_set, _is_const,
)
from .terms import deref as deref_

__all__ = ["Branch", "OK", "FAIL", "rewrite_eq", "rewrite_neq", "rewrite_in", "rewrite_nin",
           "rewrite_un", "rewrite_disj", "rewrite_size", "rewrite_nsize"]


@dataclass(frozen=True)
class Branch:
    binds: tuple = ()
    atoms: tuple = ()


OK = [Branch()]
FAIL: list = []


def _b(*atoms, binds=()):
    return Branch(tuple(binds), tuple(atoms))


def _at(kind, *args):
    return Atom(kind, args)


def _norm(t, st):
    """Dereference and turn intervals into cons cells (or the empty set)."""
    t = st.deref(t)
    if isinstance(t, Interval):
        return t.as_cons()
    return t


def _is_var_ris(t, st) -> bool:
    from .ris import is_var_ris
    return is_var_ris(t, st.bindings)


def _nonset(t) -> bool:
    return _is_const(t) or isinstance(t, (Pair, Arith))


def _same(a, b) -> bool:
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    return a == b


def clash(a, b, bindings) -> bool:
    """True when ``a`` and ``b`` can never be equal, judging by their shapes alone."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = deref_(x, bindings), deref_(y, bindings)
        if isinstance(x, (Var, Arith, Ris)) or isinstance(y, (Var, Arith, Ris)):
            continue
        if _is_const(x) or _is_const(y):
            if not (type(x) is type(y) and x == y):
                return True
            continue
        if isinstance(x, Pair) and isinstance(y, Pair):
            stack.append((x.first, y.first))
            stack.append((x.second, y.second))
            continue
        if isinstance(x, Pair) or isinstance(y, Pair):
            return True
        if isinstance(x, Empty) and isinstance(y, Cons) or isinstance(y, Empty) and isinstance(x, Cons):
            return True
    return False


# ---------------------------------------------------------------- equality
def rewrite_eq(lhs, rhs, st):
    a, b = st.deref(lhs), st.deref(rhs)
    if _same(a, b):
        return OK
    if isinstance(a, Arith) or isinstance(b, Arith):
        return [_b(_at(Kind.INTEQ, a, b))]
    if isinstance(a, Var):
        return _bind_var(a, b, st)
    if isinstance(b, Var):
        return _bind_var(b, a, st)
    if _is_const(a) or _is_const(b):
        return FAIL
    if isinstance(a, Pair) or isinstance(b, Pair):
        if isinstance(a, Pair) and isinstance(b, Pair):
            return [_b(_at(Kind.EQ, a.first, b.first), _at(Kind.EQ, a.second, b.second))]
        return FAIL
    if isinstance(a, Ris) or isinstance(b, Ris):
        from .ris import ris_eq
        return ris_eq(a, b, st)
    return _set_unify(_norm(a, st), _norm(b, st), st)


def _bind_var(x: Var, t, st):
    if isinstance(t, Var):
        # keep the user-visible variable unbound when only one side is auto-named
        if t.auto or not x.auto:
            return [_b(binds=((t, x),))]
        return [_b(binds=((x, t),))]
    if isinstance(t, Ris):
        from .ris import innermost_domain
        if innermost_domain(t, st.bindings) is x:
            return None
        return [_b(binds=((x, t),))]
    if isinstance(t, (Cons, Interval)):
        elems, tail = split_set(t, st.bindings)
        if any(occurs(x, e, st.bindings) for e in elems):
            return FAIL
        if tail is x:
            return [_b(binds=((x, mk_set(elems, fresh_var())),))]
        if not isinstance(tail, (Var, Ris)) and occurs(x, tail, st.bindings):
            return FAIL
        return [_b(binds=((x, t),))]
    if isinstance(t, Pair) and occurs(x, t, st.bindings):
        return FAIL
    return [_b(binds=((x, t),))]


def _set_unify(a, b, st):
    if isinstance(a, Empty) and isinstance(b, Empty):
        return OK
    if isinstance(a, Empty) or isinstance(b, Empty):
        return FAIL
    if not isinstance(a, Cons) or not isinstance(b, Cons):
        return FAIL
    ea, ta = split_set(a, st.bindings)
    eb, tb = split_set(b, st.bindings)
    if isinstance(ta, Empty) and isinstance(tb, Empty):
        return _closed_unify(a, b, ea, eb, st)
    if isinstance(ta, Var) and ta is tb:
        return _same_tail(ea, eb, ta)
    s, rest_a = a.elem, a.rest
    t, rest_b = b.elem, b.rest
    n = fresh_var()
    return [
        _b(_at(Kind.EQ, s, t), _at(Kind.EQ, rest_a, rest_b)),
        _b(_at(Kind.EQ, s, t), _at(Kind.EQ, a, rest_b)),
        _b(_at(Kind.EQ, s, t), _at(Kind.EQ, rest_a, b)),
        _b(_at(Kind.EQ, rest_a, Cons(t, n)), _at(Kind.EQ, Cons(s, n), rest_b)),
    ]


def _closed_unify(a, b, ea, eb, st):
    ga = [ground_value(e, st.bindings) for e in ea]
    gb = [ground_value(e, st.bindings) for e in eb]
    if all(v is not None for v in ga) and all(v is not None for v in gb):
        return OK if frozenset(ga) == frozenset(gb) else FAIL
    # mutual inclusion: non-ground elements first, then the ground ones
    first, second = [], []
    for elems, vals, other in ((eb, gb, a), (ea, ga, b)):
        for e, v in zip(elems, vals):
            (second if v is not None else first).append(_at(Kind.IN, e, other))
    return [_b(*first, *second)]


def _same_tail(ea, eb, x):
    t0, rest_a = ea[0], ea[1:]
    out = []
    for j, tj in enumerate(eb):
        others = eb[:j] + eb[j + 1:]
        out.append(_b(_at(Kind.EQ, t0, tj),
                      _at(Kind.EQ, mk_set(rest_a, x), mk_set(others, x))))
        out.append(_b(_at(Kind.EQ, t0, tj),
                      _at(Kind.EQ, mk_set(ea, x), mk_set(others, x))))
        out.append(_b(_at(Kind.EQ, t0, tj),
                      _at(Kind.EQ, mk_set(rest_a, x), mk_set(eb, x))))
    n = fresh_var()
    out.append(_b(_at(Kind.EQ, mk_set(rest_a, n), mk_set(eb, n)),
                  binds=((x, Cons(t0, n)),)))
    return out


# ---------------------------------------------------------------- disequality
def _witness(a, b):
    n = fresh_var()
    return [_b(_at(Kind.IN, n, a), _at(Kind.NIN, n, b)),
            _b(_at(Kind.IN, n, b), _at(Kind.NIN, n, a))]


def rewrite_neq(lhs, rhs, st):
    a, b = st.deref(lhs), st.deref(rhs)
    if _same(a, b):
        return FAIL
    if isinstance(a, Arith) or isinstance(b, Arith):
        return [_b(_at(Kind.INTNEQ, a, b))]
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Var) and st.is_int(x):
            if isinstance(y, int) or (isinstance(y, Var) and st.is_int(y)):
                return [_b(_at(Kind.INTNEQ, x, y))]
            if not isinstance(y, Var):
                return OK
    ga, gb = ground_value(a, st.bindings), ground_value(b, st.bindings)
    if ga is not None and gb is not None:
        return FAIL if ga == gb else OK
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Var):
            if isinstance(y, Var):
                return _witness(x, y) if (x in st.final_blocked or y in st.final_blocked) else None
            if isinstance(y, Ris):
                return _witness(x, y)
            if occurs(x, y, st.bindings):
                return _witness(x, y) if is_set_term(y) else OK
            if x in st.final_blocked and is_set_term(y):
                return _witness(x, y)
            return None
    if isinstance(a, Pair) and isinstance(b, Pair):
        return [_b(_at(Kind.NEQ, a.first, b.first)), _b(_at(Kind.NEQ, a.second, b.second))]
    if not (is_set_term(a) and is_set_term(b)):
        return FAIL if _same(a, b) else OK
    a, b = _norm(a, st), _norm(b, st)
    for x, y in ((a, b), (b, a)):
        if isinstance(y, Empty):
            if isinstance(x, Empty):
                return FAIL
            if isinstance(x, Cons):
                return OK
            return [_b(_at(Kind.IN, fresh_var(), x))]
    return _witness(a, b)


# ---------------------------------------------------------------- membership
def rewrite_in(e, s, st):
    s = st.deref(s)
    if isinstance(s, Var):
        if st.is_int(s):
            return FAIL
        return [_b(binds=((s, Cons(e, fresh_var())),))]
    if isinstance(s, Ris):
        from .ris import ris_member
        return ris_member(e, s, st)
    if isinstance(s, Interval):
        ed = st.deref(e)
        if isinstance(ed, int):
            return OK if s.lo <= ed <= s.hi else FAIL
        if isinstance(ed, (Var, Arith)):
            if s.lo > s.hi:
                return FAIL
            return [_b(_at(Kind.LE, s.lo, ed), _at(Kind.LE, ed, s.hi))]
        return FAIL
    if not isinstance(s, Cons):
        return FAIL
    elems, tail = split_set(s, st.bindings)
    ed = st.deref(e)
    if isinstance(tail, Empty):
        vals = [ground_value(x, st.bindings) for x in elems]
        if all(v is not None for v in vals):
            ge = ground_value(ed, st.bindings)
            if ge is not None:
                return OK if ge in vals else FAIL
            if isinstance(ed, Var):
                seen, out = set(), []
                for x, v in zip(elems, vals):
                    if v not in seen:
                        seen.add(v)
                        out.append(_b(binds=((ed, x),)))
                return out
    if clash(ed, s.elem, st.bindings):
        return [_b(_at(Kind.IN, e, s.rest))]
    return [_b(_at(Kind.EQ, e, s.elem)), _b(_at(Kind.IN, e, s.rest))]


def rewrite_nin(e, s, st):
    s = st.deref(s)
    if isinstance(s, Var):
        return OK if st.is_int(s) else None
    if isinstance(s, Ris):
        from .ris import ris_not_member
        return ris_not_member(e, s, st)
    if isinstance(s, Interval):
        ed = st.deref(e)
        if s.lo > s.hi:
            return OK
        if isinstance(ed, int):
            return OK if not s.lo <= ed <= s.hi else FAIL
        if isinstance(ed, Arith) or (isinstance(ed, Var) and st.is_int(ed)):
            return [_b(_at(Kind.LT, ed, s.lo)), _b(_at(Kind.GT, ed, s.hi))]
        if isinstance(ed, Var):
            if s.hi - s.lo < 64:
                return [_b(*(_at(Kind.NEQ, ed, k) for k in range(s.lo, s.hi + 1)))]
            return [_b(_at(Kind.LT, ed, s.lo)), _b(_at(Kind.GT, ed, s.hi))]
        return OK
    if not isinstance(s, Cons):
        return OK
    elems, tail = split_set(s, st.bindings)
    if isinstance(tail, Empty):
        ge = ground_value(e, st.bindings)
        if ge is not None:
            vals = [ground_value(x, st.bindings) for x in elems]
            if all(v is not None for v in vals):
                return FAIL if ge in vals else OK
    return [_b(_at(Kind.NEQ, e, s.elem), _at(Kind.NIN, e, s.rest))]


# ---------------------------------------------------------------- union
def _split3(t, a, b, n, which):
    """Branches placing ``t`` in ``a`` only, ``b`` only, or both; remainders unite to ``n``."""
    out = []
    if "a" in which:
        n1 = fresh_var()
        out.append(_b(_at(Kind.EQ, a, Cons(t, n1)), _at(Kind.NIN, t, n1),
                      _at(Kind.NIN, t, b), _at(Kind.UN, n1, b, n)))
    if "b" in which:
        n1 = fresh_var()
        out.append(_b(_at(Kind.EQ, b, Cons(t, n1)), _at(Kind.NIN, t, n1),
                      _at(Kind.NIN, t, a), _at(Kind.UN, a, n1, n)))
    n1, n2 = fresh_var(), fresh_var()
    out.append(_b(_at(Kind.EQ, a, Cons(t, n1)), _at(Kind.NIN, t, n1),
                  _at(Kind.EQ, b, Cons(t, n2)), _at(Kind.NIN, t, n2), _at(Kind.UN, n1, n2, n)))
    return out


def _with_prefix(prefix, branches):
    return [Branch(br.binds, tuple(prefix) + br.atoms) for br in branches]


def rewrite_un(a0, b0, c0, st):
    a, b, c = _norm(a0, st), _norm(b0, st), _norm(c0, st)
    if any(_nonset(x) for x in (a, b, c)):
        return FAIL
    if isinstance(a, Empty):
        return [_b(_at(Kind.EQ, b, c))]
    if isinstance(b, Empty):
        return [_b(_at(Kind.EQ, a, c))]
    if isinstance(c, Empty):
        return [_b(_at(Kind.EQ, a, EMPTY), _at(Kind.EQ, b, EMPTY))]
    if _same(a, b):
        return [_b(_at(Kind.EQ, a, c))]
    from .ris import ruq_step, lazy_atom
    if _same(b, c) and isinstance(b, Ris):
        r = ruq_step(a, b, st)
        if r is not NotImplemented:
            return r
    if _same(b, c) and isinstance(a, Cons):
        return [_b(_at(Kind.IN, a.elem, b), _at(Kind.UN, a.rest, b, b))]
    if _same(a, c) and isinstance(b, Cons):
        return [_b(_at(Kind.IN, b.elem, a), _at(Kind.UN, a, b.rest, a))]
    if isinstance(c, Cons):
        t, n = c.elem, fresh_var()
        return _with_prefix((_at(Kind.EQ, c, Cons(t, n)), _at(Kind.NIN, t, n)),
                            _split3(t, a, b, n, "ab"))
    if isinstance(a, Cons) or isinstance(b, Cons):
        src, which = (a, "a") if isinstance(a, Cons) else (b, "b")
        t, n = src.elem, fresh_var()
        return _with_prefix((_at(Kind.EQ, c, Cons(t, n)), _at(Kind.NIN, t, n)),
                            _split3(t, a, b, n, which))
    for pos, x in enumerate((a, b, c)):
        if isinstance(x, Ris) and not _is_var_ris(x, st):
            return lazy_atom(Atom(Kind.UN, (a, b, c)), pos, x, st)
    return None


# ---------------------------------------------------------------- disjointness
def rewrite_disj(a0, b0, st):
    a, b = _norm(a0, st), _norm(b0, st)
    if _nonset(a) or _nonset(b) or isinstance(a, Empty) or isinstance(b, Empty):
        return OK
    if _same(a, b):
        return [_b(_at(Kind.EQ, a, EMPTY))]
    if isinstance(a, Cons):
        return [_b(_at(Kind.NIN, a.elem, b), _at(Kind.DISJ, a.rest, b))]
    if isinstance(b, Cons):
        return [_b(_at(Kind.NIN, b.elem, a), _at(Kind.DISJ, a, b.rest))]
    from .ris import lazy_atom
    for pos, x in enumerate((a, b)):
        if isinstance(x, Ris) and not _is_var_ris(x, st):
            return lazy_atom(Atom(Kind.DISJ, (a, b)), pos, x, st)
    return None


# ---------------------------------------------------------------- cardinality
def rewrite_size(s0, n0, st):
    s, n = st.deref(s0), st.deref(n0)
    if isinstance(n, Var) and not st.narrow(n, 0, None):
        return FAIL
    if isinstance(n, int) and n < 0:
        return FAIL
    if not (isinstance(n, (int, Var, Arith))) or isinstance(n, bool):
        return FAIL
    if isinstance(s, Interval):
        return [_b(_at(Kind.INTEQ, n, max(0, s.hi - s.lo + 1)))]
    if isinstance(s, Empty):
        return [_b(_at(Kind.INTEQ, n, 0))]
    if isinstance(s, Cons):
        g = ground_value(s, st.bindings)
        if g is not None:
            return [_b(_at(Kind.INTEQ, n, len(g)))]
        m = fresh_var()
        return [_b(_at(Kind.NIN, s.elem, s.rest), _at(Kind.SIZE, s.rest, m),
                   _at(Kind.INTEQ, n, Arith("add", (m, 1)))),
                _b(_at(Kind.IN, s.elem, s.rest), _at(Kind.SIZE, s.rest, n))]
    if isinstance(s, Var):
        if st.is_int(s):
            return FAIL
        if not isinstance(n, int):
            return None
        elems = [fresh_var() for _ in range(n)]
        neqs = [_at(Kind.NEQ, elems[i], elems[j])
                for i in range(n) for j in range(i + 1, n)]
        return [_b(*neqs, binds=((s, mk_set(elems)),))]
    if isinstance(s, Ris):
        if _is_var_ris(s, st):
            return None
        from .ris import lazy_atom
        return lazy_atom(Atom(Kind.SIZE, (s, n)), 0, s, st)
    return FAIL


def rewrite_nsize(s0, n0, st):
    s = st.deref(s0)
    if isinstance(s, Var):
        return None
    if not is_set_term(s):
        return OK
    m = fresh_var()
    return [_b(_at(Kind.SIZE, s, m), _at(Kind.INTNEQ, m, n0))]
