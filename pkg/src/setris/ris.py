"""Rewrite rules specific to restricted intensional sets (RIS)."""
from __future__ import annotations

from dataclasses import dataclass, field

from .formula import And, Atom, Kind, Or, conj, eq, negate
from .terms import (
    EMPTY, Arith, Cons, Empty, Interval, Pair, Ris, Var, deref, fresh_var, ground_value,
    resolve, split_set, subst,
)
from .unify import FAIL, OK, Branch, clash

__all__ = [
    "UnsafeRis", "NotExpandable", "RisInstance", "instantiate", "fresh_control",
    "negate_filter", "ris_member", "ris_not_member", "ris_eq", "ris_un_disj", "ruq_step",
    "lazy_atom", "is_expandable", "expand", "closed_instance", "innermost_domain",
    "is_var_ris", "NOMATCH",
]


class UnsafeRis(RuntimeError):
    """A rewrite needed the negation of a filter that declares dummy variables."""


class NotExpandable(ValueError):
    pass


NOMATCH = object()


@dataclass(frozen=True)
class RisInstance:
    filter_inst: object
    pattern_inst: object
    fresh_map: dict = field(default_factory=dict)
    binds: tuple = ()


def innermost_domain(r: Ris, bindings):
    d = deref(r.domain, bindings)
    while isinstance(d, Ris):
        d = deref(d.domain, bindings)
    return d


def is_var_ris(t, bindings) -> bool:
    return isinstance(t, Ris) and isinstance(innermost_domain(t, bindings), Var)


def _match(c, d, mapping, binds, extra, bindings) -> bool:
    if isinstance(c, Var):
        if c in mapping:
            extra.append(eq(mapping[c], d))
        else:
            mapping[c] = d
        return True
    if isinstance(c, Pair):
        dd = deref(d, bindings)
        for v, val in binds:
            if dd is v:
                dd = val
        if isinstance(dd, Var):
            p = Pair(fresh_var(), fresh_var())
            binds.append((dd, p))
            dd = p
        elif not isinstance(dd, Pair):
            return False
        return (_match(c.first, dd.first, mapping, binds, extra, bindings)
                and _match(c.second, dd.second, mapping, binds, extra, bindings))
    extra.append(eq(subst(c, mapping), d))
    return True


def instantiate(r: Ris, d, bindings=None):
    """Apply filter and pattern to the domain element ``d``.

    Dummies are renamed apart; control variables are replaced by the matching
    parts of ``d``.  Returns ``None`` when ``d`` cannot match the control term.
    """
    bindings = bindings if bindings is not None else {}
    mapping = {v: fresh_var() for v in r.dummies}
    fresh = dict(mapping)
    binds: list = []
    extra: list = []
    if not _match(r.control, d, mapping, binds, extra, bindings):
        return None
    filt = subst(r.filter, mapping)
    if extra:
        filt = conj(*extra, filt)
    pattern = resolve(subst(r.pattern, mapping), {})
    return RisInstance(filt, pattern, fresh, tuple(binds))


def fresh_control(r: Ris):
    """A copy of the control term over brand-new variables."""
    def copy(c):
        if isinstance(c, Var):
            return fresh_var()
        if isinstance(c, Pair):
            return Pair(copy(c.first), copy(c.second))
        return c
    return copy(r.control)


def negate_filter(f, dummies=()):
    if dummies:
        raise UnsafeRis("filter negation required for a RIS with dummy variables "
                        f"{', '.join(repr(d) for d in dummies)}")
    return negate(f)


def _neg_inst(r: Ris, inst: RisInstance):
    return negate_filter(inst.filter_inst, r.dummies)


# ------------------------------------------------------------ closed decisions
def _closure_ok(roots, st, allowed):
    """Walk ``roots`` through bindings; return the newest binding position or None
    if an unbound variable outside ``allowed`` is reachable."""
    b = st.bindings
    dep = -1
    seen = set()
    stack = list(roots)
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            if x in seen:
                continue
            seen.add(x)
            nxt = b.get(x)
            if nxt is None:
                if x not in allowed:
                    return None
                continue
            dep = max(dep, st.bind_pos.get(x, 0))
            stack.append(nxt)
        elif isinstance(x, (Pair,)):
            stack.append(x.first)
            stack.append(x.second)
        elif isinstance(x, Cons):
            stack.append(x.elem)
            stack.append(x.rest)
        elif isinstance(x, Arith):
            stack.extend(x.args)
        elif isinstance(x, Ris):
            allowed = allowed | x.bound_vars
            stack.append(x.domain)
            stack.append(x.filter)
            stack.append(x.pattern)
        elif isinstance(x, Atom):
            stack.extend(x.args)
        elif isinstance(x, (And, Or)):
            stack.append(x.left)
            stack.append(x.right)
    return dep


def closed_instance(r: Ris, t, st):
    """Instance of ``r`` at ground ``t`` whose filter can be decided in isolation.

    Returns ``NOMATCH``, ``None`` (not closed), or ``(instance, dependency)``.
    """
    if ground_value(t, st.bindings) is None:
        return None
    inst = instantiate(r, t, st.bindings)
    if inst is None:
        return NOMATCH
    if inst.binds:
        return None
    if _closure_ok([inst.pattern_inst], st, frozenset()) is None:
        return None
    dep = _closure_ok([inst.filter_inst], st, frozenset(inst.fresh_map.values()))
    if dep is None:
        return None
    return inst, dep


# ------------------------------------------------------------ lazy evaluation
def _lazy(r: Ris, st, rebuild):
    """Peel one domain element off a non-variable RIS.

    ``rebuild(term)`` returns the atoms that replace the constraint once ``r``
    is replaced by ``term``.
    """
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval):
        dom = dom.as_cons()
    if isinstance(dom, Empty):
        return [Branch(atoms=tuple(rebuild(EMPTY)))]
    if isinstance(dom, Ris):
        if is_var_ris(dom, st.bindings):
            return None
        return _lazy(dom, st, lambda nd: rebuild(r.with_domain(nd)))
    if not isinstance(dom, Cons):
        return FAIL
    t, nr = dom.elem, r.with_domain(dom.rest)
    dec = st.decide(r, t)
    if dec is not None:
        passed, pval = dec
        return [Branch(atoms=tuple(rebuild(Cons(pval, nr) if passed else nr)))]
    inst = instantiate(r, t, st.bindings)
    if inst is None:
        return [Branch(atoms=tuple(rebuild(nr)))]

    def gen():
        yield Branch(inst.binds, (inst.filter_inst, *rebuild(Cons(inst.pattern_inst, nr))))
        yield Branch(inst.binds, (_neg_inst(r, inst), *rebuild(nr)))
    return gen()


def lazy_atom(atom: Atom, pos: int, r: Ris, st):
    def rebuild(term):
        args = list(atom.args)
        args[pos] = term
        return [Atom(atom.kind, tuple(args))]
    return _lazy(r, st, rebuild)


# ------------------------------------------------------------ membership
def ris_member(e, r: Ris, st):
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval):
        dom = dom.as_cons()
    if isinstance(dom, Empty):
        return FAIL
    if isinstance(dom, Var):
        if st.is_int(dom):
            return FAIL
        n = fresh_control(r)
        inst = instantiate(r, n)
        return [Branch(((dom, Cons(n, fresh_var())),),
                       (eq(e, inst.pattern_inst), inst.filter_inst))]
    if isinstance(dom, Ris):
        n = fresh_control(r)
        inst = instantiate(r, n)
        return [Branch(atoms=(Atom(Kind.IN, (n, dom)), eq(e, inst.pattern_inst),
                              inst.filter_inst))]
    if not isinstance(dom, Cons):
        return FAIL
    t = dom.elem
    rest = Branch(atoms=(Atom(Kind.IN, (e, r.with_domain(dom.rest))),))
    dec = st.decide(r, t)
    if dec is not None:
        passed, pval = dec
        if passed and not clash(e, pval, st.bindings):
            return [Branch(atoms=(eq(e, pval),)), rest]
        return [rest]
    inst = instantiate(r, t, st.bindings)
    if inst is None or clash(e, inst.pattern_inst, st.bindings):
        return [rest]
    return [Branch(inst.binds, (eq(e, inst.pattern_inst), inst.filter_inst)), rest]


def ris_not_member(e, r: Ris, st):
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval):
        dom = dom.as_cons()
    if isinstance(dom, Empty):
        return OK
    if isinstance(dom, Var):
        return None
    if isinstance(dom, Ris):
        return _lazy(dom, st, lambda nd: [Atom(Kind.NIN, (e, r.with_domain(nd)))])
    if not isinstance(dom, Cons):
        return OK
    t = dom.elem
    rest = Atom(Kind.NIN, (e, r.with_domain(dom.rest)))
    dec = st.decide(r, t)
    if dec is not None:
        passed, pval = dec
        return [Branch(atoms=(Atom(Kind.NEQ, (e, pval)), rest) if passed else (rest,))]
    inst = instantiate(r, t, st.bindings)
    if inst is None or clash(e, inst.pattern_inst, st.bindings):
        return [Branch(atoms=(rest,))]
    differ = Branch(inst.binds, (Atom(Kind.NEQ, (e, inst.pattern_inst)), rest))
    if not r.dummies:
        return [Branch(inst.binds, (_neg_inst(r, inst), rest)), differ]

    # negating a filter with dummies may be unsafe: try the other branch first
    def gen():
        yield differ
        yield Branch(inst.binds, (_neg_inst(r, inst), rest))
    return gen()


# ------------------------------------------------------------ equality
def ris_eq(a, b, st):
    for r, o in ((a, b), (b, a)):
        if isinstance(r, Ris) and not is_var_ris(r, st.bindings):
            od = deref(o, st.bindings)
            if isinstance(od, Empty) or (isinstance(od, Interval) and od.lo > od.hi):
                return _ris_empty(r, st)
            return _lazy(r, st, lambda nr, o=o: [eq(nr, o)])
    r, o = (a, b) if isinstance(a, Ris) else (b, a)
    o = deref(o, st.bindings)
    if isinstance(o, Interval):
        o = o.as_cons()
    if isinstance(o, (Ris, Empty)):
        return None
    if isinstance(o, Cons):
        dom = deref(r.domain, st.bindings)
        if not isinstance(dom, Var):
            return None
        n = fresh_control(r)
        inst = instantiate(r, n)
        rest = fresh_var()
        return [Branch(((dom, Cons(n, rest)),),
                       (eq(inst.pattern_inst, o.elem), inst.filter_inst,
                        eq(r.with_domain(rest), o.rest)))]
    return FAIL


def _ris_empty(r: Ris, st):
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval):
        dom = dom.as_cons()
    if isinstance(dom, Empty):
        return OK
    if isinstance(dom, Ris):
        return _lazy(dom, st, lambda nd: [eq(r.with_domain(nd), EMPTY)])
    if not isinstance(dom, Cons):
        return FAIL
    nr = r.with_domain(dom.rest)
    dec = st.decide(r, dom.elem)
    if dec is not None:
        return FAIL if dec[0] else [Branch(atoms=(eq(nr, EMPTY),))]
    inst = instantiate(r, dom.elem, st.bindings)
    if inst is None:
        return [Branch(atoms=(eq(nr, EMPTY),))]
    return [Branch(inst.binds, (_neg_inst(r, inst), eq(nr, EMPTY)))]


def ruq_step(a, r: Ris, st):
    """``a ⊆ {x : a | F}``: every element of ``a`` must satisfy ``F``."""
    if not r.identity_pattern:
        return NotImplemented
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval):
        dom = dom.as_cons()
    if not (dom is a or dom == a):
        return NotImplemented
    if isinstance(a, Var):
        return None
    if not isinstance(a, Cons):
        return NotImplemented
    t, nr = a.elem, r.with_domain(a.rest)
    nxt = Atom(Kind.UN, (a.rest, nr, nr))
    dec = st.decide(r, t)
    if dec is not None:
        return [Branch(atoms=(nxt,))] if dec[0] else FAIL
    inst = instantiate(r, t, st.bindings)
    if inst is None:
        return FAIL
    return [Branch(inst.binds, (inst.filter_inst, nxt))]


def ris_un_disj(atom: Atom, st):
    """Dispatch a union or disjointness atom that mentions a RIS."""
    from .unify import rewrite_disj, rewrite_un
    if atom.kind is Kind.UN:
        return rewrite_un(*atom.args, st)
    return rewrite_disj(*atom.args, st)


# ------------------------------------------------------------ expansion
def is_expandable(r: Ris, st) -> bool:
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Interval) and dom.lo > dom.hi:
        return True
    if isinstance(dom, Empty):
        return True
    if isinstance(dom, Ris):
        return is_expandable(dom, st) and is_expandable(r.with_domain(expand(dom, st)), st)
    if not isinstance(dom, (Cons, Interval)):
        return False
    elems, _ = split_set(dom, st.bindings, max_interval=1)
    if not elems:
        elems = [dom.lo]
    t = elems[0]
    if ground_value(t, st.bindings) is None:
        return False
    return closed_instance(r, t, st) is not None


def expand(r: Ris, st):
    """Extensional form of ``r``: pattern values of the ground domain elements that pass."""
    if not is_expandable(r, st):
        raise NotExpandable(f"RIS is not expandable: {r!r}")
    dom = deref(r.domain, st.bindings)
    if isinstance(dom, Ris):
        dom = expand(dom, st)
    elems, tail = split_set(dom, st.bindings, max_interval=1_000_000)
    out, seen = [], set()
    i = 0
    for i, t in enumerate(elems):
        if ground_value(t, st.bindings) is None:
            break
        dec = st.decide(r, t)
        if dec is None:
            raise NotExpandable(f"filter of {r!r} cannot be decided at {t!r}")
        passed, pval = dec
        if passed:
            v = ground_value(pval, st.bindings)
            if v not in seen:
                seen.add(v)
                out.append(pval)
    else:
        i = len(elems)
    remaining = elems[i:]
    if not remaining and isinstance(tail, Empty):
        rest = EMPTY
    else:
        from .terms import mk_set
        rest = r.with_domain(mk_set(remaining, tail) if not isinstance(tail, Ris) else tail)
    from .terms import mk_set
    return mk_set(out, rest)
