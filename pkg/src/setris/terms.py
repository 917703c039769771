"""Term universe: variables, constants, pairs, integer expressions and set terms.

Constants are plain Python ``int`` and ``str`` values.  Every other term is an
immutable dataclass.  Bindings never live inside terms; they are kept in a
mapping from :class:`Var` to term (see :mod:`setris.solver`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

__all__ = [
    "Var", "Pair", "Arith", "Cons", "Interval", "Ris", "EMPTY", "Empty",
    "Term", "MalformedRis", "fresh_var", "mk_set", "mk_ris", "mk_tuple",
    "deref", "free_vars", "is_ground", "is_set_term", "occurs", "resolve",
    "ground_value", "eval_arith", "ArithError", "split_set", "subst",
]

_ids = itertools.count(1)
_auto_names = itertools.count(1)


class MalformedRis(ValueError):
    pass


class ArithError(ValueError):
    """Raised for undefined integer operations (mod by a non-positive number)."""


@dataclass(frozen=True, eq=False)
class Var:
    id: int
    name: str
    auto: bool = False

    def __repr__(self):
        return f"_{self.name}"


def fresh_var(name_hint: str | None = None) -> Var:
    if name_hint:
        return Var(next(_ids), name_hint)
    return Var(next(_ids), f"N{next(_auto_names)}", auto=True)


@dataclass(frozen=True)
class Pair:
    first: "Term"
    second: "Term"


ARITH_OPS = ("add", "sub", "mul", "mod")


@dataclass(frozen=True)
class Arith:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {self.op!r}")


class Empty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "{}"

    def __reduce__(self):
        return (Empty, ())


EMPTY = Empty()


@dataclass(frozen=True)
class Cons:
    elem: "Term"
    rest: "Term"


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def as_cons(self):
        if self.lo > self.hi:
            return EMPTY
        if self.lo == self.hi:
            return Cons(self.lo, EMPTY)
        return Cons(self.lo, Interval(self.lo + 1, self.hi))


@dataclass(frozen=True)
class Ris:
    """Restricted intensional set ``{control : domain | filter @ pattern}``.

    ``control`` and ``dummies`` are bound inside the term and are renamed apart
    every time the filter or the pattern is applied to a domain element.
    """
    control: "Term"
    domain: "Term"
    filter: object
    pattern: "Term"
    dummies: tuple = ()
    _key: int = field(default=0, compare=False, repr=False)

    @property
    def bound_vars(self) -> frozenset:
        return frozenset(_term_vars(self.control)) | frozenset(self.dummies)

    @property
    def identity_pattern(self) -> bool:
        return self.pattern == self.control

    @property
    def admissible_shape(self) -> bool:
        c = self.control
        if isinstance(c, Var):
            ok_control = True
        elif isinstance(c, Pair) and isinstance(c.first, Var) and isinstance(c.second, Var):
            ok_control = c.first is not c.second
        else:
            ok_control = False
        if not ok_control:
            return False
        p = self.pattern
        return p == c or (isinstance(p, Pair) and p.first == c)

    def with_domain(self, domain) -> "Ris":
        return Ris(self.control, domain, self.filter, self.pattern, self.dummies, self._key)


Term = Union[int, str, Var, Pair, Arith, Empty, Cons, Interval, Ris]

_ris_keys = itertools.count(1)


def _is_const(t) -> bool:
    return (isinstance(t, int) and not isinstance(t, bool)) or isinstance(t, str)


def is_set_term(t) -> bool:
    return isinstance(t, (Empty, Cons, Interval, Ris))


def mk_set(elements, rest=EMPTY) -> Term:
    if not (is_set_term(rest) or isinstance(rest, Var)):
        raise TypeError(f"set tail must be a set term or a variable, got {rest!r}")
    out = rest
    for e in reversed(list(elements)):
        out = Cons(e, out)
    return out


def mk_tuple(*items) -> Term:
    """Right-nested pairs: ``mk_tuple(a, b, c) == Pair(a, Pair(b, c))``."""
    if len(items) < 2:
        raise ValueError("a tuple needs at least two components")
    out = items[-1]
    for it in reversed(items[:-1]):
        out = Pair(it, out)
    return out


def mk_ris(control, domain, filter=None, pattern=None, dummies=(), strict=False) -> Ris:
    from .formula import TRUE

    if not any(True for _ in _term_vars(control)):
        raise MalformedRis(f"control term {control!r} contains no variable")
    if not (is_set_term(domain) or isinstance(domain, Var)):
        raise TypeError(f"RIS domain must be a set term or a variable, got {domain!r}")
    if pattern is None:
        if dummies:
            raise MalformedRis("a pattern is required when dummy variables are declared")
        pattern = control
    r = Ris(control, domain, TRUE if filter is None else filter, pattern,
            tuple(dummies), next(_ris_keys))
    if strict and not r.admissible_shape:
        raise MalformedRis(f"non-admissible control/pattern in {r!r}")
    return r


def deref(t, bindings: Mapping) -> Term:
    while isinstance(t, Var):
        nxt = bindings.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def _term_vars(t) -> Iterator[Var]:
    """Syntactic variables of a term, without looking at bindings or RIS scoping."""
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Pair):
        yield from _term_vars(t.first)
        yield from _term_vars(t.second)
    elif isinstance(t, Arith):
        for a in t.args:
            yield from _term_vars(a)
    elif isinstance(t, Cons):
        yield from _term_vars(t.elem)
        yield from _term_vars(t.rest)


def free_vars(t) -> set:
    """Free variables of a term or formula; RIS control variables and dummies are bound."""
    from .formula import Atom, And, Or

    out: set = set()

    def walk(x, bound):
        if isinstance(x, Var):
            if x not in bound:
                out.add(x)
        elif isinstance(x, Pair):
            walk(x.first, bound)
            walk(x.second, bound)
        elif isinstance(x, (Arith,)):
            for a in x.args:
                walk(a, bound)
        elif isinstance(x, Cons):
            walk(x.elem, bound)
            walk(x.rest, bound)
        elif isinstance(x, Ris):
            walk(x.domain, bound)
            inner = bound | x.bound_vars
            walk(x.filter, inner)
            walk(x.pattern, inner)
        elif isinstance(x, Atom):
            for a in x.args:
                walk(a, bound)
        elif isinstance(x, (And, Or)):
            walk(x.left, bound)
            walk(x.right, bound)

    walk(t, frozenset())
    return out


def subst(t, mapping: Mapping):
    """Replace variables by terms (no binding lookup); descends into formulas and RIS."""
    from .formula import Atom, And, Or

    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Pair):
        return Pair(subst(t.first, mapping), subst(t.second, mapping))
    if isinstance(t, Arith):
        return Arith(t.op, tuple(subst(a, mapping) for a in t.args))
    if isinstance(t, Cons):
        return Cons(subst(t.elem, mapping), subst(t.rest, mapping))
    if isinstance(t, Ris):
        inner = {k: v for k, v in mapping.items() if k not in t.bound_vars}
        return Ris(t.control, subst(t.domain, mapping), subst(t.filter, inner),
                   subst(t.pattern, inner), t.dummies, t._key)
    if isinstance(t, Atom):
        return Atom(t.kind, tuple(subst(a, mapping) for a in t.args))
    if isinstance(t, And):
        return And(subst(t.left, mapping), subst(t.right, mapping))
    if isinstance(t, Or):
        return Or(subst(t.left, mapping), subst(t.right, mapping))
    return t


def occurs(v: Var, t, bindings: Mapping) -> bool:
    """True iff ``v`` occurs in ``t`` outside RIS terms (the occurs check)."""
    stack = [t]
    while stack:
        x = deref(stack.pop(), bindings)
        if x is v:
            return True
        if isinstance(x, Pair):
            stack.append(x.first)
            stack.append(x.second)
        elif isinstance(x, Arith):
            stack.extend(x.args)
        elif isinstance(x, Cons):
            stack.append(x.elem)
            stack.append(x.rest)
    return False


def eval_arith(op: str, vals) -> int:
    a, b = vals
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if b <= 0:
        raise ArithError(f"{a} mod {b} is undefined")
    return a % b


def split_set(t, bindings: Mapping, max_interval: int = 10_000):
    """Flatten a set term into (elements, tail).

    Small intervals are unfolded into their elements; the tail is EMPTY, an
    unbound variable, a RIS, a large interval, or a non-set term.
    """
    elems = []
    t = deref(t, bindings)
    while True:
        if isinstance(t, Cons):
            elems.append(t.elem)
            t = deref(t.rest, bindings)
        elif isinstance(t, Interval):
            if t.lo > t.hi:
                return elems, EMPTY
            if t.hi - t.lo + 1 > max_interval:
                return elems, t
            elems.extend(range(t.lo, t.hi + 1))
            return elems, EMPTY
        else:
            return elems, t


class _NotGround(Exception):
    pass


def ground_value(t, bindings: Mapping):
    """Canonical Python value of a ground term, or None.

    ints/strs map to themselves, pairs to 2-tuples, sets to frozensets.  RIS
    terms are never ground.
    """
    try:
        return _gv(t, bindings)
    except _NotGround:
        return None


def _gv(t, bindings):
    t = deref(t, bindings)
    if _is_const(t):
        return t
    if isinstance(t, Pair):
        return (_gv(t.first, bindings), _gv(t.second, bindings))
    if isinstance(t, Arith):
        vals = [_gv(a, bindings) for a in t.args]
        if not all(isinstance(v, int) for v in vals):
            raise _NotGround
        try:
            return eval_arith(t.op, vals)
        except ArithError:
            raise _NotGround
    if isinstance(t, (Cons, Interval, Empty)):
        elems, tail = split_set(t, bindings, max_interval=1_000_000)
        if tail is not EMPTY:
            raise _NotGround
        return frozenset(_gv(e, bindings) for e in elems)
    raise _NotGround


def is_ground(t, bindings: Mapping = None) -> bool:
    return ground_value(t, bindings or {}) is not None


def from_value(v) -> Term:
    """Inverse of :func:`ground_value` (set element order follows sorted repr)."""
    if isinstance(v, tuple):
        return Pair(from_value(v[0]), from_value(v[1]))
    if isinstance(v, frozenset):
        return mk_set([from_value(x) for x in sorted(v, key=repr)])
    return v


def resolve(t, bindings: Mapping, _seen=frozenset()):
    """Apply bindings throughout a term.

    Ground arithmetic is evaluated.  Inside a RIS only the domain and the free
    variables of filter and pattern are resolved; a variable already being
    resolved on the current path (recursive RIS) is left as is.
    """
    from .formula import Atom, And, Or

    if isinstance(t, Var):
        if t in _seen:
            return t
        nxt = bindings.get(t)
        if nxt is None:
            return t
        return resolve(nxt, bindings, _seen | {t})
    if isinstance(t, Pair):
        return Pair(resolve(t.first, bindings, _seen), resolve(t.second, bindings, _seen))
    if isinstance(t, Arith):
        args = tuple(resolve(a, bindings, _seen) for a in t.args)
        if all(isinstance(a, int) for a in args):
            try:
                return eval_arith(t.op, args)
            except ArithError:
                pass
        return Arith(t.op, args)
    if isinstance(t, Cons):
        return Cons(resolve(t.elem, bindings, _seen), resolve(t.rest, bindings, _seen))
    if isinstance(t, Ris):
        inner = _seen | t.bound_vars
        return Ris(t.control, resolve(t.domain, bindings, _seen),
                   resolve(t.filter, bindings, inner),
                   resolve(t.pattern, bindings, inner), t.dummies, t._key)
    if isinstance(t, Atom):
        return Atom(t.kind, tuple(resolve(a, bindings, _seen) for a in t.args))
    if isinstance(t, And):
        return And(resolve(t.left, bindings, _seen), resolve(t.right, bindings, _seen))
    if isinstance(t, Or):
        return Or(resolve(t.left, bindings, _seen), resolve(t.right, bindings, _seen))
    return t
