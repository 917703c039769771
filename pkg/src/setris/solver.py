"""Constraint store, depth-first rewriting search and the public solver API."""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field

from .cache import DEFAULT_CAPACITY, ExpansionCache
from .formula import (
    DERIVED, INTEGER, And, Atom, Kind, Or, expand_derived,
)
from .intsolver import (
    DEFAULT_BOUNDS, difference_edges, dom_contains, dom_full, dom_intersect, dom_narrow,
    dom_size, dom_values, int_vars, negative_cycle, propagate,
)
from .ris import NOMATCH, closed_instance, innermost_domain, is_var_ris
from .terms import (
    Arith, Cons, Pair, Ris, Var, deref, ground_value, resolve, split_set,
)
from .unify import (
    FAIL, OK, Branch, rewrite_disj, rewrite_eq, rewrite_in, rewrite_neq, rewrite_nin,
    rewrite_nsize, rewrite_size, rewrite_un,
)

__all__ = ["Solver", "Store", "Outcome", "Status", "Solution", "ResourceLimit",
           "DEFAULT_STEP_LIMIT", "rewrite", "is_solved_form"]

DEFAULT_STEP_LIMIT = 100_000

if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)


class ResourceLimit(RuntimeError):
    """The rewriting step budget was exhausted."""


class Status(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    RESOURCE_LIMIT = "resource_limit"


# ---------------------------------------------------------------- store
class Store:
    def __init__(self, step_limit=DEFAULT_STEP_LIMIT, int_bounds=DEFAULT_BOUNDS,
                 cache_size=DEFAULT_CAPACITY):
        self.bindings: dict = {}
        self.bind_pos: dict = {}
        self.domains: dict = {}
        self.trail: list = []
        self.cache = ExpansionCache(cache_size)
        self.bounds = tuple(int_bounds)
        self.step_limit = step_limit
        self.steps = 0
        self.version = 0
        self.final_blocked = frozenset()
        self._active: dict = {}
        self._frames: list = []
        self._inner: list = []

    def tick(self):
        self.steps += 1
        if self.step_limit is not None and self.steps > self.step_limit:
            raise ResourceLimit(f"step limit {self.step_limit} exceeded")

    def deref(self, t):
        return deref(t, self.bindings)

    def is_int(self, v) -> bool:
        return v in self.domains

    def _set_domain(self, v, d):
        self.trail.append(("d", v, self.domains.get(v)))
        self.domains[v] = d
        self.version += 1

    def domain(self, v):
        d = self.domains.get(v)
        if d is None:
            d = dom_full(self.bounds)
            self._set_domain(v, d)
        return d

    def put_domain(self, v, d) -> bool:
        if not d:
            return False
        if d == self.domains.get(v):
            return True
        self._set_domain(v, d)
        if v not in self.bindings and dom_size(d) == 1:
            return self.bind(v, d[0][0])
        return True

    def narrow(self, v, lo, hi) -> bool:
        d = self.domain(v)
        nd = dom_narrow(d, lo if lo is not None else d[0][0], hi if hi is not None else d[-1][1])
        return self.put_domain(v, nd)

    def bind(self, v: Var, t) -> bool:
        t = self.deref(t)
        v = self.deref(v)
        if not isinstance(v, Var):
            # already bound by an earlier bind in the same branch
            return _unify_ground(v, t)
        if t is v:
            return True
        dv = self.domains.get(v)
        if dv is not None:
            if isinstance(t, Var):
                dt = self.domains.get(t)
                nd = dv if dt is None else dom_intersect(dv, dt)
                if not nd:
                    return False
                if nd != dt:
                    self._set_domain(t, nd)
            elif isinstance(t, int) and not isinstance(t, bool):
                if not dom_contains(dv, t):
                    return False
                if dv != ((t, t),):
                    self._set_domain(v, ((t, t),))
            else:
                return False
        self.bindings[v] = t
        self.bind_pos[v] = len(self.trail)
        self.trail.append(("b", v))
        self.version += 1
        if isinstance(t, Var):
            dt = self.domains.get(t)
            if dt is not None and dom_size(dt) == 1:
                return self.bind(t, dt[0][0])
        return True

    def undo(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            rec = trail.pop()
            tag = rec[0]
            if tag == "b":
                del self.bindings[rec[1]]
                self.bind_pos.pop(rec[1], None)
            elif tag == "d":
                if rec[2] is None:
                    del self.domains[rec[1]]
                else:
                    self.domains[rec[1]] = rec[2]
            else:
                self.cache.undo(rec[1])
        self.version += 1

    def _cache_put(self, key, value):
        rec = self.cache.put(key, value)
        if rec is not None:
            self.trail.append(("c", rec))

    # ------------------------------------------------------------ integers
    def int_rewrite(self, atom: Atom):
        for a in atom.args:
            if not _int_term_ok(a, self.bindings) or not self._leaves_in_bounds(a):
                return FAIL
        for v in int_vars(Arith("sub", atom.args), self.bindings):
            self.domain(v)
        res = propagate(atom, self.bindings, self.domains.__getitem__, self._put_for_propagate)
        if res is False or self._prop_failed:
            self._prop_failed = False
            return FAIL
        if res is True:
            return OK
        return None

    _prop_failed = False

    def _leaves_in_bounds(self, t) -> bool:
        """Integer operands must lie inside the global bounds, whether known or not."""
        lo, hi = self.bounds
        stack = [t]
        while stack:
            x = self.deref(stack.pop())
            if isinstance(x, Arith):
                stack.extend(x.args)
            elif isinstance(x, int) and not isinstance(x, bool) and not lo <= x <= hi:
                return False
        return True

    def _put_for_propagate(self, v, d):
        if not self.put_domain(v, d):
            self._prop_failed = True

    def label_branches(self, v):
        v = self.deref(v)
        if not isinstance(v, Var):
            return OK
        if not self.is_int(v):
            return None
        return (Branch(((v, k),)) for k in dom_values(self.domains[v]))

    # ------------------------------------------------------------ closed decisions
    def decide(self, r: Ris, t):
        """Evaluate a RIS filter at a ground element in a nested search.

        Returns ``None`` when the instance is not closed, else ``(passed, pattern_value)``.
        """
        gt = ground_value(t, self.bindings)
        if gt is None:
            return None
        ci = closed_instance(r, t, self)
        if ci is None:
            return None
        if ci is NOMATCH:
            return (False, None)
        inst, dep = ci
        key = (r.control, r.filter, r.pattern, r.dummies, gt)
        depth = self._active.get(key)
        if depth is not None:
            for fr in self._frames[depth + 1:]:
                fr[1] = True
            return (False, None)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        frame = [key, False]
        self._active[key] = len(self._frames)
        self._frames.append(frame)
        mark, version, start = len(self.trail), self.version, len(self._inner)
        blocked = self.final_blocked
        try:
            self.final_blocked = frozenset()
            ok = _Search(self, (inst.filter_inst,)).run()
            pval = resolve(inst.pattern_inst, self.bindings) if ok else None
        finally:
            self.undo(mark)
            self.version = version
            self.final_blocked = blocked
            del self._active[key]
            self._frames.pop()
        for k, v, d in self._inner[start:]:
            if d < mark:
                self._cache_put(k, v)
        result = (ok, pval)
        if not frame[1]:
            self._cache_put(key, result)
            self._inner.append((key, result, dep))
        if not self._frames:
            self._inner.clear()
        return result


def _unify_ground(a, b) -> bool:
    return a is b or (type(a) is type(b) and a == b)


def _int_term_ok(t, bindings) -> bool:
    t = deref(t, bindings)
    if isinstance(t, bool):
        return False
    if isinstance(t, (int, Var)):
        return True
    if isinstance(t, Arith):
        return all(_int_term_ok(a, bindings) for a in t.args)
    return False


# ---------------------------------------------------------------- dispatch
_RULES = {
    Kind.EQ: rewrite_eq, Kind.NEQ: rewrite_neq, Kind.IN: rewrite_in, Kind.NIN: rewrite_nin,
    Kind.UN: rewrite_un, Kind.DISJ: rewrite_disj, Kind.SIZE: rewrite_size,
    Kind.NSIZE: rewrite_nsize,
}


def rewrite(atom: Atom, st: Store):
    """One rewriting step: ``None`` (irreducible), or an iterable of branches."""
    k = atom.kind
    rule = _RULES.get(k)
    if rule is not None:
        return rule(*atom.args, st)
    if k is Kind.TRUE:
        return OK
    if k is Kind.FALSE:
        return FAIL
    if k in DERIVED:
        return [Branch(atoms=(expand_derived(atom),))]
    if k in INTEGER:
        return st.int_rewrite(atom)
    if k is Kind.LABEL:
        return st.label_branches(atom.args[0])
    raise ValueError(f"unknown constraint kind {k}")


def is_solved_form(atom: Atom, st: Store) -> bool:
    return rewrite(atom, st) is None


_GUARDS = INTEGER | {Kind.EQ, Kind.TRUE, Kind.FALSE}
_BLOCKING = frozenset({Kind.EQ, Kind.NIN, Kind.UN, Kind.DISJ, Kind.SIZE})


def _blocked_vars(pending, st):
    out = set()
    for a in pending:
        if isinstance(a, Atom) and a.kind in _BLOCKING:
            for x in a.args:
                x = st.deref(x)
                if isinstance(x, Ris) and is_var_ris(x, st.bindings):
                    out.add(innermost_domain(x, st.bindings))
    return frozenset(out)


class _Search:
    """Depth-first exploration of the rewriting tree with chronological backtracking."""

    def __init__(self, st: Store, pending):
        self.st = st
        self.start = len(st.trail)
        self.pending = tuple(pending)
        self.stack: list = []
        self._edge_seen: set = set()

    def run(self) -> bool:
        return self._loop(0)

    def next(self) -> bool:
        pos = self._backtrack()
        if pos is None:
            return False
        return self._loop(pos)

    def _apply(self, br: Branch) -> bool:
        for v, t in br.binds:
            if not self.st.bind(v, t):
                return False
        return True

    def _backtrack(self):
        st = self.st
        st.final_blocked = frozenset()
        while self.stack:
            mark, prefix, suffix, it = self.stack[-1]
            st.undo(mark)
            br = next(it, None)
            if br is None:
                self.stack.pop()
                continue
            st.tick()
            if self._apply(br):
                self.pending = prefix + br.atoms + suffix
                return len(prefix)
        st.undo(self.start)
        return None

    def _loop(self, pos) -> bool:
        while True:
            if self._reduce(pos):
                return True
            pos = self._backtrack()
            if pos is None:
                return False

    def _reduce(self, i) -> bool:
        """Rewrite until fixpoint.  Deterministic steps go first; a choice point is
        opened only when a whole pass made no deterministic progress."""
        st = self.st
        pass_version = -1 if i else st.version
        final = False
        choice, choice_score = None, 0
        while True:
            pending = self.pending
            if i >= len(pending):
                if self._int_cycle():
                    return False
                if st.version != pass_version:
                    i, pass_version, final, choice = 0, st.version, False, None
                    st.tick()
                    continue
                if choice is not None:
                    i, choice = choice, None
                    res = self._rewrite(pending[i])
                    if not self._take(i, res):
                        return False
                    pass_version = -1
                    continue
                if final:
                    return True
                blocked = _blocked_vars(pending, st)
                if blocked == st.final_blocked:
                    return True
                st.final_blocked = blocked
                i, final = 0, True
                pass_version = st.version
                continue
            a = pending[i]
            if isinstance(a, And):
                self.pending = pending[:i] + (a.left, a.right) + pending[i + 1:]
                continue
            res = self._rewrite(a)
            if res is None:
                if a.kind in INTEGER and a not in self._edge_seen:
                    self._edge_seen.add(a)
                    if self._int_cycle():
                        return False
                i += 1
                continue
            if not (isinstance(res, list) and len(res) <= 1):
                score = self._choice_score(a)
                if choice is None or score < choice_score:
                    choice, choice_score = i, score
                i += 1
                continue
            if not self._take(i, res):
                return False

    def _choice_score(self, a):
        if isinstance(a, Or):
            return -1
        if a.kind is Kind.IN:
            # memberships in partially known sets: most instantiated element first
            _, tail = split_set(a.args[1], self.st.bindings, max_interval=0)
            if isinstance(tail, (Var, Ris)):
                return len(_vars_of(a.args[0], self.st.bindings))
        return 0

    def _rewrite(self, a):
        if isinstance(a, Or):
            return self._or_branches(a)
        return rewrite(a, self.st)

    def _take(self, i, res) -> bool:
        st = self.st
        st.tick()
        pending = self.pending
        prefix, suffix = pending[:i], pending[i + 1:]
        st.version += 1
        if isinstance(res, list) and len(res) <= 1:
            if not res or not self._apply(res[0]):
                return False
            self.pending = prefix + res[0].atoms + suffix
            return True
        it = iter(res)
        mark = len(st.trail)
        while True:
            br = next(it, None)
            if br is None:
                st.undo(mark)
                return False
            if self._apply(br):
                break
            st.undo(mark)
        self.stack.append((mark, prefix, suffix, it))
        self.pending = prefix + br.atoms + suffix
        return True

    def _or_branches(self, f):
        disjuncts, stack = [], [f]
        while stack:
            x = stack.pop()
            if isinstance(x, Or):
                stack.append(x.right)
                stack.append(x.left)
            else:
                disjuncts.append(x)
        return [Branch(atoms=(d,)) for d in disjuncts if self._viable(d)]

    def _viable(self, f) -> bool:
        """Cheap look-ahead: do the leading integer tests and equalities of ``f`` hold?"""
        st = self.st
        mark, version = len(st.trail), st.version
        try:
            stack = [f]
            while stack:
                x = stack.pop()
                if isinstance(x, And):
                    stack.append(x.right)
                    stack.append(x.left)
                    continue
                if isinstance(x, Or) or x.kind not in _GUARDS:
                    return True
                res = rewrite(x, st)
                if res is None:
                    continue
                if not isinstance(res, list) or len(res) > 1:
                    return True
                if not res:
                    return False
                for v, t in res[0].binds:
                    if not st.bind(v, t):
                        return False
                if res[0].atoms:
                    return True
            return True
        finally:
            st.undo(mark)
            st.version = version

    def _int_cycle(self) -> bool:
        st = self.st
        edges = []
        for a in self.pending:
            if isinstance(a, Atom) and a.kind in INTEGER:
                edges.extend(difference_edges(a, st.bindings))
        if len(edges) < 2:
            return False
        nodes = {n for x, y, _ in edges for n in (x, y)}
        for v in nodes:
            d = st.domains.get(v)
            if d is not None:
                edges.append((v, _ZERO, d[-1][1]))
                edges.append((_ZERO, v, -d[0][0]))
        return negative_cycle(edges)


_ZERO = object()


def _vars_of(t, bindings):
    out, stack = set(), [t]
    while stack:
        x = deref(stack.pop(), bindings)
        if isinstance(x, Var):
            out.add(x)
        elif isinstance(x, Pair):
            stack.append(x.first)
            stack.append(x.second)
        elif isinstance(x, Arith):
            stack.extend(x.args)
        elif isinstance(x, Cons):
            stack.append(x.elem)
            stack.append(x.rest)
    return out


# ---------------------------------------------------------------- public API
@dataclass
class Solution:
    """One answer: values of the user variables plus the residual constraints."""

    values: dict
    residue: tuple = ()
    domains: dict = field(default_factory=dict)

    def __getitem__(self, var):
        if isinstance(var, str):
            for v, t in self.values.items():
                if v.name == var:
                    return t
            raise KeyError(var)
        return self.values[var]

    def value(self, var):
        """Python value of a variable in this solution, or None if it is not ground."""
        return ground_value(self[var], {})

    def __str__(self):
        from .render import render_solution
        return render_solution(self)


@dataclass
class Outcome:
    status: Status
    solution: Solution | None = None

    def __bool__(self):
        return self.status is Status.SUCCESS


def _ordered_vars(f, out: dict, bound=frozenset()):
    stack = [(f, bound)]
    while stack:
        x, bnd = stack.pop()
        if isinstance(x, Var):
            if x not in bnd and not x.auto:
                out.setdefault(x, None)
        elif isinstance(x, Pair):
            stack.append((x.second, bnd))
            stack.append((x.first, bnd))
        elif isinstance(x, Cons):
            stack.append((x.rest, bnd))
            stack.append((x.elem, bnd))
        elif isinstance(x, Arith):
            stack.extend((a, bnd) for a in reversed(x.args))
        elif isinstance(x, Ris):
            inner = bnd | x.bound_vars
            stack.append((x.pattern, inner))
            stack.append((x.filter, inner))
            stack.append((x.domain, bnd))
        elif isinstance(x, Atom):
            stack.extend((a, bnd) for a in reversed(x.args))
        elif isinstance(x, (And, Or)):
            stack.append((x.right, bnd))
            stack.append((x.left, bnd))
    return out


class Solver:
    """Accumulates constraints and searches for their solved forms.

    >>> from setris import Solver, eq, mk_set, var
    >>> x = var("x")
    >>> Solver().add(eq(mk_set([1, 2]), mk_set([2, x]))).check()
    True
    """

    def __init__(self, step_limit=DEFAULT_STEP_LIMIT, int_bounds=DEFAULT_BOUNDS,
                 cache_size=DEFAULT_CAPACITY):
        self.store = Store(step_limit, int_bounds, cache_size)
        self.user_vars: dict = {}
        self._posted: list = []
        self._residue: tuple = ()
        self._origin: tuple = ()
        self._search: _Search | None = None

    @property
    def step_limit(self):
        return self.store.step_limit

    @step_limit.setter
    def step_limit(self, n):
        self.store.step_limit = n

    def add(self, *formulas):
        for f in formulas:
            _ordered_vars(f, self.user_vars)
            self._posted.append(f)
        return self

    def reset(self):
        st = self.store
        self.__init__(st.step_limit, st.bounds, st.cache.capacity)

    def solve(self) -> Outcome:
        pending = self._residue + tuple(self._posted)
        self._posted = []
        self._search = _Search(self.store, pending)
        self._origin = pending
        return self._run(self._search.run)

    def next_solution(self) -> Outcome:
        if self._search is None:
            return Outcome(Status.FAILURE)
        return self._run(self._search.next)

    def _run(self, step) -> Outcome:
        self.store.steps = 0
        try:
            ok = step()
        except ResourceLimit:
            self._abandon()
            return Outcome(Status.RESOURCE_LIMIT)
        except BaseException:
            self._abandon()
            raise
        if not ok:
            self._search = None
            self._residue = self._origin
            return Outcome(Status.FAILURE)
        self._residue = self._search.pending
        return Outcome(Status.SUCCESS, self._solution())

    def _abandon(self):
        if self._search is not None:
            self.store.undo(self._search.start)
            self.store.final_blocked = frozenset()
        self._search = None
        self._residue = self._origin

    def check(self) -> bool:
        """Satisfiability of everything added so far.  Bindings of the first answer are kept."""
        out = self.solve()
        if out.status is Status.RESOURCE_LIMIT:
            raise ResourceLimit(f"step limit {self.store.step_limit} exceeded")
        return out.status is Status.SUCCESS

    def solutions(self, limit=None, dedup=False):
        seen = set()
        out = self.solve()
        n = 0
        while out.status is Status.SUCCESS:
            key = str(out.solution) if dedup else None
            if key is None or key not in seen:
                seen.add(key)
                yield out.solution
                n += 1
                if limit is not None and n >= limit:
                    return
            out = self.next_solution()
        if out.status is Status.RESOURCE_LIMIT:
            raise ResourceLimit(f"step limit {self.store.step_limit} exceeded")

    def all_solutions(self, limit=None, dedup=False) -> list:
        return list(self.solutions(limit, dedup))

    def label(self, v: Var):
        self.add(Atom(Kind.LABEL, (v,)))
        return self

    def expand(self, r):
        """Extensional form of a RIS under the current bindings."""
        from .ris import expand
        r = self.store.deref(r)
        if not isinstance(r, Ris):
            return resolve(r, self.store.bindings)
        return resolve(expand(r, self.store), self.store.bindings)

    def value(self, t):
        return resolve(t, self.store.bindings)

    def _solution(self) -> Solution:
        st = self.store
        values = {v: resolve(v, st.bindings) for v in self.user_vars}
        residue, seen = [], set()
        for a in self._search.pending:
            ra = resolve(a, st.bindings)
            if ra not in seen:
                seen.add(ra)
                residue.append(ra)
        doms = {v: d for v, d in st.domains.items() if v not in st.bindings}
        return Solution(values, tuple(residue), doms)
