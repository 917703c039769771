"""Finite-domain integer reasoning: interval-list domains, bounds propagation, labeling."""
from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

from .formula import Atom, Kind
from .terms import Arith, Var, deref, eval_arith, ArithError

__all__ = [
    "DEFAULT_BOUNDS", "Domain", "dom_full", "dom_min", "dom_max", "dom_size", "dom_contains",
    "dom_narrow", "dom_remove", "dom_values", "dom_from_values", "dom_intersect",
    "linearize", "propagate", "negative_cycle", "difference_edges", "Propagator",
    "int_vars",
]

DEFAULT_BOUNDS = (-1_000_000, 1_000_000)
ENUM_LIMIT = 4096

Domain = tuple  # of (lo, hi) pairs, sorted and disjoint


def dom_full(bounds=DEFAULT_BOUNDS) -> Domain:
    return ((bounds[0], bounds[1]),)


def dom_min(d: Domain) -> int:
    return d[0][0]


def dom_max(d: Domain) -> int:
    return d[-1][1]


def dom_size(d: Domain) -> int:
    return sum(h - l + 1 for l, h in d)


def dom_contains(d: Domain, v: int) -> bool:
    return any(l <= v <= h for l, h in d)


def dom_narrow(d: Domain, lo, hi) -> Domain:
    out = []
    for l, h in d:
        l2, h2 = max(l, lo), min(h, hi)
        if l2 <= h2:
            out.append((l2, h2))
    return tuple(out)


def dom_intersect(a: Domain, b: Domain) -> Domain:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        l, h = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if l <= h:
            out.append((l, h))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def dom_remove(d: Domain, v: int) -> Domain:
    out = []
    for l, h in d:
        if l <= v <= h:
            if l < v:
                out.append((l, v - 1))
            if v < h:
                out.append((v + 1, h))
        else:
            out.append((l, h))
    return tuple(out)


def dom_values(d: Domain) -> Iterable[int]:
    for l, h in d:
        yield from range(l, h + 1)


def dom_from_values(vals) -> Domain:
    out: list = []
    for v in sorted(set(vals)):
        if out and out[-1][1] == v - 1:
            out[-1] = (out[-1][0], v)
        else:
            out.append((v, v))
    return tuple(out)


def int_vars(t, bindings: Mapping) -> list:
    """Unbound variables of an integer expression, in first-occurrence order."""
    seen: dict = {}

    def walk(x):
        x = deref(x, bindings)
        if isinstance(x, Var):
            seen.setdefault(x, None)
        elif isinstance(x, Arith):
            for a in x.args:
                walk(a)

    walk(t)
    return list(seen)


def linearize(t, bindings: Mapping):
    """Return ({var: coef}, const) for a linear expression, or None."""
    t = deref(t, bindings)
    if isinstance(t, bool):
        return None
    if isinstance(t, int):
        return {}, t
    if isinstance(t, Var):
        return {t: 1}, 0
    if not isinstance(t, Arith):
        return None
    if t.op in ("add", "sub"):
        a = linearize(t.args[0], bindings)
        b = linearize(t.args[1], bindings)
        if a is None or b is None:
            return None
        sign = 1 if t.op == "add" else -1
        coefs = dict(a[0])
        for v, c in b[0].items():
            coefs[v] = coefs.get(v, 0) + sign * c
        return {v: c for v, c in coefs.items() if c}, a[1] + sign * b[1]
    if t.op == "mul":
        a = linearize(t.args[0], bindings)
        b = linearize(t.args[1], bindings)
        if a is None or b is None:
            return None
        if not a[0]:
            a, b = b, a
        if b[0]:
            return None
        k = b[1]
        return {v: c * k for v, c in a[0].items() if c * k}, a[1] * k
    return None


def _floordiv(a, b):
    return a // b


def _ceildiv(a, b):
    return -((-a) // b)


class _Fail(Exception):
    pass


class Propagator:
    """Narrows variable domains for one integer atom.

    ``get(v)`` returns the current domain of ``v``; ``put(v, dom)`` installs a
    narrower one.  ``put`` is only called with a strictly smaller, nonempty domain.
    """

    def __init__(self, bindings: Mapping, get: Callable, put: Callable):
        self.b = bindings
        self.get = get
        self.put = put
        self.changed = False

    # -- helpers
    def _narrow(self, v: Var, lo, hi):
        d = self.get(v)
        if lo <= dom_min(d) and hi >= dom_max(d):
            return
        nd = dom_narrow(d, lo, hi)
        if not nd:
            raise _Fail
        self.put(v, nd)
        self.changed = True

    def _restrict(self, v: Var, nd: Domain):
        d = self.get(v)
        nd = dom_intersect(d, nd)
        if not nd:
            raise _Fail
        if nd != d:
            self.put(v, nd)
            self.changed = True

    def ival(self, t):
        t = deref(t, self.b)
        if isinstance(t, int) and not isinstance(t, bool):
            return t, t
        if isinstance(t, Var):
            d = self.get(t)
            return dom_min(d), dom_max(d)
        if not isinstance(t, Arith):
            raise _Fail
        a, b = t.args
        if t.op == "mul" and deref(a, self.b) is deref(b, self.b):
            l, h = self.ival(a)
            if l >= 0:
                return l * l, h * h
            if h <= 0:
                return h * h, l * l
            return 0, max(l * l, h * h)
        al, ah = self.ival(a)
        bl, bh = self.ival(b)
        if t.op == "add":
            return al + bl, ah + bh
        if t.op == "sub":
            return al - bh, ah - bl
        if t.op == "mul":
            ps = (al * bl, al * bh, ah * bl, ah * bh)
            return min(ps), max(ps)
        # mod
        if bh <= 0:
            raise _Fail
        if al == ah and bl == bh:
            v = eval_arith("mod", (al, bl))
            return v, v
        if bl == bh and 0 <= al and ah < bl:
            return al, ah
        return 0, bh - 1

    def project(self, t, lo, hi):
        """Narrow the variables of ``t`` so that its value may lie in [lo, hi]."""
        t = deref(t, self.b)
        if lo > hi:
            raise _Fail
        if isinstance(t, int) and not isinstance(t, bool):
            if not lo <= t <= hi:
                raise _Fail
            return
        if isinstance(t, Var):
            self._narrow(t, lo, hi)
            return
        if not isinstance(t, Arith):
            raise _Fail
        a, b = t.args
        if t.op == "add":
            bl, bh = self.ival(b)
            self.project(a, lo - bh, hi - bl)
            al, ah = self.ival(a)
            self.project(b, lo - ah, hi - al)
        elif t.op == "sub":
            bl, bh = self.ival(b)
            self.project(a, lo + bl, hi + bh)
            al, ah = self.ival(a)
            self.project(b, al - hi, ah - lo)
        elif t.op == "mul":
            self._project_mul(a, b, lo, hi)
        else:
            self._project_mod(a, b, lo, hi)

    def _project_mul(self, a, b, lo, hi):
        da, db = deref(a, self.b), deref(b, self.b)
        if da is db and isinstance(da, Var):
            if hi < 0:
                raise _Fail
            s_hi = math.isqrt(hi)
            s_lo = 0 if lo <= 0 else math.isqrt(lo - 1) + 1
            if s_lo > s_hi:
                raise _Fail
            if s_lo == 0:
                self._restrict(da, ((-s_hi, s_hi),))
            else:
                self._restrict(da, ((-s_hi, -s_lo), (s_lo, s_hi)))
            return
        for x, y in ((a, b), (b, a)):
            yl, yh = self.ival(y)
            if yl == yh == 0:
                if not lo <= 0 <= hi:
                    raise _Fail
                return
            if yl <= 0 <= yh:
                continue
            quots = [(num, den) for num in (lo, hi) for den in (yl, yh)]
            self.project(x, min(_ceildiv(n, d) for n, d in quots),
                         max(_floordiv(n, d) for n, d in quots))

    def _project_mod(self, a, m, lo, hi):
        ml, mh = self.ival(m)
        if mh <= 0:
            raise _Fail
        if ml <= 0:
            self.project(m, 1, mh)
            ml = 1
        lo, hi = max(lo, 0), min(hi, mh - 1)
        if lo > hi:
            raise _Fail
        if ml == mh:
            al, ah = self.ival(a)
            qa, qb = al // ml, ah // ml
            if qa == qb:
                self.project(a, qa * ml + lo, qa * ml + hi)

    # -- relations
    def relate(self, kind: Kind, lhs, rhs):
        if kind is Kind.GE:
            kind, lhs, rhs = Kind.LE, rhs, lhs
        elif kind is Kind.GT:
            kind, lhs, rhs = Kind.LT, rhs, lhs
        lin = linearize(Arith("sub", (lhs, rhs)), self.b)
        if lin is not None:
            self._linear(kind, *lin)
        else:
            self._nonlinear(kind, lhs, rhs)

    def _linear(self, kind, coefs, k):
        if kind is Kind.INTNEQ:
            if len(coefs) == 1:
                (v, c), = coefs.items()
                if (-k) % c == 0:
                    self._restrict(v, dom_remove(self.get(v), (-k) // c))
            return
        bound = -k if kind is not Kind.LT else -k - 1
        terms = [(v, c, self.get(v)) for v, c in coefs.items()]
        los = [c * dom_min(d) if c > 0 else c * dom_max(d) for v, c, d in terms]
        his = [c * dom_max(d) if c > 0 else c * dom_min(d) for v, c, d in terms]
        smin, smax = sum(los), sum(his)
        if smin > bound:
            raise _Fail
        if kind is Kind.INTEQ and smax < bound:
            raise _Fail
        for (v, c, _), l_i, h_i in zip(terms, los, his):
            rest_min = smin - l_i
            rest_max = smax - h_i
            # c*v <= bound - rest_min ; for equality also c*v >= bound - rest_max
            up = bound - rest_min
            down = bound - rest_max if kind is Kind.INTEQ else None
            if c > 0:
                vhi = _floordiv(up, c)
                vlo = _ceildiv(down, c) if down is not None else -math.inf
            else:
                vlo = _ceildiv(up, c)
                vhi = _floordiv(down, c) if down is not None else math.inf
            self._narrow(v, vlo, vhi)

    def _nonlinear(self, kind, lhs, rhs):
        if kind is Kind.INTNEQ:
            return
        ll, lh = self.ival(lhs)
        rl, rh = self.ival(rhs)
        if kind is Kind.INTEQ:
            lo, hi = max(ll, rl), min(lh, rh)
            self.project(lhs, lo, hi)
            self.project(rhs, lo, hi)
        elif kind is Kind.LE:
            self.project(lhs, ll, rh)
            self.project(rhs, ll, rh)
        else:
            self.project(lhs, ll, rh - 1)
            self.project(rhs, ll + 1, rh)


def _holds(kind: Kind, a: int, b: int) -> bool:
    if kind is Kind.INTEQ:
        return a == b
    if kind is Kind.INTNEQ:
        return a != b
    if kind is Kind.LE:
        return a <= b
    if kind is Kind.LT:
        return a < b
    if kind is Kind.GE:
        return a >= b
    return a > b


def evaluate(t, bindings: Mapping, env: Mapping = None):
    t = deref(t, bindings)
    if isinstance(t, Var):
        return env[t]
    if isinstance(t, Arith):
        return eval_arith(t.op, [evaluate(a, bindings, env) for a in t.args])
    return t


def propagate(atom: Atom, bindings: Mapping, get: Callable, put: Callable, rounds: int = 30):
    """Propagate one integer atom.

    Returns ``False`` on failure, ``True`` when the atom is entailed (all its
    variables are fixed and it holds), or ``None`` when it remains pending.
    """
    lhs, rhs = atom.args
    p = Propagator(bindings, get, put)
    try:
        for _ in range(rounds):
            p.changed = False
            p.relate(atom.kind, lhs, rhs)
            vs = int_vars(Arith("sub", (lhs, rhs)), bindings)
            if not vs:
                break
            if len(vs) == 1:
                v = vs[0]
                d = get(v)
                if dom_size(d) <= ENUM_LIMIT:
                    keep = []
                    for val in dom_values(d):
                        try:
                            if _holds(atom.kind, evaluate(lhs, bindings, {v: val}),
                                      evaluate(rhs, bindings, {v: val})):
                                keep.append(val)
                        except ArithError:
                            pass
                    nd = dom_from_values(keep)
                    if not nd:
                        return False
                    if nd != d:
                        put(v, nd)
                    break
            if not p.changed:
                break
    except _Fail:
        return False
    if int_vars(Arith("sub", (lhs, rhs)), bindings):
        try:
            return True if _entailed(atom.kind, lhs, rhs, p) else None
        except _Fail:
            return False
    try:
        return _holds(atom.kind, evaluate(lhs, bindings), evaluate(rhs, bindings))
    except ArithError:
        return False


def _entailed(kind: Kind, lhs, rhs, p: Propagator) -> bool:
    """True when the current domains alone guarantee the relation."""
    lin = linearize(Arith("sub", (lhs, rhs)), p.b)
    if lin is not None:
        coefs, k = lin
        lo = hi = k
        for v, c in coefs.items():
            d = p.get(v)
            a, b = c * dom_min(d), c * dom_max(d)
            lo, hi = lo + min(a, b), hi + max(a, b)
    else:
        ll, lh = p.ival(lhs)
        rl, rh = p.ival(rhs)
        lo, hi = ll - rh, lh - rl
    if kind is Kind.INTEQ:
        return lo == hi == 0
    if kind is Kind.INTNEQ:
        if lin is not None and len(lin[0]) == 1:
            (v, c), = lin[0].items()
            return (-lin[1]) % c != 0 or not dom_contains(p.get(v), (-lin[1]) // c)
        return lo > 0 or hi < 0
    if kind is Kind.LE:
        return hi <= 0
    if kind is Kind.LT:
        return hi < 0
    if kind is Kind.GE:
        return lo >= 0
    return lo > 0


def difference_edges(atom: Atom, bindings: Mapping):
    """Edges (x, y, c) meaning x - y <= c implied by a linear two-variable atom."""
    kind, (lhs, rhs) = atom.kind, atom.args
    if kind is Kind.GE:
        kind, lhs, rhs = Kind.LE, rhs, lhs
    elif kind is Kind.GT:
        kind, lhs, rhs = Kind.LT, rhs, lhs
    if kind not in (Kind.LE, Kind.LT, Kind.INTEQ):
        return []
    lin = linearize(Arith("sub", (lhs, rhs)), bindings)
    if lin is None or len(lin[0]) != 2:
        return []
    (v1, c1), (v2, c2) = lin[0].items()
    if {c1, c2} != {1, -1}:
        return []
    x, y = (v1, v2) if c1 == 1 else (v2, v1)
    c = -lin[1] - (1 if kind is Kind.LT else 0)
    edges = [(x, y, c)]
    if kind is Kind.INTEQ:
        edges.append((y, x, lin[1]))
    return edges


def negative_cycle(edges) -> bool:
    """Bellman-Ford over x - y <= c constraints; True if they are inconsistent."""
    if not edges:
        return False
    nodes = {n for x, y, _ in edges for n in (x, y)}
    dist = {n: 0 for n in nodes}
    for _ in range(len(nodes)):
        changed = False
        for x, y, c in edges:
            if dist[y] + c < dist[x]:
                dist[x] = dist[y] + c
                changed = True
        if not changed:
            return False
    return True
