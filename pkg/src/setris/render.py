"""Text and JSON rendering of solutions and the terms inside them."""
from __future__ import annotations

import itertools

from .formula import And, Atom, Kind, Or
from .terms import Arith, Cons, Empty, Interval, Pair, Ris, Var, split_set

__all__ = ["Namer", "render_term", "render_formula", "render_solution", "render_domain",
           "solution_json", "term_json"]

_INFIX = {
    Kind.EQ: "=", Kind.NEQ: "neq", Kind.IN: "in", Kind.NIN: "nin", Kind.SUBSET: "subset",
    Kind.NSUBSET: "nsubset", Kind.LE: "<=", Kind.LT: "<", Kind.GE: ">=", Kind.GT: ">",
    Kind.INTEQ: "=", Kind.INTNEQ: "neq",
}
_OPS = {"add": "+", "sub": "-", "mul": "*", "mod": "mod"}


class Namer:
    """Maps variables to display names; auto-generated ones are renumbered in first-use order.

    With ``parseable=True`` names carry no leading underscore so the output reparses.
    """

    def __init__(self, parseable=False, renumber=True):
        self.parseable = parseable
        self.renumber = renumber
        self.names: dict = {}
        self._k = itertools.count(1)

    def __call__(self, v: Var) -> str:
        name = self.names.get(v)
        if name is None:
            base = f"N{next(self._k)}" if (v.auto and self.renumber) else v.name
            name = base if self.parseable else f"_{base}"
            self.names[v] = name
        return name


def _str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_term(t, namer: Namer | None = None) -> str:
    namer = namer or Namer()
    if isinstance(t, bool):
        return str(t).lower()
    if isinstance(t, int):
        return str(t)
    if isinstance(t, str):
        return _str(t)
    if isinstance(t, Var):
        return namer(t)
    if isinstance(t, Pair):
        return f"({render_term(t.first, namer)}, {render_term(t.second, namer)})"
    if isinstance(t, Arith):
        parts = []
        for a in t.args:
            s = render_term(a, namer)
            if isinstance(a, Arith) or (isinstance(a, int) and a < 0):
                s = f"({s})"
            parts.append(s)
        return f"{parts[0]} {_OPS[t.op]} {parts[1]}"
    if isinstance(t, Empty):
        return "{}"
    if isinstance(t, Interval):
        return f"[{t.lo},{t.hi}]"
    if isinstance(t, Cons):
        elems, tail = split_set(t, {}, max_interval=0)
        body = ",".join(render_term(e, namer) for e in elems)
        if isinstance(tail, Empty):
            return "{" + body + "}"
        return "{" + body + "/" + render_term(tail, namer) + "}"
    if isinstance(t, Ris):
        return _render_ris(t, namer)
    if isinstance(t, (Atom, And, Or)):
        return render_formula(t, namer)
    return repr(t)


def _render_ris(r: Ris, namer: Namer) -> str:
    c = render_term(r.control, namer)
    d = render_term(r.domain, namer)
    f = render_formula(r.filter, namer)
    p = render_term(r.pattern, namer)
    dummies = ", ".join(namer(v) for v in r.dummies)
    if namer.parseable:
        out = f"ris({c} in {d} | {f} @ {p}"
        return out + (f" ; {dummies})" if dummies else ")")
    out = f"{{{c} : {d} | {f} @ {p}"
    return out + (f" ; {dummies}}}" if dummies else "}")


def render_formula(f, namer: Namer | None = None, _top=True) -> str:
    namer = namer or Namer()
    if isinstance(f, And):
        s = f"{render_formula(f.left, namer, False)} & {render_formula(f.right, namer, False)}"
        return s
    if isinstance(f, Or):
        s = f"{render_formula(f.left, namer, False)} or {render_formula(f.right, namer, False)}"
        return s if _top else f"({s})"
    k = f.kind
    if k is Kind.TRUE:
        return "true"
    if k is Kind.FALSE:
        return "false"
    args = [render_term(a, namer) for a in f.args]
    if k in _INFIX:
        return f"{args[0]} {_INFIX[k]} {args[1]}"
    return f"{k.value}({', '.join(args)})"


def render_domain(d) -> str:
    parts = [str(lo) if lo == hi else f"{lo}..{hi}" for lo, hi in d]
    return "{" + ", ".join(parts) + "}"


def render_solution(sol, namer: Namer | None = None) -> str:
    namer = namer or Namer()
    lines = []
    shown = set()
    for v, t in sol.values.items():
        if t is v:
            d = sol.domains.get(v)
            extra = f" -- Domain: {render_domain(d)}" if d is not None else ""
            lines.append(f"{namer(v)} = unknown{extra}")
            shown.add(v)
        else:
            lines.append(f"{namer(v)} = {render_term(t, namer)}")
    residue = [render_formula(a, namer) for a in sol.residue]
    for v, d in sol.domains.items():
        if v in namer.names and v not in shown:
            lines.append(f"{namer(v)} = unknown -- Domain: {render_domain(d)}")
    if residue:
        lines.append("Store: " + residue[0])
        lines.extend("       " + r for r in residue[1:])
    else:
        lines.append("Store: (empty)")
    return "\n".join(lines)


def term_json(t, namer: Namer):
    if isinstance(t, bool):
        return t
    if isinstance(t, (int, str)):
        return t
    if isinstance(t, Var):
        return {"var": namer(t)}
    if isinstance(t, Pair):
        return [term_json(t.first, namer), term_json(t.second, namer)]
    if isinstance(t, Empty):
        return {"set": []}
    if isinstance(t, Cons):
        elems, tail = split_set(t, {}, max_interval=0)
        out = {"set": [term_json(e, namer) for e in elems]}
        if not isinstance(tail, Empty):
            out["rest"] = term_json(tail, namer)
        return out
    if isinstance(t, Interval):
        return {"interval": [t.lo, t.hi]}
    if isinstance(t, Ris):
        return {"ris": render_term(t, namer)}
    return {"expr": render_term(t, namer)}


def solution_json(sol) -> dict:
    namer = Namer()
    bindings = {namer(v): term_json(t, namer) for v, t in sol.values.items()}
    residue = [render_formula(a, namer) for a in sol.residue]
    domains = {namer(v): [list(iv) for iv in d] for v, d in sol.domains.items()
               if v in namer.names}
    return {"bindings": bindings, "residue": residue, "domains": domains}
