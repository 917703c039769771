"""Recursive-descent parser for the textual constraint language."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import FALSE, TRUE, And, Atom, Kind, Or
from .terms import EMPTY, Arith, Interval, Pair, fresh_var, mk_ris, mk_set

__all__ = ["ParseError", "Parser", "parse_formula", "parse_term", "split_statements"]


class ParseError(ValueError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line, self.col = line, col


@dataclass(frozen=True)
class Tok:
    kind: str  # int | str | name | sym | eof
    text: str
    pos: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym><=|>=|[-=<>{}()\[\],/|@;&+*:])
""", re.VERBOSE)

_REL = {"=": Kind.EQ, "neq": Kind.NEQ, "in": Kind.IN, "nin": Kind.NIN, "subset": Kind.SUBSET,
        "nsubset": Kind.NSUBSET, "<": Kind.LT, "<=": Kind.LE, ">": Kind.GT, ">=": Kind.GE}
_PRED = {"un": Kind.UN, "disj": Kind.DISJ, "inters": Kind.INTERS, "diff": Kind.DIFF,
         "nun": Kind.NUN, "ndisj": Kind.NDISJ, "ninters": Kind.NINTERS, "ndiff": Kind.NDIFF,
         "size": Kind.SIZE, "nsize": Kind.NSIZE}
_RESERVED = set(_REL) | set(_PRED) | {"mod", "and", "or", "true", "false", "ris"}


def _tokenize(text: str):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            out.append(Tok(kind, m.group(), pos))
        pos = m.end()
    out.append(Tok("eof", "", len(text)))
    return out


def _linecol(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def split_statements(text: str) -> list:
    """Split batch text on ``;`` outside brackets (``;`` inside ``ris(...)`` declares dummies)."""
    out, depth, start = [], 0, 0
    for tok in _tokenize(text):
        if tok.kind == "sym" and tok.text in "({[":
            depth += 1
        elif tok.kind == "sym" and tok.text in ")}]":
            depth -= 1
        elif tok.kind == "sym" and tok.text == ";" and depth == 0:
            out.append(text[start:tok.pos])
            start = tok.pos + 1
    out.append(text[start:])
    return [s.strip() for s in out if s.strip()]


class Parser:
    """Parses formulas and terms; names map to the same variable for the parser's lifetime."""

    def __init__(self, names: dict | None = None):
        self.names = names if names is not None else {}
        self._scopes: list = []

    # -------------------------------------------------------------- entry points
    def formula(self, text: str):
        self._start(text)
        f = self._disj()
        self._expect_eof()
        return f

    def term(self, text: str):
        self._start(text)
        t = self._term()
        self._expect_eof()
        return t

    def _start(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # -------------------------------------------------------------- helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def _err(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, *_linecol(self.text, tok.pos))

    def _is(self, text, kind=None):
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else ("sym", "name"))

    def _accept(self, text):
        if self._is(text):
            self.i += 1
            return True
        return False

    def _expect(self, text):
        if not self._accept(text):
            found = self.tok.text or "end of input"
            raise self._err(f"expected {text!r}, found {found!r}")

    def _expect_eof(self):
        if self.tok.kind != "eof":
            raise self._err(f"unexpected {self.tok.text!r}")

    def _var(self, name):
        for scope in reversed(self._scopes):
            if name in scope:
                return scope[name]
        v = self.names.get(name)
        if v is None:
            v = self.names[name] = fresh_var(name)
        return v

    # -------------------------------------------------------------- formulas
    def _disj(self):
        f = self._conj()
        while self._accept("or"):
            f = Or(f, self._conj())
        return f

    def _conj(self):
        f = self._atom()
        while self._accept("&") or self._accept("and"):
            f = And(f, self._atom())
        return f

    def _atom(self):
        t = self.tok
        if t.kind == "name" and t.text in ("true", "false"):
            self.i += 1
            return TRUE if t.text == "true" else FALSE
        if t.kind == "name" and t.text in _PRED and self.toks[self.i + 1].text == "(":
            return self._pred()
        if self._is("("):
            save = self.i
            try:
                self.i += 1
                f = self._disj()
                self._expect(")")
                if self.tok.kind == "name" and self.tok.text in _REL or self._is_rel_sym():
                    raise ParseError("term, not formula")
                return f
            except ParseError:
                self.i = save
        lhs = self._term()
        rel = self.tok
        kind = _REL.get(rel.text) if rel.kind in ("sym", "name") else None
        if kind is None:
            raise self._err(f"expected a relation after term, found {rel.text or 'end of input'!r}")
        self.i += 1
        return Atom(kind, (lhs, self._term()))

    def _is_rel_sym(self):
        return self.tok.kind == "sym" and self.tok.text in _REL

    def _pred(self):
        name = self.tok
        self.i += 1
        self._expect("(")
        args = [self._term()]
        while self._accept(","):
            args.append(self._term())
        self._expect(")")
        kind = _PRED[name.text]
        from .formula import ARITY
        if len(args) != ARITY[kind]:
            raise self._err(f"{name.text} expects {ARITY[kind]} arguments, got {len(args)}", name)
        return Atom(kind, tuple(args))

    # -------------------------------------------------------------- terms
    def _term(self):
        t = self._mul()
        while self._is("+") or self._is("-"):
            op = "add" if self.tok.text == "+" else "sub"
            self.i += 1
            t = Arith(op, (t, self._mul()))
        return t

    def _mul(self):
        t = self._unary()
        while self._is("*") or self._is("mod"):
            op = "mul" if self.tok.text == "*" else "mod"
            self.i += 1
            t = Arith(op, (t, self._unary()))
        return t

    def _unary(self):
        if self._accept("-"):
            x = self._unary()
            if isinstance(x, int):
                return -x
            return Arith("sub", (0, x))
        return self._primary()

    def _int(self):
        neg = self._accept("-")
        t = self.tok
        if t.kind != "int":
            raise self._err("expected an integer")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    def _primary(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "str":
            self.i += 1
            return _unquote(t.text)
        if t.kind == "name":
            if t.text == "ris" and self.toks[self.i + 1].text == "(":
                return self._ris()
            if t.text in _RESERVED:
                raise self._err(f"unexpected keyword {t.text!r}")
            self.i += 1
            return self._var(t.text)
        if self._accept("("):
            items = [self._term()]
            while self._accept(","):
                items.append(self._term())
            self._expect(")")
            out = items[-1]
            for it in reversed(items[:-1]):
                out = Pair(it, out)
            return out
        if self._accept("["):
            lo = self._int()
            self._expect(",")
            hi = self._int()
            self._expect("]")
            return Interval(lo, hi)
        if self._accept("{"):
            if self._accept("}"):
                return EMPTY
            elems = [self._term()]
            while self._accept(","):
                elems.append(self._term())
            rest = EMPTY
            if self._accept("/"):
                rest = self._term()
            self._expect("}")
            try:
                return mk_set(elems, rest)
            except TypeError as e:
                raise self._err(str(e)) from None
        raise self._err(f"unexpected {t.text or 'end of input'!r}")

    def _ris(self):
        start = self.tok
        self.i += 2
        dummies = self._scan_dummies()
        scope: dict = {}
        for name in dummies:
            scope[name] = fresh_var(name)
        binder = _Binder(scope)
        self._scopes.append(binder)
        try:
            control = self._term()
        finally:
            self._scopes.pop()
        scope.update(binder)
        self._expect("in")
        domain = self._term()
        self._scopes.append(scope)
        try:
            filt = self._disj() if self._accept("|") else None
            pattern = self._term() if self._accept("@") else None
            if self._accept(";"):
                while self.tok.kind == "name":
                    self.i += 1
                    if not self._accept(","):
                        break
        finally:
            self._scopes.pop()
        self._expect(")")
        from .terms import MalformedRis
        try:
            return mk_ris(control, domain, filt, pattern,
                          tuple(scope[n] for n in dummies))
        except (MalformedRis, TypeError) as e:
            raise self._err(str(e), start) from None

    def _scan_dummies(self):
        depth, j = 0, self.i
        while j < len(self.toks):
            tk = self.toks[j]
            if tk.kind == "eof":
                break
            if tk.kind == "sym" and tk.text in "({[":
                depth += 1
            elif tk.kind == "sym" and tk.text in ")}]":
                if depth == 0:
                    break
                depth -= 1
            elif tk.kind == "sym" and tk.text == ";" and depth == 0:
                names, k = [], j + 1
                while self.toks[k].kind == "name":
                    names.append(self.toks[k].text)
                    k += 1
                    if self.toks[k].text != ",":
                        break
                    k += 1
                return names
            j += 1
        return []


class _Binder(dict):
    """Scope used while reading a control term: every name becomes a new bound variable."""

    def __contains__(self, name):
        return True

    def __missing__(self, name):
        v = self[name] = fresh_var(name)
        return v


def parse_formula(text: str, names: dict | None = None):
    return Parser(names).formula(text)


def parse_term(text: str, names: dict | None = None):
    return Parser(names).term(text)
