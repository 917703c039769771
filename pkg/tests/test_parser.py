import dataclasses

import pytest

from cases import CASES
from setris import EMPTY, Interval, Kind, Pair, Var
from setris.formula import And, Atom, Or
from setris.parser import ParseError, Parser, parse_formula, parse_term, split_statements
from setris.render import Namer, render_formula, render_term
from setris.terms import Arith, Cons, Ris

EXTRA = [
    "{x,y} = {1,z} & x neq 1",
    "(5,Y) in ris(x in D | x > 0 @ (x, x*x))",
    "{}",
    "ris(x in D | true @ (x,y)) subset D & D neq {}",
    "ris(x in D | true @ (x,y)) subset ris(h in A | true @ (h,w)) & A subset D & D neq {}",
    "ris(x in A | false @ (x,y)) subset A & Y in A",
    "ris(x in D | true @ x*x) = {4} & 2 in D & -2 in D",
    'nun(A, B, {"a", "b\\"c"}) or ndisj(A, [1,3]) and size(A, n) & nsize(B, 2)',
    "x - -3 >= 2 * (y mod 4) & ninters(A,B,C) & ndiff(A,B,C) & A nsubset B & diff(A,B,C)",
]
INPUTS = [c.text for c in CASES] + EXTRA


def alpha_eq(a, b, m=None) -> bool:
    """Structural equality up to a consistent renaming of variables."""
    m = {} if m is None else m
    if isinstance(a, Var) or isinstance(b, Var):
        if not (isinstance(a, Var) and isinstance(b, Var)):
            return False
        return m.setdefault(a, b) is b
    if type(a) is not type(b):
        return False
    if isinstance(a, (Atom, And, Or, Pair, Arith, Cons, Ris)):
        fa = [f.name for f in dataclasses.fields(a) if f.compare]
        return all(alpha_eq(getattr(a, n), getattr(b, n), m) for n in fa)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(alpha_eq(x, y, m) for x, y in zip(a, b))
    return a == b


@pytest.mark.parametrize("text", INPUTS)
def test_render_then_parse_round_trip(text):
    p = Parser()
    f = p.formula(text) if text != "{}" else p.term(text)
    namer = Namer(parseable=True, renumber=False)
    shown = render_formula(f, namer) if text != "{}" else render_term(f, namer)
    again = Parser().formula(shown) if text != "{}" else parse_term(shown)
    assert alpha_eq(f, again), shown


def test_terms():
    assert parse_term("{}") == EMPTY
    assert parse_term("[1,5]") == Interval(1, 5)
    assert parse_term("[-3,-1]") == Interval(-3, -1)
    assert parse_term("(1,2,3)") == Pair(1, Pair(2, 3))
    assert parse_term('"x y"') == "x y"
    assert parse_term("-4") == -4
    t = parse_term("{1,2/R}")
    assert t.elem == 1 and isinstance(t.rest.rest, Var)


def test_names_are_shared_within_a_parser():
    p = Parser()
    f = p.formula("x = y & y = x")
    assert f.left.args[0] is f.right.args[1]
    assert set(p.names) == {"x", "y"}


def test_ris_binds_control_and_dummies_locally():
    p = Parser()
    f = p.formula("x = 1 & R = ris(x in D | (x,y) in S @ (x,y) ; y) & y = 2")
    r = f.left.right.args[1]
    outer_x, outer_y = p.names["x"], p.names["y"]
    assert r.control is not outer_x
    assert r.dummies[0] is not outer_y
    assert r.pattern == Pair(r.control, r.dummies[0])


def test_precedence():
    f = parse_formula("a = 1 or b = 2 & c = 3")
    assert isinstance(f, Or) and isinstance(f.right, And)
    t = parse_term("1 + 2 * x")
    assert t.op == "add" and t.args[1].op == "mul"


def test_comments_and_keywords():
    f = parse_formula("x in S % membership\n and true")
    assert f.right.kind is Kind.TRUE


@pytest.mark.parametrize("text,where", [
    ("x = ", (1, 5)),
    ("x ? 1", (1, 3)),
    ("un(A,B) & x = 1", (1, 1)),
    ("x = 1 &\n  y in", (2, 7)),
])
def test_errors_report_position(text, where):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert (e.value.line, e.value.col) == where


def test_split_statements_respects_brackets():
    text = "R = ris(x in D | x > 0 ; y); :solve 1 = 1 ;; x in {1,2}"
    assert split_statements(text) == [
        "R = ris(x in D | x > 0 ; y)", ":solve 1 = 1", "x in {1,2}"]
