"""Intensional sets: expansion, membership, quantifier encoding and error signals."""
import itertools

import pytest

from oracle import ris_template, subsets
from setris import NotExpandable, Solver, UnsafeRis
from setris.parser import Parser
from setris.terms import from_value, ground_value

FILTERS = [
    ("true", lambda x: True),
    ("x mod 2 = 0", lambda x: x % 2 == 0),
    ("x > 1", lambda x: x > 1),
    ("x neq 2", lambda x: x != 2),
    ("x in {1,3,5}", lambda x: x in {1, 3, 5}),
]
PATTERNS = [
    ("x", lambda x: x),
    ("(x, x*x)", lambda x: (x, x * x)),
    ("x + 10", lambda x: x + 10),
    ("x * x", lambda x: x * x),
]
DOMAINS = list(subsets(range(5)))          # every ground domain with at most 5 elements


def _lit(values):
    return "{" + ",".join(map(str, sorted(values))) + "}"


def _check(text) -> bool:
    return Solver().add(Parser().formula(text)).check()


def _expand(text):
    p = Parser()
    return ground_value(Solver().expand(p.term(text)), {})


@pytest.mark.parametrize("ftxt,f", FILTERS, ids=[f for f, _ in FILTERS])
def test_expansion_matches_template(ftxt, f):
    for dom, (ptxt, p) in itertools.product(DOMAINS, PATTERNS):
        got = _expand(f"ris(x in {_lit(dom)} | {ftxt} @ {ptxt})")
        assert got == ris_template(dom, f, p), (dom, ftxt, ptxt)


@pytest.mark.parametrize("ftxt,f", FILTERS, ids=[f for f, _ in FILTERS])
def test_membership_matches_template(ftxt, f):
    for dom in DOMAINS:
        r = f"ris(x in {_lit(dom)} | {ftxt} @ (x, x*x))"
        expected = ris_template(dom, f, lambda x: (x, x * x))
        for e in range(-1, 6):
            pair = (e, e * e)
            assert _check(f"({e}, {e * e}) in {r}") == (pair in expected)
            assert _check(f"({e}, {e * e}) nin {r}") == (pair not in expected)


def test_equality_with_its_expansion():
    for dom, (ftxt, f) in itertools.product(DOMAINS[::3], FILTERS):
        r = f"ris(x in {_lit(dom)} | {ftxt})"
        ext = ris_template(dom, f, lambda x: x)
        assert _check(f"{r} = {_lit(ext)}")
        assert not _check(f"{r} = {_lit(ext | {99})}")
        assert _check(f"{r} neq {_lit(ext | {99})}")


def test_interval_domains():
    assert _expand("ris(x in [-2,2] | x mod 2 = 0)") == frozenset({-2, 0, 2})
    assert _expand("ris(x in [3,1] | true)") == frozenset()
    assert _expand("ris(x in [1,10] | x mod 2 = 0 @ x*x)") == frozenset({4, 16, 36, 64, 100})


@pytest.mark.parametrize("ftxt,f", FILTERS, ids=[f for f, _ in FILTERS])
def test_restricted_universal_quantifier(ftxt, f):
    # A subset {x : A | F} holds exactly when F holds for every x in A
    for dom in DOMAINS:
        a = _lit(dom)
        expected = all(f(x) for x in dom)
        assert _check(f"{a} subset ris(x in {a} | {ftxt})") == expected, (dom, ftxt)
        assert _check(f"A = {a} & A subset ris(x in A | {ftxt})") == expected, (dom, ftxt)


def test_quantifier_over_unknown_set_is_decided_lazily():
    # every solution's domain satisfies the quantified property
    p = Parser()
    s = Solver().add(p.formula("S subset ris(x in S | x > 0) & 3 in S & S = {a, b}"))
    for sol in s.all_solutions(limit=20):
        vals = ground_value(sol["S"], {})
        if vals is not None:
            assert all(v > 0 for v in vals)
    assert not _check("S subset ris(x in S | x > 0) & 0 in S")


def test_variable_domain_membership_extends_domain():
    p = Parser()
    s = Solver().add(p.formula("(5, Y) in ris(x in D | x > 0 @ (x, x*x))"))
    assert s.check()
    assert s.value(p.names["Y"]) == 25
    d = s.value(p.names["D"])
    assert d.elem == 5


def test_nested_ris_domain():
    p = Parser()
    t = p.term("ris(y in ris(x in {1,2,3,4} | x > 1) | y neq 3 @ y * 10)")
    assert ground_value(Solver().expand(t), {}) == frozenset({20, 40})


def test_unsafe_negation_with_dummies_is_reported():
    with pytest.raises(UnsafeRis):
        Solver().add(Parser().formula("3 nin ris(x in {3} | (x,y) in S @ x ; y)")).check()


def test_dummies_that_can_be_decided_are_fine():
    assert _check("3 nin ris(x in {3} | (x,y) in {(4,1)} @ x ; y)")
    assert not _check("3 nin ris(x in {3} | (x,y) in {(3,1)} @ x ; y)")


def test_expanding_an_open_domain_fails():
    with pytest.raises(NotExpandable):
        Solver().expand(Parser().term("ris(x in D | x > 0)"))


def test_expansion_deduplicates_pattern_values():
    assert _expand("ris(x in {-2,-1,1,2} | true @ x*x)") == frozenset({1, 4})


def test_ground_domain_elements_from_values():
    dom = from_value(frozenset({1, 2}))
    p = Parser()
    r = p.term("ris(x in D | true)")
    s = Solver().add(p.formula("D = {1,2}"))
    assert s.check()
    assert ground_value(s.expand(r), {}) == frozenset({1, 2})
    assert ground_value(dom, {}) == frozenset({1, 2})
