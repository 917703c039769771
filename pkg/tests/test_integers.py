"""Integer constraints compared with exhaustive enumeration over a small box."""
import itertools
import operator

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setris import ResourceLimit, Solver
from setris.intsolver import dom_from_values, dom_intersect, dom_remove, dom_values
from setris.parser import Parser

LO, HI = -4, 4
BOX = range(LO, HI + 1)
RELS = {"=": operator.eq, "neq": operator.ne, "<": operator.lt, "<=": operator.le,
        ">": operator.gt, ">=": operator.ge}

exprs = st.sampled_from([
    ("x", lambda x, y: x), ("y", lambda x, y: y), ("x + y", lambda x, y: x + y),
    ("x - y", lambda x, y: x - y), ("2 * x", lambda x, y: 2 * x),
    ("x * y", lambda x, y: x * y), ("y + 1", lambda x, y: y + 1), ("3", lambda x, y: 3),
    ("x mod 3", lambda x, y: x % 3),
])
atoms = st.tuples(exprs, st.sampled_from(sorted(RELS)), exprs)


def _labelled(text):
    p = Parser()
    s = Solver(int_bounds=(LO, HI)).add(p.formula(text))
    s.label(p.names["x"]).label(p.names["y"])
    return {(sol.value("x"), sol.value("y")) for sol in s.all_solutions()}


@settings(max_examples=120, deadline=None)
@given(st.lists(atoms, min_size=1, max_size=3))
def test_labelled_solutions_equal_brute_force(conj):
    text = " & ".join(f"{a} {rel} {b}" for (a, _), rel, (b, _) in conj)
    text += f" & x >= {LO} & y >= {LO}"
    want = {(x, y) for x, y in itertools.product(BOX, BOX)
            if all(RELS[rel](fa(x, y), fb(x, y)) for (_, fa), rel, (_, fb) in conj)}
    assert _labelled(text) == want, text


def test_domains_narrow_without_labelling():
    p = Parser()
    s = Solver(int_bounds=(-10, 10)).add(p.formula("x > 2 & x < 6 & x neq 4"))
    sol = s.solve().solution
    dom = sol.domains[p.names["x"]]
    assert list(dom_values(dom)) == [3, 5]


def test_entailed_constraints_leave_no_residue():
    s = Solver().add(Parser().formula("x in {1,2,3} & x <= 8"))
    for sol in s.all_solutions():
        assert sol.residue == ()


def test_difference_cycle_is_refuted_quickly():
    s = Solver().add(Parser().formula("x < y & y < z & z < x"))
    assert not s.check()
    assert s.store.steps < 1000


@pytest.mark.parametrize("text", ["x > 0 & x = 11", "x = 11 & x > 0", "12 > 0"])
def test_bounds_apply_in_any_posting_order(text):
    assert not Solver(int_bounds=(0, 10)).add(Parser().formula(text)).check()
    assert Solver(int_bounds=(0, 12)).add(Parser().formula(text)).check()


@pytest.mark.parametrize("text", ["x = 5 mod 0", "y = x mod 0 & x = 3", "5 mod 0 < 1"])
def test_undefined_arithmetic_fails(text):
    assert not Solver().add(Parser().formula(text)).check()


def test_type_errors_fail():
    assert not Solver().add(Parser().formula('x = "a" + 1')).check()
    assert not Solver().add(Parser().formula("{1} < 2")).check()


def test_step_limit_raises():
    p = Parser()
    s = Solver(step_limit=50).add(p.formula(
        "F = {(0,1) / ris(x in D | x > 0 & (x-1, z) in F @ (x, z*x) ; z)} & (9, ff) in F"))
    with pytest.raises(ResourceLimit):
        s.check()


def test_domain_helpers():
    d = dom_from_values([1, 2, 3, 7])
    assert d == ((1, 3), (7, 7))
    assert dom_remove(d, 2) == ((1, 1), (3, 3), (7, 7))
    assert dom_intersect(d, ((3, 8),)) == ((3, 3), (7, 7))
