import pytest
from hypothesis import given
from hypothesis import strategies as st

from setris import EMPTY, Interval, MalformedRis, Pair, fresh_var, mk_ris, mk_set, mk_tuple
from setris.formula import TRUE, Kind, atoms_of, expand_derived, negate, to_dnf
from setris.parser import parse_formula
from setris.terms import (
    Cons, free_vars, from_value, ground_value, is_ground, occurs, resolve, split_set, subst,
)

hf = st.recursive(st.integers(-3, 3) | st.text("ab", max_size=2),
                  lambda inner: st.frozensets(inner, max_size=3) | st.tuples(inner, inner),
                  max_leaves=10)


@given(hf)
def test_value_round_trip(v):
    assert ground_value(from_value(v), {}) == v


def test_mk_set_and_split():
    x, r = fresh_var("x"), fresh_var("R")
    s = mk_set([1, x], r)
    assert split_set(s, {}) == ([1, x], r)
    assert split_set(mk_set([]), {}) == ([], EMPTY)


def test_intervals():
    assert ground_value(Interval(1, 3), {}) == frozenset({1, 2, 3})
    assert ground_value(Interval(3, 1), {}) == frozenset()
    assert split_set(Interval(1, 10**9), {}, max_interval=10)[1] == Interval(1, 10**9)


def test_tuples_nest_right():
    assert mk_tuple(1, 2, 3) == Pair(1, Pair(2, 3))


def test_groundness():
    x = fresh_var()
    assert is_ground(mk_set([1, 2]))
    assert not is_ground(mk_set([1], x))
    assert is_ground(mk_set([1], x), {x: EMPTY})


def test_occurs_and_subst():
    x, y = fresh_var(), fresh_var()
    t = mk_set([Pair(1, x)])
    assert occurs(x, t, {}) and not occurs(y, t, {})
    assert occurs(y, t, {x: y})
    assert subst(t, {x: 7}) == mk_set([Pair(1, 7)])


def test_ris_scoping():
    x, d, y, m = fresh_var("x"), fresh_var("D"), fresh_var("y"), fresh_var("m")
    f = parse_formula("x <= m", {"x": x, "m": m})
    r = mk_ris(x, d, f, Pair(x, y), (y,))
    assert r.bound_vars == {x, y}
    assert free_vars(r) == {d, m}
    assert not r.identity_pattern and r.admissible_shape


def test_ris_defaults_and_shapes():
    x, d = fresh_var(), fresh_var()
    r = mk_ris(x, d)
    assert r.filter == TRUE and r.pattern == x and r.identity_pattern
    a, b = fresh_var(), fresh_var()
    assert mk_ris(Pair(a, b), d, pattern=Pair(a, b)).admissible_shape
    assert mk_ris(x, d, pattern=Pair(x, 1)).admissible_shape


def test_strict_ris_rejects_general_patterns():
    from setris.terms import Arith
    x, d = fresh_var(), fresh_var()
    with pytest.raises(MalformedRis):
        mk_ris(x, d, pattern=Arith("mul", (x, x)), strict=True)
    with pytest.raises(MalformedRis):
        mk_ris(1, d)


def test_resolve_follows_chains():
    x, y = fresh_var(), fresh_var()
    assert resolve(mk_set([x]), {x: y, y: 3}) == mk_set([3])
    assert isinstance(resolve(mk_set([x]), {}), Cons)


def test_negation_is_an_involution():
    f = parse_formula("x in A & (y neq 1 or un(A,B,C)) & x < 3")
    assert negate(negate(f)) == f


def test_dnf_and_derived_expansion():
    f = parse_formula("(a = 1 or a = 2) & (b = 1 or b = 2)")
    assert len(to_dnf(f)) == 4
    sub = expand_derived(parse_formula("A subset B"))
    assert sub.kind is Kind.UN
    kinds = {a.kind for a in atoms_of(expand_derived(parse_formula("inters(A,B,C)")))}
    assert kinds == {Kind.UN, Kind.DISJ}
