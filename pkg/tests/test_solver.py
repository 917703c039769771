import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import BY_NAME, CASES, signature
from setris import (
    EMPTY, Outcome, ResourceLimit, Solver, Status, eq, member, mk_set, neq, var,
)
from setris.formula import And
from setris.parser import Parser
from setris.render import Namer, render_formula


def conjuncts(f):
    return conjuncts(f.left) + conjuncts(f.right) if isinstance(f, And) else [f]


def reordered(text, order):
    parts = conjuncts(Parser().formula(text))
    namer = Namer(parseable=True, renumber=False)
    shown = [render_formula(x, namer) for x in parts]
    return " & ".join(shown[i % len(shown)] for i in order(len(shown)))


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.name)
def test_regression_case(case):
    sols, names, extra = case.run()
    assert bool(sols) == case.sat
    if case.check is not None:
        assert case.check(sols, names)
    if case.expected_set is not None:
        from setris.terms import ground_value
        assert ground_value(extra, {}) == case.expected_set


ORDERS = {
    "reversed": lambda n: range(n - 1, -1, -1),
    "rotated": lambda n: range(1, n + 1),
    "interleaved": lambda n: list(range(0, n, 2)) + list(range(1, n, 2)),
}


@pytest.mark.parametrize("how", ORDERS)
@pytest.mark.parametrize("case", [c for c in CASES], ids=lambda c: c.name)
def test_posting_order_does_not_change_answers(case, how):
    assert signature(case, reordered(case.text, ORDERS[how])) == signature(case)


@pytest.mark.parametrize("case", [c for c in CASES], ids=lambda c: c.name)
def test_cache_does_not_change_answers(case):
    assert signature(case, cache_size=0) == signature(case) == signature(case, cache_size=1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([c.name for c in CASES if not c.heavy]), st.randoms())
def test_random_permutations(name, rnd):
    case = BY_NAME[name]
    n = len(conjuncts(Parser().formula(case.text)))
    perm = list(range(n))
    rnd.shuffle(perm)
    assert signature(case, reordered(case.text, lambda _: perm)) == signature(case)


def test_outcome_api():
    x = var("x")
    s = Solver().add(member(x, mk_set([1, 2])))
    out = s.solve()
    assert isinstance(out, Outcome) and out and out.status is Status.SUCCESS
    assert out.solution.value("x") == 1 and out.solution[x] == 1
    assert s.next_solution().solution.value(x) == 2
    last = s.next_solution()
    assert not last and last.status is Status.FAILURE and last.solution is None


def test_check_keeps_bindings_of_first_answer():
    x = var("x")
    s = Solver().add(member(x, mk_set([7, 8])))
    assert s.check() and s.value(x) == 7


def test_exhausted_search_leaves_an_empty_trail():
    s, _ = BY_NAME["set_unification"].solver()
    first = [str(x) for x in s.all_solutions()]
    assert s.store.bindings == {} and s.store.trail == []
    assert [str(x) for x in s.all_solutions()] == first


def test_later_additions_build_on_the_committed_answer():
    x, y = var("x"), var("y")
    s = Solver().add(member(x, mk_set([1, 2, 3])))
    assert s.check()
    s.add(eq(y, x))
    assert s.solve().solution.value(y) == 1
    s.add(neq(x, 1))
    assert not s.solve()


def test_resource_limit_outcome_and_exception():
    text = "F = {(0,1) / ris(x in D | x > 0 & (x-1, z) in F @ (x, z*x) ; z)} & (9, ff) in F"
    s = Solver(step_limit=40).add(Parser().formula(text))
    assert s.solve().status is Status.RESOURCE_LIMIT
    assert s.store.trail == []
    with pytest.raises(ResourceLimit):
        s.check()


def test_reset_forgets_constraints():
    s = Solver().add(eq(EMPTY, mk_set([1])))
    assert not s.check()
    s.reset()
    assert s.check()


def test_dedup_collapses_identical_answers():
    x = var("x")
    s = Solver().add(member(x, mk_set([1, 1, 2])))
    plain = [sol.value(x) for sol in s.all_solutions()]
    deduped = [sol.value(x) for sol in Solver().add(
        member(x, mk_set([1, 1, 2]))).all_solutions(dedup=True)]
    assert sorted(set(plain)) == deduped == [1, 2]
