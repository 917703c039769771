"""Brute-force ground semantics used as the reference in property tests.

Values are Python objects: ints, strings, tuples for pairs and frozensets for
hereditarily finite sets.
"""
from __future__ import annotations

import itertools

from setris.formula import Kind
from setris.terms import EMPTY, Cons, Pair, from_value

Z = frozenset({0})
UNIVERSE = (0, 1, Z)


def subsets(items, max_size=None):
    items = list(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(top + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


SETS = tuple(subsets(UNIVERSE, 3))            # depth <= 2, size <= 3
VALUES = tuple(dict.fromkeys(UNIVERSE + SETS))  # {0} appears in both lists once
SETS3 = tuple(subsets((0, 1, 2)))


def holds(kind: Kind, *a) -> bool:
    """Truth of a ground constraint."""
    k = kind
    if k is Kind.EQ:
        return a[0] == a[1]
    if k is Kind.NEQ:
        return a[0] != a[1]
    if k is Kind.IN:
        return a[0] in a[1]
    if k is Kind.NIN:
        return a[0] not in a[1]
    if k is Kind.UN:
        return a[0] | a[1] == a[2]
    if k is Kind.DISJ:
        return not (a[0] & a[1])
    if k is Kind.SIZE:
        return len(a[0]) == a[1]
    if k is Kind.NSIZE:
        return len(a[0]) != a[1]
    if k is Kind.SUBSET:
        return a[0] <= a[1]
    if k is Kind.NSUBSET:
        return not a[0] <= a[1]
    if k is Kind.INTERS:
        return a[0] & a[1] == a[2]
    if k is Kind.DIFF:
        return a[0] - a[1] == a[2]
    if k is Kind.NUN:
        return a[0] | a[1] != a[2]
    if k is Kind.NDISJ:
        return bool(a[0] & a[1])
    if k is Kind.NINTERS:
        return a[0] & a[1] != a[2]
    if k is Kind.NDIFF:
        return a[0] - a[1] != a[2]
    raise ValueError(k)


def ris_template(domain, filt, pattern):
    """{pattern(x) | x in domain, filt(x)}: the meaning of an intensional set."""
    return frozenset(pattern(x) for x in domain if filt(x))


def shuffled_term(v, seed: int):
    """A term denoting ``v`` whose set literals are reordered and padded with duplicates."""
    if isinstance(v, frozenset):
        elems = sorted(v, key=repr)
        if seed % 2:
            elems.reverse()
        if elems and seed % 3 == 0:
            elems.append(elems[0])
        out = EMPTY
        for i, e in enumerate(reversed(elems)):
            out = Cons(shuffled_term(e, seed + i + 1), out)
        return out
    if isinstance(v, tuple):
        return Pair(shuffled_term(v[0], seed), shuffled_term(v[1], seed + 1))
    return from_value(v)
