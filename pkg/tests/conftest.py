"""Shared oracles and iteration helpers.

The oracles here deliberately avoid the library's own computation paths:
down-sets by raw subset filtering, counts by interval recursion, Heyting
implication by its defining union.
"""

from __future__ import annotations

from itertools import chain, combinations

import pytest

from sitecalc import CATALOG_NAMES, FinitePoset, catalog


def all_subsets(n: int):
    """Every subset of range(n) as a frozenset, in bitmask order."""
    for bits in range(1 << n):
        yield frozenset(i for i in range(n) if bits >> i & 1)


def brute_downsets(poset: FinitePoset) -> list[frozenset[int]]:
    """All down-sets by filtering every subset."""
    out = []
    for s in all_subsets(poset.n):
        if all(q in s for p in s for q in poset.down(p)):
            out.append(s)
    return out


def recursive_downset_count(poset: FinitePoset, elems: frozenset[int] | None = None) -> int:
    """Split on one element: down-sets avoid its up-set or contain its down-set."""
    if elems is None:
        elems = frozenset(range(poset.n))
    if not elems:
        return 1
    p = min(elems)
    return recursive_downset_count(
        poset, elems - (poset.up(p) & elems)
    ) + recursive_downset_count(poset, elems - (poset.down(p) & elems))


def heyting_union_oracle(poset: FinitePoset, x, y) -> frozenset[int]:
    """The defining union of all down-sets whose cut along x lands in y."""
    xs, ys = frozenset(x), frozenset(y)
    acc: frozenset[int] = frozenset()
    for d in brute_downsets(poset):
        if d & xs <= ys:
            acc |= d
    return acc


def powerset(iterable):
    items = list(iterable)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


@pytest.fixture(params=CATALOG_NAMES)
def catalog_pair(request):
    return request.param, catalog()[request.param]
