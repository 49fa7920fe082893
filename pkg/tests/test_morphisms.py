"""Site morphisms, the covering lifting property, and subcanonicity."""

import pytest
from conftest import all_subsets

from sitecalc import (
    NotOrderIsomorphismError,
    OrderMorphism,
    PosetMismatchError,
    adjoint_transfer_consistent,
    all_order_isomorphisms,
    all_order_morphisms,
    canonical_subset_report,
    catalog,
    catalog_poset,
    derived_topology,
    has_clp,
    indiscrete_topology,
    is_site_isomorphism,
    is_subcanonical,
    preserves_covers,
    representable_is_sheaf,
    site_morphism_report,
    subcanonicity_report,
    subset_of_labels,
    subset_subcanonicity_witnesses,
    subset_topology,
)


def test_identity_is_site_isomorphism(catalog_pair):
    _, p = catalog_pair
    ident = OrderMorphism(p, p, tuple(range(p.n)))
    for x in all_subsets(p.n):
        j = subset_topology(p, x)
        assert is_site_isomorphism(ident, j, j)


def test_swap_on_antichain_is_site_isomorphism():
    anti = catalog_poset("antichain2")
    swap = OrderMorphism(anti, anti, (1, 0))
    j0 = subset_topology(anti, {0})
    j1 = subset_topology(anti, {1})
    assert is_site_isomorphism(swap, j0, j1)
    assert not is_site_isomorphism(swap, j0, j0)


def test_site_isomorphism_requires_an_order_isomorphism():
    chain2 = catalog_poset("chain2")
    collapse = OrderMorphism(chain2, chain2, (0, 0))
    with pytest.raises(NotOrderIsomorphismError):
        is_site_isomorphism(collapse, indiscrete_topology(chain2), indiscrete_topology(chain2))


def test_inclusion_has_clp():
    point = catalog_poset("point")
    chain2 = catalog_poset("chain2")
    inc = OrderMorphism(point, chain2, (0,))
    j_src = subset_topology(point, {0})
    j_tgt = subset_topology(chain2, {0})
    report = has_clp(inc, j_src, j_tgt)
    assert report.has_clp
    assert report.clp_violations == ()


def test_clp_characterization_small():
    p = catalog_poset("V")
    q = catalog_poset("Lambda")
    for phi in all_order_morphisms(p, q):
        for x in all_subsets(p.n):
            for y in all_subsets(q.n):
                report = has_clp(phi, subset_topology(p, x), subset_topology(q, y))
                assert report.has_clp == (phi.image_of(x) <= y)


def test_cover_preservation_characterization_for_isomorphisms():
    p = catalog_poset("antichain3")
    for phi in all_order_isomorphisms(p, p):
        for x in all_subsets(p.n):
            for y in all_subsets(p.n):
                report = preserves_covers(phi, subset_topology(p, x), subset_topology(p, y))
                assert report.preserves_covers == (y <= phi.image_of(x))


def test_report_flags_match_witnesses():
    chain2 = catalog_poset("chain2")
    ident = OrderMorphism(chain2, chain2, (0, 1))
    report = site_morphism_report(
        ident, subset_topology(chain2, {1}), subset_topology(chain2, {0})
    )
    assert not report.preserves_covers and report.cover_violations
    assert report.has_clp == (not report.clp_violations)


def test_adjoint_transfer_constant_pair():
    chain2 = catalog_poset("chain2")
    point = catalog_poset("point")
    # bottom inclusion below, constant map above: an adjoint pair
    pi = OrderMorphism(point, chain2, (0,))
    phi = OrderMorphism(chain2, point, (0, 0))
    for x in all_subsets(chain2.n):
        for y in all_subsets(point.n):
            j = subset_topology(chain2, x)
            k = subset_topology(point, y)
            assert adjoint_transfer_consistent(phi, pi, j, k)


def test_adjoint_transfer_truncation_pair():
    chain2 = catalog_poset("chain2")
    chain3 = catalog_poset("chain3")
    pi = OrderMorphism(chain2, chain3, (0, 1))
    phi = OrderMorphism(chain3, chain2, (0, 1, 1))
    for x in all_subsets(chain3.n):
        for y in all_subsets(chain2.n):
            j = subset_topology(chain3, x)
            k = subset_topology(chain2, y)
            assert adjoint_transfer_consistent(phi, pi, j, k)


def test_adjoint_transfer_rejects_non_adjoint_pairs():
    chain2 = catalog_poset("chain2")
    top = OrderMorphism(chain2, chain2, (1, 1))
    ident = OrderMorphism(chain2, chain2, (0, 1))
    with pytest.raises(PosetMismatchError):
        adjoint_transfer_consistent(top, top, indiscrete_topology(chain2), indiscrete_topology(chain2))
    with pytest.raises(PosetMismatchError):
        adjoint_transfer_consistent(
            ident,
            OrderMorphism(chain2, catalog_poset("point"), (0, 0)),
            indiscrete_topology(chain2),
            indiscrete_topology(chain2),
        )


# -- subcanonicity ---------------------------------------------------------


def test_wedge_subcanonicity_example():
    lam = catalog_poset("Lambda")
    good = subset_topology(lam, subset_of_labels(lam, ["y", "z"]))
    assert is_subcanonical(lam, good)
    assert subcanonicity_report(lam, good) == ()
    bad_subset = subset_of_labels(lam, ["y"])
    bad = subset_topology(lam, bad_subset)
    assert not is_subcanonical(lam, bad)
    witnesses = subset_subcanonicity_witnesses(lam, bad_subset)
    p, value = witnesses[0]
    assert lam.labels[p] == "x"
    assert value == lam.down(lam.index_of("z"))


def test_indiscrete_is_subcanonical(catalog_pair):
    _, p = catalog_pair
    assert is_subcanonical(p, indiscrete_topology(p))


def test_heyting_criterion_matches_representables(catalog_pair):
    _, p = catalog_pair
    for x in all_subsets(p.n):
        witnesses = {q for q, _ in subset_subcanonicity_witnesses(p, x)}
        j = subset_topology(p, x)
        for q in range(p.n):
            assert representable_is_sheaf(p, j, q) == (q not in witnesses)
        if p.is_downwards_directed():
            k = derived_topology(p, x)
            for q in range(p.n):
                assert representable_is_sheaf(p, k, q) == (q not in witnesses)


def test_canonical_subset_search():
    lam = catalog_poset("Lambda")
    report = canonical_subset_report(lam)
    assert report.unique
    assert report.subset == subset_of_labels(lam, ["y", "z"])
    chain2 = catalog_poset("chain2")
    report = canonical_subset_report(chain2)
    assert report.unique and report.subset == frozenset({1})
    for name, p in catalog().items():
        rep = canonical_subset_report(p)
        for x in rep.minimal_subsets:
            assert not subset_subcanonicity_witnesses(p, x)
            for drop in x:
                assert subset_subcanonicity_witnesses(p, x - {drop})
