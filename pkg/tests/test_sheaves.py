"""Presheaves, matching families, sheaf conditions, and the equivalences."""

import pytest
from conftest import all_subsets

from sitecalc import (
    BasePointError,
    FunctorialityError,
    NotDenseError,
    NotDownwardsDirectedError,
    NotMatchingError,
    Presheaf,
    TooLargeError,
    adjoin_zero,
    amalgamations,
    atomic_topology,
    catalog_poset,
    choose_base_point,
    comparison_check,
    derived_topology,
    discrete_topology,
    enumerate_all_topologies,
    enumerate_presheaves,
    extend_presheaf,
    indiscrete_topology,
    is_sheaf,
    kx_sheaf_equivalence_check,
    matching_families,
    natural_iso_exists,
    restrict_presheaf,
    subset_of_labels,
    subset_topology,
    topology_leq,
    validate_presheaf,
    yoneda_presheaf,
)

CHAIN2 = catalog_poset("chain2")


def constant_presheaf(poset, size):
    maps = {}
    for q in range(poset.n):
        for p in poset.up(q) - {q}:
            maps[(q, p)] = tuple(range(size))
    return Presheaf(poset, (size,) * poset.n, maps)


def test_constant_presheaf_is_valid(catalog_pair):
    _, p = catalog_pair
    validate_presheaf(constant_presheaf(p, 2))


def test_two_point_chain_presheaf():
    f = Presheaf(CHAIN2, (1, 2), {(0, 1): (0, 0)})
    assert f.restriction(0, 1) == (0, 0)
    assert f.restriction(1, 1) == (0, 1)


def test_broken_composite_is_rejected():
    chain3 = catalog_poset("chain3")
    maps = {
        (0, 1): (0, 1),
        (1, 2): (0, 1),
        (0, 2): (1, 0),  # disagrees with the composite
    }
    with pytest.raises(FunctorialityError) as exc:
        Presheaf(chain3, (2, 2, 2), maps)
    assert (exc.value.r, exc.value.q, exc.value.p) == (0, 1, 2)


def test_presheaf_shape_errors():
    with pytest.raises(FunctorialityError):
        Presheaf(CHAIN2, (1, 2), {})  # missing restriction
    with pytest.raises(FunctorialityError):
        Presheaf(CHAIN2, (1, 2), {(0, 1): (0, 2)})  # value out of range


def test_amalgamation_of_maximal_cover():
    f = constant_presheaf(CHAIN2, 2)
    for a in range(2):
        family = {0: f.restriction(0, 1)[a], 1: a}
        assert amalgamations(f, 1, {0, 1}, family) == (a,)


def test_empty_cover_amalgamations():
    f = constant_presheaf(CHAIN2, 2)
    assert amalgamations(f, 1, frozenset(), {}) == (0, 1)


def test_collapsing_restriction_amalgamations():
    f = Presheaf(CHAIN2, (1, 2), {(0, 1): (0, 0)})
    assert amalgamations(f, 1, {0}, {0: 0}) == (0, 1)


def test_non_matching_family_is_rejected():
    chain3 = catalog_poset("chain3")
    f = constant_presheaf(chain3, 2)
    with pytest.raises(NotMatchingError):
        amalgamations(f, 2, {0, 1}, {0: 0, 1: 1})


def test_matching_families_are_deterministic():
    f = constant_presheaf(CHAIN2, 2)
    fams = list(matching_families(f, {0, 1}))
    assert fams == [{0: 0, 1: 0}, {0: 1, 1: 1}]


def test_everything_is_a_sheaf_for_indiscrete(catalog_pair):
    _, p = catalog_pair
    if p.n > 3:
        return
    j = indiscrete_topology(p)
    for f in enumerate_presheaves(p, 2):
        assert is_sheaf(f, j).ok


def test_discrete_sheaves_are_singleton_valued(catalog_pair):
    _, p = catalog_pair
    if p.n > 3:
        return
    j = discrete_topology(p)
    for f in enumerate_presheaves(p, 2):
        assert is_sheaf(f, j).ok == all(s == 1 for s in f.sizes)


def test_atomic_sheaves_have_bijective_restrictions():
    for name in ("chain2", "chain3"):
        p = catalog_poset(name)
        j = atomic_topology(p)
        for f in enumerate_presheaves(p, 2):
            if is_sheaf(f, j).ok:
                for q in range(p.n):
                    for r in p.up(q) - {q}:
                        tab = f.restriction(q, r)
                        assert len(set(tab)) == f.sizes[r] == f.sizes[q]


def test_sheaf_witness_shape():
    j = discrete_topology(CHAIN2)
    check = is_sheaf(constant_presheaf(CHAIN2, 2), j)
    assert not check.ok
    assert check.witness["cover"] == []


def test_restriction_of_presheaves():
    f = constant_presheaf(catalog_poset("chain3"), 2)
    r = restrict_presheaf(f, {0, 2})
    assert r.sizes == (2, 2)
    assert r.restriction(0, 1) == (0, 1)
    full = restrict_presheaf(f, range(3))
    assert full == f
    single = restrict_presheaf(f, {0})
    assert single.sizes == (2,)


def test_extension_outside_the_cone_is_singleton():
    lam = catalog_poset("Lambda")
    xs = subset_of_labels(lam, ["y"])
    base = constant_presheaf(lam.induced(sorted(xs)), 2)
    ext = extend_presheaf(base, lam, xs)
    z = lam.index_of("z")
    assert ext.presheaf.sizes[z] == 1
    assert ext.support[z] == ()


def test_extension_along_everything_is_evaluation():
    for name in ("chain2", "V", "Lambda"):
        p = catalog_poset(name)
        full = frozenset(range(p.n))
        for base in enumerate_presheaves(p, 2):
            ext = extend_presheaf(base, p, full)
            assert ext.presheaf.sizes == base.sizes
            assert natural_iso_exists(ext.presheaf, base)


def test_extension_example_on_chain2():
    base = Presheaf(CHAIN2.induced([0]), (2,), {})
    ext = extend_presheaf(base, CHAIN2, {0})
    assert ext.presheaf.sizes == (2, 2)
    assert len(set(ext.presheaf.restriction(0, 1))) == 2


def test_enumerate_presheaf_counts():
    assert len(enumerate_presheaves(catalog_poset("point"), 1)) == 2
    assert len(enumerate_presheaves(CHAIN2, 0)) == 1
    assert len(enumerate_presheaves(CHAIN2, 1)) == 3


def test_enumerate_presheaves_matches_raw_filter_oracle():
    # oracle: assign every strict-pair map directly and filter functor laws
    from itertools import product

    chain3 = catalog_poset("chain3")
    count = 0
    for sizes in product(range(3), repeat=3):
        pairs = [(0, 1), (1, 2), (0, 2)]
        tables = [
            list(product(range(sizes[q]), repeat=sizes[p])) for q, p in pairs
        ]
        for combo in product(*tables):
            maps = dict(zip(pairs, combo))
            composite = tuple(maps[(0, 1)][maps[(1, 2)][a]] for a in range(sizes[2]))
            if composite == tuple(maps[(0, 2)]):
                count += 1
    assert count == len(enumerate_presheaves(chain3, 2))


def test_enumerate_presheaves_caps():
    with pytest.raises(TooLargeError):
        enumerate_presheaves(catalog_poset("diamond"), 2)
    with pytest.raises(TooLargeError):
        enumerate_presheaves(CHAIN2, 3)
    assert enumerate_presheaves(catalog_poset("diamond"), 1, max_elements=4)


def test_yoneda_examples():
    top = yoneda_presheaf(CHAIN2, 1)
    assert top.sizes == (1, 1)
    bottom = yoneda_presheaf(CHAIN2, 0)
    assert bottom.sizes == (1, 0)


def test_yoneda_matches_representable_criterion():
    from sitecalc import catalog, representable_is_sheaf

    for name, p in catalog().items():
        for j in enumerate_all_topologies(p):
            for q in range(p.n):
                assert is_sheaf(yoneda_presheaf(p, q), j).ok == representable_is_sheaf(
                    p, j, q
                ), name


def test_sheaf_sets_shrink_as_topologies_grow():
    for name in ("chain2", "antichain2", "chain3", "antichain3", "V", "Lambda"):
        p = catalog_poset(name)
        presheaves = enumerate_presheaves(p, 2)
        tops = enumerate_all_topologies(p)
        sheaves = {
            t: {i for i, f in enumerate(presheaves) if is_sheaf(f, t).ok} for t in tops
        }
        for j in tops:
            for k in tops:
                if topology_leq(j, k):
                    assert sheaves[k] <= sheaves[j]


def test_extension_is_a_sheaf_on_big_catalog_posets():
    # the small-poset sweep lives in the acceptance suite; the four-element
    # posets are covered here at value cap 1
    for name in ("chain4", "diamond"):
        p = catalog_poset(name)
        for x in all_subsets(p.n):
            j = subset_topology(p, x)
            sub = p.induced(sorted(x))
            for base in enumerate_presheaves(sub, 1, max_elements=4):
                ext = extend_presheaf(base, p, x)
                assert is_sheaf(ext.presheaf, j).ok, (name, x, base.sizes)


def test_restriction_of_a_sheaf_satisfies_the_induced_condition():
    from sitecalc import restrict_topology

    for name in ("chain3", "V", "Lambda"):
        p = catalog_poset(name)
        for x in all_subsets(p.n):
            j = subset_topology(p, x)
            induced = restrict_topology(p, j, x)
            for f in enumerate_presheaves(p, 2):
                if is_sheaf(f, j).ok:
                    assert is_sheaf(restrict_presheaf(f, x), induced).ok


def test_derived_sheaves_match_bottomed_subset_topology():
    for name in ("chain2", "chain3", "Lambda"):
        p = catalog_poset(name)
        bottom = p.least_element()
        for x in all_subsets(p.n):
            kx = derived_topology(p, x)
            jx0 = subset_topology(p, x | {bottom})
            assert kx == jx0
            for f in enumerate_presheaves(p, 1):
                assert is_sheaf(f, kx).ok == is_sheaf(f, jx0).ok


def test_amalgamation_recipe_matches_direct_search():
    # extend a family over the generating cut to its full sieve, amalgamate,
    # and compare with the search over all values
    for name in ("chain3", "V", "Lambda"):
        p = catalog_poset(name)
        for x in all_subsets(p.n):
            j = subset_topology(p, x)
            for f in enumerate_presheaves(p, 2):
                if not is_sheaf(f, j).ok:
                    continue
                for q in range(p.n):
                    cut = sorted(x & p.down(q))
                    sieve = p.down_closure(cut)
                    for fam in matching_families(f, cut):
                        extended = {
                            z: f.restriction(z, next(c for c in cut if p.leq(z, c)))[
                                fam[next(c for c in cut if p.leq(z, c))]
                            ]
                            for z in sieve
                        }
                        via_recipe = amalgamations(f, q, sieve, extended)
                        direct = tuple(
                            a
                            for a in range(f.sizes[q])
                            if all(f.restriction(c, q)[a] == fam[c] for c in cut)
                        )
                        assert via_recipe == direct


def test_comparison_check_requires_denseness():
    with pytest.raises(NotDenseError):
        comparison_check(CHAIN2, frozenset({0}), indiscrete_topology(CHAIN2))


def test_comparison_check_on_subset_topologies():
    for name in ("chain2", "V"):
        p = catalog_poset(name)
        for x in all_subsets(p.n):
            report = comparison_check(p, x, subset_topology(p, x))
            assert report.ok
            assert all(r.base_is_sheaf for r in report.records)
            assert all(r.extension_is_sheaf for r in report.records)


def test_comparison_check_with_strictly_larger_topology():
    # the subset stays dense for any larger topology; only induced sheaves
    # are promised to extend
    p = catalog_poset("chain3")
    x = frozenset({0, 1})
    j = subset_topology(p, {0})
    report = comparison_check(p, x, j)
    assert report.ok
    assert any(not r.base_is_sheaf for r in report.records)


def test_adjoin_zero():
    p0 = adjoin_zero(catalog_poset("V"))
    assert p0.n == 4
    assert p0.least_element() == 3
    assert p0.labels[3] == "0"
    chain2_0 = adjoin_zero(CHAIN2)
    assert chain2_0.labels[2] == "bot"
    assert chain2_0.least_element() == 2


def test_choose_base_point():
    lam = catalog_poset("Lambda")
    assert choose_base_point(lam, subset_of_labels(lam, ["y"])) == lam.index_of("x")
    with pytest.raises(BasePointError):
        choose_base_point(lam, subset_of_labels(lam, ["x"]))


def test_kx_equivalence_on_chain2_without_generators():
    report = kx_sheaf_equivalence_check(CHAIN2, frozenset())
    assert report.ok
    assert not report.reduced_to_subset_case
    assert report.base_point == 0
    # one-point value census: sheaves are constant up to isomorphism
    assert report.sheaf_classes == report.transported_classes
    for f in enumerate_presheaves(CHAIN2, 2):
        if is_sheaf(f, derived_topology(CHAIN2, frozenset())).ok:
            assert len(set(f.restriction(0, 1))) == f.sizes[1] == f.sizes[0]


def test_kx_equivalence_reduces_when_cone_covers():
    report = kx_sheaf_equivalence_check(CHAIN2, frozenset({0}))
    assert report.ok
    assert report.reduced_to_subset_case
    assert report.base_point is None


def test_kx_equivalence_on_wedge():
    lam = catalog_poset("Lambda")
    report = kx_sheaf_equivalence_check(lam, subset_of_labels(lam, ["y"]))
    assert report.ok
    assert report.base_point == lam.index_of("x")
    assert report.sheaf_classes == report.transported_classes


def test_comparison_check_on_diamond_antichain_subset():
    d = catalog_poset("diamond")
    x = subset_of_labels(d, ["a", "b"])
    report = comparison_check(d, x, subset_topology(d, x))
    assert report.ok
    assert all(r.extension_is_sheaf for r in report.records)


def test_kx_equivalence_on_diamond():
    # the subset cone misses the bottom and one middle element, so the
    # equivalence routes through the freely adjoined bottom
    d = catalog_poset("diamond")
    report = kx_sheaf_equivalence_check(d, subset_of_labels(d, ["a"]), value_cap=2)
    assert report.ok
    assert not report.reduced_to_subset_case
    assert report.base_point == d.index_of("0")
    # presheaf classes on the two-point target, sizes <= 2, counted by hand
    assert report.sheaf_classes == report.transported_classes == 8
    assert report.covered_classes == 8 and report.cap_skipped_classes == 0


def test_kx_equivalence_needs_directedness():
    with pytest.raises(NotDownwardsDirectedError):
        kx_sheaf_equivalence_check(catalog_poset("V"), frozenset())
    # the wedge with its least element removed is a bare antichain
    lam = catalog_poset("Lambda")
    pruned = lam.induced(sorted(subset_of_labels(lam, ["y", "z"])))
    with pytest.raises(NotDownwardsDirectedError):
        kx_sheaf_equivalence_check(pruned, frozenset())


def test_natural_iso_search():
    f = Presheaf(CHAIN2, (2, 2), {(0, 1): (0, 1)})
    g = Presheaf(CHAIN2, (2, 2), {(0, 1): (1, 0)})
    h = Presheaf(CHAIN2, (2, 2), {(0, 1): (0, 0)})
    assert natural_iso_exists(f, g)
    assert not natural_iso_exists(f, h)


def test_presheaf_json_round_trip():
    f = Presheaf(CHAIN2, (1, 2), {(0, 1): (0, 0)})
    assert Presheaf.from_json(f.to_json()) == f


def test_matching_family_value_type():
    from sitecalc import MatchingFamily

    fam = MatchingFamily(apex=1, cover=frozenset({0}), assignment=((0, 1),))
    assert fam.value_at(0) == 1
    with pytest.raises(KeyError):
        fam.value_at(1)
    f = constant_presheaf(CHAIN2, 2)
    wrapped = MatchingFamily(apex=1, cover=frozenset({0}), assignment=((0, 0),))
    assert amalgamations(f, 1, wrapped.cover, wrapped) == (0,)


def test_natural_transformation_type():
    from sitecalc import NaturalTransformation

    f = constant_presheaf(CHAIN2, 2)
    nt = NaturalTransformation(f, f, ((0, 1), (0, 1)))
    assert nt.is_bijective()
    swap = NaturalTransformation(f, f, ((1, 0), (1, 0)))
    assert swap.is_bijective()
    with pytest.raises(ValueError):
        NaturalTransformation(f, f, ((0, 1), (1, 0)))  # squares fail
    collapse = NaturalTransformation(f, f, ((0, 0), (0, 0)))
    assert not collapse.is_bijective()
