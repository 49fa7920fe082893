"""Finite-set-valued presheaves, sheaf conditions, and the restriction /
extension equivalence along a dense subset.

Value sets are canonical finite sets ``{0..m-1}``; restriction maps are
tuples indexed by the upstairs value.  Natural-isomorphism checks compare
componentwise bijections, never abstract equivalences: the explicit
unit/counit maps are constructed and tested for bijectivity and
naturality.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    BasePointError,
    FunctorialityError,
    NotDenseError,
    NotDownwardsDirectedError,
    NotMatchingError,
    ParseError,
    PosetMismatchError,
    TooLargeError,
)
from .poset import FinitePoset
from .sites import (
    GrothTopology,
    _members_key,
    dense_violation,
    derived_topology,
    restrict_topology,
    subset_topology,
)

DEFAULT_ELEMENT_CAP = 3
DEFAULT_VALUE_CAP = 2


class Presheaf:
    """A contravariant finite-set assignment with restriction maps.

    ``sizes[p]`` is the cardinality of the value at ``p``; ``maps[(q, p)]``
    (for each strict comparable pair) sends values at ``p`` down to values
    at ``q``.  Identity and composition laws are enforced on construction.
    """

    __slots__ = ("poset", "sizes", "maps", "_key")

    def __init__(
        self,
        poset: FinitePoset,
        sizes: Sequence[int],
        maps: Mapping[tuple[int, int], Sequence[int]],
    ):
        self.poset = poset
        self.sizes = tuple(sizes)
        if len(self.sizes) != poset.n or any(s < 0 for s in self.sizes):
            raise ParseError(f"bad value sizes {self.sizes}")
        cleaned: dict[tuple[int, int], tuple[int, ...]] = {}
        for q in range(poset.n):
            for p in poset.up(q) - {q}:
                if (q, p) not in maps:
                    raise FunctorialityError(
                        f"missing restriction for {poset.labels[q]} <= {poset.labels[p]}",
                        q=q,
                        p=p,
                    )
                tab = tuple(maps[(q, p)])
                if len(tab) != self.sizes[p] or any(
                    not 0 <= v < self.sizes[q] for v in tab
                ):
                    raise FunctorialityError(
                        f"restriction for {poset.labels[q]} <= {poset.labels[p]} "
                        f"is not a function between the value sets",
                        q=q,
                        p=p,
                    )
                cleaned[(q, p)] = tab
        for key in maps:
            if key not in cleaned:
                raise ParseError(f"restriction {key} does not match a strict pair")
        self.maps = cleaned
        for r in range(poset.n):
            for q in poset.up(r) - {r}:
                for p in poset.up(q) - {q}:
                    via = tuple(
                        cleaned[(r, q)][cleaned[(q, p)][a]] for a in range(self.sizes[p])
                    )
                    if via != cleaned[(r, p)]:
                        raise FunctorialityError(
                            f"composite restriction violated at "
                            f"{poset.labels[r]} <= {poset.labels[q]} <= {poset.labels[p]}",
                            r=r,
                            q=q,
                            p=p,
                        )
        self._key = (poset, self.sizes, tuple(sorted(self.maps.items())))

    def restriction(self, q: int, p: int) -> tuple[int, ...]:
        if q == p:
            return tuple(range(self.sizes[p]))
        return self.maps[(q, p)]

    def value(self, p: int) -> range:
        return range(self.sizes[p])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Presheaf) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"<Presheaf sizes={list(self.sizes)}>"

    def to_json(self) -> dict:
        labels = self.poset.labels
        return {
            "poset": self.poset.to_json(),
            "values": {labels[p]: self.sizes[p] for p in range(self.poset.n)},
            "maps": {
                f"{labels[q]}<={labels[p]}": list(tab)
                for (q, p), tab in sorted(self.maps.items())
            },
        }

    @classmethod
    def from_json(cls, doc: dict, poset: FinitePoset | None = None) -> "Presheaf":
        poset = poset if poset is not None else FinitePoset.from_json(doc["poset"])
        sizes = [0] * poset.n
        for label, size in doc.get("values", {}).items():
            sizes[poset.index_of(label)] = int(size)
        maps = {}
        for key, tab in doc.get("maps", {}).items():
            if "<=" not in key:
                raise ParseError(f"bad restriction key {key!r}")
            qlab, plab = key.split("<=", 1)
            maps[(poset.index_of(qlab.strip()), poset.index_of(plab.strip()))] = tab
        return cls(poset, sizes, maps)


def validate_presheaf(presheaf: Presheaf) -> Presheaf:
    """Functor laws are enforced by the constructor; revalidate a value."""
    return Presheaf(presheaf.poset, presheaf.sizes, presheaf.maps)


@dataclass(frozen=True)
class MatchingFamily:
    """A compatible choice of local values over a cover sieve."""

    apex: int
    cover: frozenset[int]
    assignment: tuple[tuple[int, int], ...]  # (element, value) pairs, sorted

    def value_at(self, x: int) -> int:
        for e, v in self.assignment:
            if e == x:
                return v
        raise KeyError(x)


def matching_violation(
    presheaf: Presheaf, cover: Iterable[int], assignment: Mapping[int, int]
) -> tuple[int, int] | None:
    """A pair (y, x) with y <= x whose restriction disagrees, or None."""
    poset = presheaf.poset
    elems = sorted(cover)
    for x in elems:
        for y in elems:
            if y != x and poset.leq(y, x):
                if presheaf.restriction(y, x)[assignment[x]] != assignment[y]:
                    return (y, x)
    return None


def matching_families(
    presheaf: Presheaf, cover: Iterable[int]
) -> Iterator[dict[int, int]]:
    """All matching families over a cover, in lexicographic value order."""
    poset = presheaf.poset
    elems = sorted(cover)
    assignment: dict[int, int] = {}

    def extend(idx: int) -> Iterator[dict[int, int]]:
        if idx == len(elems):
            yield dict(assignment)
            return
        x = elems[idx]
        for v in range(presheaf.sizes[x]):
            ok = True
            for y in elems[:idx]:
                if poset.leq(y, x) and presheaf.restriction(y, x)[v] != assignment[y]:
                    ok = False
                    break
                if poset.leq(x, y) and presheaf.restriction(x, y)[assignment[y]] != v:
                    ok = False
                    break
            if ok:
                assignment[x] = v
                yield from extend(idx + 1)
                del assignment[x]

    return extend(0)


def amalgamations(
    presheaf: Presheaf,
    p: int,
    cover: Iterable[int],
    assignment: Mapping[int, int] | MatchingFamily,
) -> tuple[int, ...]:
    """All values at p restricting to the family on every cover element."""
    if isinstance(assignment, MatchingFamily):
        assignment = dict(assignment.assignment)
    cover = frozenset(cover)
    bad = matching_violation(presheaf, cover, assignment)
    if bad is not None:
        labels = presheaf.poset.labels
        raise NotMatchingError(
            f"family is not matching at {labels[bad[0]]} <= {labels[bad[1]]}",
            witness={"y": labels[bad[0]], "x": labels[bad[1]]},
        )
    return tuple(
        a
        for a in range(presheaf.sizes[p])
        if all(presheaf.restriction(x, p)[a] == assignment[x] for x in cover)
    )


@dataclass(frozen=True)
class SheafCheck:
    ok: bool
    witness: dict | None = None


def is_sheaf(presheaf: Presheaf, topology: GrothTopology) -> SheafCheck:
    """Unique amalgamation for every matching family of every cover."""
    if presheaf.poset != topology.poset:
        raise PosetMismatchError("presheaf and topology live on different posets")
    poset = presheaf.poset
    for p in range(poset.n):
        for cover in sorted(topology.covers[p], key=_members_key):
            for family in matching_families(presheaf, cover):
                hits = amalgamations(presheaf, p, cover, family)
                if len(hits) != 1:
                    return SheafCheck(
                        ok=False,
                        witness={
                            "p": poset.labels[p],
                            "cover": [poset.labels[i] for i in sorted(cover)],
                            "family": {poset.labels[k]: v for k, v in family.items()},
                            "amalgamations": list(hits),
                        },
                    )
    return SheafCheck(ok=True)


# -- restriction and extension ------------------------------------------------


def restrict_presheaf(presheaf: Presheaf, subset: Iterable[int]) -> Presheaf:
    """Reindex values and restrictions to the induced subposet."""
    poset = presheaf.poset
    elems = sorted(set(subset))
    sub = poset.induced(elems)
    sizes = [presheaf.sizes[e] for e in elems]
    maps = {}
    for kq, q in enumerate(elems):
        for kp, p in enumerate(elems):
            if q != p and poset.leq(q, p):
                maps[(kq, kp)] = presheaf.restriction(q, p)
    return Presheaf(sub, sizes, maps)


@dataclass(frozen=True)
class ExtendedPresheaf:
    """The right-extension of a presheaf on a subset to the whole poset.

    The value at p is the set of compatible families over the subset
    elements below p, stored as explicit tuples in support order;
    restriction is tuple truncation.
    """

    presheaf: Presheaf
    base: Presheaf
    subset: frozenset[int]
    support: tuple[tuple[int, ...], ...]  # per p: subset & down(p), sorted
    families: tuple[tuple[tuple[int, ...], ...], ...]  # per p: family tuples

    def family_index(self, p: int, family: tuple[int, ...]) -> int:
        return self.families[p].index(family)


def extend_presheaf(
    base: Presheaf, poset: FinitePoset, subset: Iterable[int]
) -> ExtendedPresheaf:
    """Materialize compatible families below each element.

    ``base`` lives on the induced subposet of ``subset``.
    """
    elems = sorted(set(subset))
    pos = {e: k for k, e in enumerate(elems)}
    if base.poset != poset.induced(elems):
        raise PosetMismatchError("base presheaf is not on the induced subposet")
    support = []
    families = []
    for p in range(poset.n):
        xs = sorted(frozenset(elems) & poset.down(p))
        support.append(tuple(xs))
        fams: list[tuple[int, ...]] = []
        current: list[int] = []

        def build(idx: int) -> None:
            if idx == len(xs):
                fams.append(tuple(current))
                return
            x = xs[idx]
            for v in range(base.sizes[pos[x]]):
                ok = True
                for j in range(idx):
                    y = xs[j]
                    if poset.leq(y, x) and (
                        base.restriction(pos[y], pos[x])[v] != current[j]
                    ):
                        ok = False
                        break
                    if poset.leq(x, y) and (
                        base.restriction(pos[x], pos[y])[current[j]] != v
                    ):
                        ok = False
                        break
                if ok:
                    current.append(v)
                    build(idx + 1)
                    current.pop()

        build(0)
        families.append(tuple(fams))
    sizes = [len(f) for f in families]
    maps = {}
    for q in range(poset.n):
        for p in poset.up(q) - {q}:
            keep = [i for i, x in enumerate(support[p]) if x in set(support[q])]
            lookup = {fam: i for i, fam in enumerate(families[q])}
            maps[(q, p)] = tuple(
                lookup[tuple(fam[i] for i in keep)] for fam in families[p]
            )
    presheaf = Presheaf(poset, sizes, maps)
    return ExtendedPresheaf(
        presheaf, base, frozenset(elems), tuple(support), tuple(families)
    )


# -- natural transformations ---------------------------------------------------


def naturality_failure(
    source: Presheaf, target: Presheaf, components: Sequence[Sequence[int]]
) -> tuple[int, int] | None:
    """A strict pair (q, p) whose naturality square fails, or None."""
    poset = source.poset
    for q in range(poset.n):
        for p in poset.up(q) - {q}:
            for a in range(source.sizes[p]):
                left = target.restriction(q, p)[components[p][a]]
                right = components[q][source.restriction(q, p)[a]]
                if left != right:
                    return (q, p)
    return None


@dataclass(frozen=True)
class NaturalTransformation:
    """Componentwise map between presheaves with commuting squares."""

    source: Presheaf
    target: Presheaf
    components: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.source.poset != self.target.poset:
            raise PosetMismatchError("components between different posets")
        for p in range(self.source.poset.n):
            comp = self.components[p]
            if len(comp) != self.source.sizes[p] or any(
                not 0 <= v < self.target.sizes[p] for v in comp
            ):
                raise ValueError(f"component at {p} is not a function")
        bad = naturality_failure(self.source, self.target, self.components)
        if bad is not None:
            raise ValueError(f"naturality square fails at pair {bad}")

    def is_bijective(self) -> bool:
        return all(
            self.source.sizes[p] == self.target.sizes[p]
            and len(set(self.components[p])) == self.source.sizes[p]
            for p in range(self.source.poset.n)
        )


def natural_iso_exists(f: Presheaf, g: Presheaf) -> bool:
    """Search for a componentwise bijection commuting with restrictions."""
    if f.poset != g.poset or f.sizes != g.sizes:
        return False
    poset = f.poset
    comps: dict[int, tuple[int, ...]] = {}

    def bijections(m: int) -> Iterator[tuple[int, ...]]:
        return (perm for perm in product(range(m), repeat=m) if len(set(perm)) == m)

    def consistent(p: int, comp: tuple[int, ...]) -> bool:
        for q, cq in comps.items():
            if poset.lt(q, p):
                if any(
                    g.restriction(q, p)[comp[a]] != cq[f.restriction(q, p)[a]]
                    for a in range(f.sizes[p])
                ):
                    return False
            if poset.lt(p, q):
                if any(
                    g.restriction(p, q)[cq[a]] != comp[f.restriction(p, q)[a]]
                    for a in range(f.sizes[q])
                ):
                    return False
        return True

    def assign(p: int) -> bool:
        if p == poset.n:
            return True
        for comp in bijections(f.sizes[p]):
            if consistent(p, comp):
                comps[p] = comp
                if assign(p + 1):
                    return True
                del comps[p]
        return False

    return assign(0)


def iso_class_count(presheaves: Sequence[Presheaf]) -> int:
    reps: list[Presheaf] = []
    for f in presheaves:
        if not any(natural_iso_exists(f, r) for r in reps):
            reps.append(f)
    return len(reps)


# -- representables and enumeration --------------------------------------------


def yoneda_presheaf(poset: FinitePoset, p: int) -> Presheaf:
    """Singleton values on the down-set of p, empty elsewhere."""
    sizes = [1 if poset.leq(q, p) else 0 for q in range(poset.n)]
    maps = {}
    for q in range(poset.n):
        for r in poset.up(q) - {q}:
            maps[(q, r)] = (0,) * sizes[r]
    return Presheaf(poset, sizes, maps)


def enumerate_presheaves(
    poset: FinitePoset,
    value_cap: int = DEFAULT_VALUE_CAP,
    max_elements: int = DEFAULT_ELEMENT_CAP,
    max_value_cap: int = DEFAULT_VALUE_CAP,
) -> list[Presheaf]:
    """Every functor with canonical value sets of size up to ``value_cap``.

    Maps are enumerated on cover edges only and composed along canonical
    paths; path consistency is certified by the constructor.  Shapes that
    would need a function into an empty set are skipped automatically.
    """
    if poset.n > max_elements or value_cap > max_value_cap:
        raise TooLargeError(
            f"{poset.n} elements at value cap {value_cap} exceeds the configured caps",
            witness={"max_elements": max_elements, "max_value_cap": max_value_cap},
        )
    edges = poset.covers()
    out: list[Presheaf] = []
    for sizes in product(range(value_cap + 1), repeat=poset.n):
        edge_maps: dict[tuple[int, int], tuple[int, ...]] = {}

        def full_map(q: int, p: int, memo: dict) -> tuple[int, ...]:
            if (q, p) in memo:
                return memo[(q, p)]
            if (q, p) in edge_maps:
                memo[(q, p)] = edge_maps[(q, p)]
                return edge_maps[(q, p)]
            r = min(
                r for (r, pp) in edges if pp == p and poset.leq(q, r) and r != p
            )
            lower = full_map(q, r, memo) if q != r else tuple(range(sizes[r]))
            upper = edge_maps[(r, p)]
            memo[(q, p)] = tuple(lower[a] for a in upper)
            return memo[(q, p)]

        def assign(idx: int) -> None:
            if idx == len(edges):
                memo: dict = {}
                maps = {}
                for q in range(poset.n):
                    for p in poset.up(q) - {q}:
                        maps[(q, p)] = full_map(q, p, memo)
                try:
                    out.append(Presheaf(poset, sizes, maps))
                except FunctorialityError:
                    pass
                return
            q, p = edges[idx]
            for tab in product(range(sizes[q]), repeat=sizes[p]):
                edge_maps[(q, p)] = tab
                assign(idx + 1)
                del edge_maps[(q, p)]

        assign(0)
    return out


# -- the restriction/extension equivalence --------------------------------------


@dataclass(frozen=True)
class ComparisonRecord:
    index: int
    base_is_sheaf: bool
    extension_is_sheaf: bool
    counit_bijective: bool
    counit_natural: bool
    unit_bijective: bool | None
    unit_natural: bool | None

    @property
    def ok(self) -> bool:
        if not (self.counit_bijective and self.counit_natural):
            return False
        if self.base_is_sheaf:
            return bool(
                self.extension_is_sheaf and self.unit_bijective and self.unit_natural
            )
        return True


@dataclass(frozen=True)
class ComparisonReport:
    records: tuple[ComparisonRecord, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)


def _counit_components(ext: ExtendedPresheaf, elems: list[int]) -> list[tuple[int, ...]]:
    """Evaluation at the subset point itself: family |-> family value there."""
    comps = []
    for k, x in enumerate(elems):
        at = ext.support[x].index(x)
        comps.append(tuple(fam[at] for fam in ext.families[x]))
    return comps


def _unit_components(
    ext: ExtendedPresheaf, sheaf: Presheaf
) -> tuple[list[tuple[int, ...]], bool]:
    """Each family maps to its unique amalgamation in the sheaf; returns the
    components plus a flag that every amalgamation was unique."""
    poset = sheaf.poset
    comps = []
    all_unique = True
    for p in range(poset.n):
        xs = ext.support[p]
        col = []
        for fam in ext.families[p]:
            hits = [
                a
                for a in range(sheaf.sizes[p])
                if all(
                    sheaf.restriction(x, p)[a] == fam[i] for i, x in enumerate(xs)
                )
            ]
            if len(hits) != 1:
                all_unique = False
                col.append(hits[0] if hits else 0)
            else:
                col.append(hits[0])
        comps.append(tuple(col))
    return comps, all_unique


def _is_bijection_columns(components: Sequence[Sequence[int]], sizes: Sequence[int]) -> bool:
    return all(
        len(set(col)) == len(col) == size for col, size in zip(components, sizes)
    )


def comparison_check(
    poset: FinitePoset,
    subset: Iterable[int],
    topology: GrothTopology,
    base_presheaves: Sequence[Presheaf] | None = None,
    value_cap: int = DEFAULT_VALUE_CAP,
) -> ComparisonReport:
    """Certify the restriction/extension equivalence on a sample.

    The subset must be dense for the topology.  For every presheaf on the
    subset: the counit (evaluation) components are natural bijections; when
    it satisfies the induced sheaf condition, its extension satisfies the
    ambient one and the unit (amalgamation) components are natural
    bijections.
    """
    xs = frozenset(subset)
    bad = dense_violation(poset, topology, xs)
    if bad is not None:
        raise NotDenseError(
            f"subset is not dense at {poset.labels[bad]}",
            witness={"p": poset.labels[bad]},
        )
    elems = sorted(xs)
    induced = restrict_topology(poset, topology, xs)
    if base_presheaves is None:
        base_presheaves = enumerate_presheaves(
            poset.induced(elems), value_cap, max_elements=poset.n, max_value_cap=value_cap
        )
    records = []
    for idx, base in enumerate(base_presheaves):
        base_ok = is_sheaf(base, induced).ok
        ext = extend_presheaf(base, poset, xs)
        ext_ok = is_sheaf(ext.presheaf, topology).ok
        counit = _counit_components(ext, elems)
        restricted = restrict_presheaf(ext.presheaf, xs)
        counit_bij = _is_bijection_columns(counit, base.sizes)
        counit_nat = naturality_failure(restricted, base, counit) is None
        unit_bij = unit_nat = None
        if base_ok and ext_ok:
            sheaf = ext.presheaf
            re_ext = extend_presheaf(restrict_presheaf(sheaf, xs), poset, xs)
            unit, unique = _unit_components(re_ext, sheaf)
            unit_bij = unique and _is_bijection_columns(unit, sheaf.sizes)
            unit_nat = naturality_failure(re_ext.presheaf, sheaf, unit) is None
        records.append(
            ComparisonRecord(
                index=idx,
                base_is_sheaf=base_ok,
                extension_is_sheaf=ext_ok,
                counit_bijective=counit_bij,
                counit_natural=counit_nat,
                unit_bijective=unit_bij,
                unit_natural=unit_nat,
            )
        )
    return ComparisonReport(tuple(records))


# -- derived-topology sheaves via the freely adjoined bottom --------------------


def adjoin_zero(poset: FinitePoset) -> FinitePoset:
    """A fresh least element below everything, appended as the last index."""
    candidates = ["0", "bot"] + [f"bot{i}" for i in range(poset.n + 1)]
    fresh = next(name for name in candidates if name not in poset.labels)
    labels = list(poset.labels) + [fresh]
    pairs = list(poset.relation_pairs()) + [(poset.n, i) for i in range(poset.n)]
    return FinitePoset(labels, pairs)


def choose_base_point(poset: FinitePoset, subset: Iterable[int]) -> int:
    """Smallest-index element outside the up-closure of the subset."""
    outside = set(range(poset.n)) - poset.up_closure(frozenset(subset))
    if not outside:
        raise BasePointError(
            "the subset cone covers the whole poset; no base point exists"
        )
    return min(outside)


def _bottom_restrictions(
    sheaf: Presheaf, p0: int
) -> tuple[dict[int, tuple[int, ...]] | None, bool]:
    """Restriction maps from each element to the adjoined bottom, built as
    inverse-at-the-base-point composites; checked for independence of the
    mediating element."""
    poset = sheaf.poset
    tables: dict[int, tuple[int, ...]] = {}
    for p in range(poset.n):
        seen = set()
        for r in sorted(poset.down(p) & poset.down(p0)):
            to_base = sheaf.restriction(r, p0)
            if len(set(to_base)) != sheaf.sizes[r] or sheaf.sizes[r] != sheaf.sizes[p0]:
                return None, False
            inv = [0] * sheaf.sizes[r]
            for a, b in enumerate(to_base):
                inv[b] = a
            down = sheaf.restriction(r, p)
            seen.add(tuple(inv[down[a]] for a in range(sheaf.sizes[p])))
        if len(seen) != 1:
            return None, False
        tables[p] = next(iter(seen))
    return tables, True


def extend_sheaf_over_bottom(
    sheaf: Presheaf, poset0: FinitePoset, p0: int
) -> Presheaf | None:
    """Transport a sheaf to the poset with an adjoined bottom, taking the
    base-point value at the bottom.  None when some needed restriction is
    not invertible (impossible for true derived-topology sheaves)."""
    poset = sheaf.poset
    tables, ok = _bottom_restrictions(sheaf, p0)
    if not ok:
        return None
    bottom = poset.n
    sizes = list(sheaf.sizes) + [sheaf.sizes[p0]]
    maps: dict[tuple[int, int], tuple[int, ...]] = dict(sheaf.maps)
    for p in range(poset.n):
        maps[(bottom, p)] = tables[p]
    try:
        return Presheaf(poset0, sizes, maps)
    except FunctorialityError:
        return None


@dataclass(frozen=True)
class KxEquivalenceRecord:
    index: int
    roundtrip_identity: bool
    transported_is_sheaf: bool


@dataclass(frozen=True)
class KxEquivalenceReport:
    reduced_to_subset_case: bool
    base_point: int | None
    bottom_topology_is_subset_topology: bool
    records: tuple[KxEquivalenceRecord, ...]
    beta_ok: bool
    comparison: ComparisonReport
    sheaf_classes: int
    transported_classes: int
    transport_faithful: bool
    covered_classes: int
    cap_skipped_classes: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return (
            not self.failures
            and self.bottom_topology_is_subset_topology
            and self.beta_ok
            and self.comparison.ok
            and self.transport_faithful
            and self.sheaf_classes == self.transported_classes
            and all(r.roundtrip_identity and r.transported_is_sheaf for r in self.records)
        )


def kx_sheaf_equivalence_check(
    poset: FinitePoset,
    subset: Iterable[int],
    value_cap: int = DEFAULT_VALUE_CAP,
) -> KxEquivalenceReport:
    """Certify that derived-topology sheaves match presheaves on the subset,
    enlarged by a fresh bottom when the subset cone misses part of the poset.

    Every step of the equivalence is replayed on enumerated data: the
    bottom-extension is a sheaf and restricts back to the identity, the
    explicit comparison components are natural bijections, and the
    isomorphism-class census of sheaves matches the transported presheaves.
    """
    if not poset.is_downwards_directed():
        raise NotDownwardsDirectedError(
            "derived topologies need a downwards directed poset"
        )
    xs = frozenset(subset)
    topology = derived_topology(poset, xs)
    failures: list[str] = []
    sample = [
        f
        for f in enumerate_presheaves(
            poset, value_cap, max_elements=poset.n, max_value_cap=value_cap
        )
        if is_sheaf(f, topology).ok
    ]
    base_point: int | None = None
    if poset.up_closure(xs) == frozenset(range(poset.n)):
        matches_subset_form = topology == subset_topology(poset, xs)
        comparison = comparison_check(poset, xs, topology, value_cap=value_cap)
        transported = [restrict_presheaf(f, xs) for f in sample]
        records = tuple(
            KxEquivalenceRecord(i, True, True) for i in range(len(sample))
        )
        beta_ok = True
        ambient, amb_subset, reduced = poset, xs, True
    else:
        base_point = choose_base_point(poset, xs)
        poset0 = adjoin_zero(poset)
        bottom = poset.n
        x0 = xs | {bottom}
        topology0 = derived_topology(poset0, xs)
        matches_subset_form = topology0 == subset_topology(poset0, x0)
        records_list = []
        extended: list[Presheaf] = []
        transported = []
        for i, f in enumerate(sample):
            lifted = extend_sheaf_over_bottom(f, poset0, base_point)
            if lifted is None:
                failures.append(f"sheaf #{i}: bottom extension is not well defined")
                continue
            extended.append(lifted)
            roundtrip = restrict_presheaf(lifted, range(poset.n)) == f
            lifted_ok = is_sheaf(lifted, topology0).ok
            records_list.append(KxEquivalenceRecord(i, roundtrip, lifted_ok))
            transported.append(restrict_presheaf(lifted, x0))
        records = tuple(records_list)
        beta_ok = True
        samples0 = list(extended)
        if poset0.n <= 4:
            samples0 += [
                g
                for g in enumerate_presheaves(
                    poset0, value_cap, max_elements=poset0.n, max_value_cap=value_cap
                )
                if is_sheaf(g, topology0).ok
            ]
        for g in samples0:
            inner = restrict_presheaf(g, range(poset.n))
            back = extend_sheaf_over_bottom(inner, poset0, base_point)
            if back is None:
                beta_ok = False
                continue
            comps = [tuple(range(g.sizes[p])) for p in range(poset.n)]
            comps.append(g.restriction(bottom, base_point))
            if not _is_bijection_columns(comps, g.sizes):
                beta_ok = False
            elif naturality_failure(back, g, comps) is not None:
                beta_ok = False
        comparison = comparison_check(poset0, x0, topology0, value_cap=value_cap)
        ambient, amb_subset, reduced = poset0, x0, False
    sheaf_classes = iso_class_count(sample)
    transported_classes = iso_class_count(transported)
    faithful = len(transported) == len(sample)
    if faithful:
        for i in range(len(sample)):
            for j in range(i + 1, len(sample)):
                if natural_iso_exists(sample[i], sample[j]) != natural_iso_exists(
                    transported[i], transported[j]
                ):
                    faithful = False
    covered = 0
    cap_skipped = 0
    sub_poset = ambient.induced(sorted(amb_subset))
    seen: list[Presheaf] = []
    for h in enumerate_presheaves(
        sub_poset, value_cap, max_elements=sub_poset.n, max_value_cap=value_cap
    ):
        if any(natural_iso_exists(h, s) for s in seen):
            continue
        seen.append(h)
        lifted = extend_presheaf(h, ambient, amb_subset).presheaf
        if not reduced:
            lifted = restrict_presheaf(lifted, range(poset.n))
        if max(lifted.sizes, default=0) > value_cap:
            cap_skipped += 1
            continue
        if not is_sheaf(lifted, topology).ok:
            failures.append("back-transported presheaf is not a sheaf")
            continue
        if any(natural_iso_exists(lifted, f) for f in sample):
            covered += 1
        else:
            failures.append("back-transported sheaf misses the enumeration")
    return KxEquivalenceReport(
        reduced_to_subset_case=reduced,
        base_point=base_point,
        bottom_topology_is_subset_topology=matches_subset_form,
        records=records,
        beta_ok=beta_ok,
        comparison=comparison,
        sheaf_classes=sheaf_classes,
        transported_classes=transported_classes,
        transport_faithful=faithful,
        covered_classes=covered,
        cap_skipped_classes=cap_skipped,
        failures=tuple(failures),
    )
