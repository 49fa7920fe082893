"""Nuclei, congruences, and sublocales on the down-set frame of a poset.

The three presentations are interconvertible with Grothendieck topologies;
:func:`verify_commuting_diagram` replays every conversion round trip on
every topology of a small poset.  Nuclei are stored as full lookup tables
over down-set ids, congruences as partitions of those ids, sublocales as
id sets, so law checking is exhaustive at desk scale.

Ordering conventions: nuclei, congruences, and topologies are compared
pointwise; sublocales are ordered by inclusion, and the nucleus/sublocale
conversion reverses order (larger nucleus, smaller sublocale).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    NotACongruenceError,
    NotAFrameMorphismError,
    NotANucleusError,
    NotASublocaleError,
    NotSurjectiveError,
    TooLargeError,
)
from .poset import (
    DownSetFrame,
    FinitePoset,
    FrameMap,
    double_negation,
    enumerate_downsets,
    frame_morphism_violation,
    heyting_implication,
    sieves_on,
)
from .sites import GrothTopology, enumerate_all_topologies, validate_topology
from .sites import is_complete as topology_is_complete

LAW_CHECK_CAP = 2**12
COMPLETENESS_GUARD = 20


def _members(frame: DownSetFrame, i: int) -> list[str]:
    return sorted(frame.poset.labels[e] for e in frame.downset(i))


class Nucleus:
    """An inflationary, idempotent, meet-preserving endomap of a frame.

    Laws are checked exhaustively on construction for frames of at most
    ``LAW_CHECK_CAP`` down-sets.
    """

    __slots__ = ("frame", "table")

    def __init__(self, frame: DownSetFrame, table: Sequence[int], check: bool = True):
        self.frame = frame
        self.table = tuple(table)
        if len(self.table) != len(frame):
            raise NotANucleusError(
                f"table has {len(self.table)} entries for a {len(frame)}-element frame"
            )
        if check and len(frame) <= LAW_CHECK_CAP:
            self._check_laws()

    def _check_laws(self) -> None:
        frame, table = self.frame, self.table
        for a in range(len(frame)):
            if not frame.downset(a) <= frame.downset(table[a]):
                raise NotANucleusError(
                    "nucleus is not inflationary",
                    witness={"law": "inflation", "a": _members(frame, a)},
                )
            if table[table[a]] != table[a]:
                raise NotANucleusError(
                    "nucleus is not idempotent",
                    witness={"law": "idempotence", "a": _members(frame, a)},
                )
        for a in range(len(frame)):
            for b in range(a + 1, len(frame)):
                if table[frame.meet(a, b)] != frame.meet(table[a], table[b]):
                    raise NotANucleusError(
                        "nucleus does not preserve binary meets",
                        witness={
                            "law": "meet",
                            "a": _members(frame, a),
                            "b": _members(frame, b),
                        },
                    )

    def apply_id(self, i: int) -> int:
        return self.table[i]

    def apply(self, downset: frozenset[int]) -> frozenset[int]:
        return self.frame.downset(self.table[self.frame.id_of(downset)])

    def fixed_point_ids(self) -> frozenset[int]:
        return frozenset(i for i, t in enumerate(self.table) if i == t)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Nucleus)
            and self.frame == other.frame
            and self.table == other.table
        )

    def __hash__(self) -> int:
        return hash((self.frame, self.table))

    def __repr__(self) -> str:
        return f"<Nucleus on {len(self.frame)} down-sets>"

    def to_json(self) -> dict:
        doc = self.frame.to_json()
        doc["pairs"] = [[i, t] for i, t in enumerate(self.table)]
        return doc

    @classmethod
    def from_json(cls, doc: dict, frame: DownSetFrame | None = None) -> "Nucleus":
        frame = frame if frame is not None else frame_for_json(doc)
        table = [0] * len(frame)
        for i, t in doc["pairs"]:
            table[i] = t
        return cls(frame, table)


class Congruence:
    """A partition of a frame compatible with binary meets and all joins.

    On a finite frame arbitrary joins collapse to finite ones, so
    validation checks one-sided binary compatibility against a class
    representative, which implies compatibility of every finite family.
    """

    __slots__ = ("frame", "classes", "class_of")

    def __init__(self, frame: DownSetFrame, classes: Iterable[Iterable[int]], check: bool = True):
        self.frame = frame
        normalized = sorted((frozenset(c) for c in classes), key=min)
        self.classes = tuple(normalized)
        class_of = [-1] * len(frame)
        for ci, cls in enumerate(self.classes):
            for a in cls:
                if class_of[a] != -1:
                    raise NotACongruenceError(f"down-set id {a} appears in two classes")
                class_of[a] = ci
        if any(c == -1 for c in class_of):
            raise NotACongruenceError("classes do not partition the frame")
        self.class_of = tuple(class_of)
        if check and len(frame) <= LAW_CHECK_CAP:
            self._check_laws()

    def _check_laws(self) -> None:
        frame, class_of = self.frame, self.class_of
        for cls in self.classes:
            rep = min(cls)
            for a in cls:
                if a == rep:
                    continue
                for c in range(len(frame)):
                    if class_of[frame.meet(a, c)] != class_of[frame.meet(rep, c)]:
                        raise NotACongruenceError(
                            "congruence does not respect meets",
                            witness={
                                "law": "meet",
                                "a": _members(frame, a),
                                "b": _members(frame, rep),
                                "c": _members(frame, c),
                            },
                        )
                    if class_of[frame.join(a, c)] != class_of[frame.join(rep, c)]:
                        raise NotACongruenceError(
                            "congruence does not respect joins",
                            witness={
                                "law": "join",
                                "a": _members(frame, a),
                                "b": _members(frame, rep),
                                "c": _members(frame, c),
                            },
                        )

    @classmethod
    def from_key(cls, frame: DownSetFrame, keys: Sequence) -> "Congruence":
        groups: dict = {}
        for i, key in enumerate(keys):
            groups.setdefault(key, []).append(i)
        return cls(frame, groups.values())

    def related(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Congruence)
            and self.frame == other.frame
            and self.classes == other.classes
        )

    def __hash__(self) -> int:
        return hash((self.frame, self.classes))

    def __repr__(self) -> str:
        return f"<Congruence with {len(self.classes)} classes>"

    def to_json(self) -> dict:
        doc = self.frame.to_json()
        doc["classes"] = [sorted(c) for c in self.classes]
        return doc

    @classmethod
    def from_json(cls, doc: dict, frame: DownSetFrame | None = None) -> "Congruence":
        frame = frame if frame is not None else frame_for_json(doc)
        return cls(frame, doc["classes"])


class Sublocale:
    """Down-set ids closed under all intersections and under implication
    from arbitrary down-sets into members."""

    __slots__ = ("frame", "members")

    def __init__(self, frame: DownSetFrame, members: Iterable[int], check: bool = True):
        self.frame = frame
        self.members = frozenset(members)
        for i in self.members:
            if not (0 <= i < len(frame)):
                raise NotASublocaleError(f"{i} is not a down-set id")
        if check and len(frame) <= LAW_CHECK_CAP:
            self._check_laws()

    def _check_laws(self) -> None:
        frame, members = self.frame, self.members
        if frame.top_id not in members:
            raise NotASublocaleError(
                "sublocale misses the empty intersection (the whole poset)"
            )
        for a in members:
            for b in members:
                if frame.meet(a, b) not in members:
                    raise NotASublocaleError(
                        "sublocale is not closed under intersections",
                        a=frame.downset(a),
                        m=frame.downset(b),
                        result=frame.downset(frame.meet(a, b)),
                    )
        for a in range(len(frame)):
            for m in sorted(members):
                h = frame.heyting(a, m)
                if h not in members:
                    raise NotASublocaleError(
                        "sublocale is not closed under implication into it",
                        a=frame.downset(a),
                        m=frame.downset(m),
                        result=frame.downset(h),
                    )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Sublocale)
            and self.frame == other.frame
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.frame, self.members))

    def __repr__(self) -> str:
        return f"<Sublocale with {len(self.members)} members>"

    def to_json(self) -> dict:
        doc = self.frame.to_json()
        doc["members"] = sorted(self.members)
        return doc

    @classmethod
    def from_json(cls, doc: dict, frame: DownSetFrame | None = None) -> "Sublocale":
        frame = frame if frame is not None else frame_for_json(doc)
        return cls(frame, doc["members"])


def frame_for_json(doc: dict) -> DownSetFrame:
    return enumerate_downsets(FinitePoset.from_json(doc["poset"]))


# -- conversions between the four presentations ----------------------------


def nucleus_from_topology(
    topology: GrothTopology, frame: DownSetFrame | None = None
) -> Nucleus:
    """Send a down-set to the elements whose cut along it is a cover."""
    poset = topology.poset
    frame = frame if frame is not None else enumerate_downsets(poset)
    table = []
    for d in frame:
        value = frozenset(
            p for p in range(poset.n) if (d & poset.down(p)) in topology.covers[p]
        )
        table.append(frame.id_of(value))
    return Nucleus(frame, table)


def topology_from_nucleus(nucleus: Nucleus) -> GrothTopology:
    """Covers of p are the sieves whose image under the nucleus reaches p."""
    frame = nucleus.frame
    poset = frame.poset
    covers = []
    for p in range(poset.n):
        covers.append(
            frozenset(
                s
                for s in sieves_on(poset, p)
                if p in frame.downset(nucleus.table[frame.id_of(s)])
            )
        )
    return validate_topology(poset, covers)


def congruence_from_nucleus(nucleus: Nucleus) -> Congruence:
    return Congruence.from_key(nucleus.frame, nucleus.table)


def nucleus_from_congruence(congruence: Congruence) -> Nucleus:
    """Send a down-set to the union (join) of its class."""
    frame = congruence.frame
    table = []
    for a in range(len(frame)):
        table.append(frame.join_all(congruence.classes[congruence.class_of[a]]))
    return Nucleus(frame, table)


def sublocale_from_nucleus(nucleus: Nucleus) -> Sublocale:
    return Sublocale(nucleus.frame, nucleus.fixed_point_ids())


def nucleus_from_sublocale(sublocale: Sublocale) -> Nucleus:
    """Send a down-set to the least member above it."""
    frame = sublocale.frame
    table = []
    for a in range(len(frame)):
        table.append(
            frame.meet_all(
                m for m in sublocale.members if frame.downset(a) <= frame.downset(m)
            )
        )
    return Nucleus(frame, table)


def congruence_from_topology(
    topology: GrothTopology, frame: DownSetFrame | None = None
) -> Congruence:
    """Relate two down-sets when they cut to covers at exactly the same elements."""
    poset = topology.poset
    frame = frame if frame is not None else enumerate_downsets(poset)
    keys = []
    for d in frame:
        keys.append(
            frozenset(
                p for p in range(poset.n) if (d & poset.down(p)) in topology.covers[p]
            )
        )
    return Congruence.from_key(frame, keys)


def topology_from_congruence(congruence: Congruence) -> GrothTopology:
    """Covers of p are the sieves congruent to the maximal sieve on p."""
    frame = congruence.frame
    poset = frame.poset
    covers = []
    for p in range(poset.n):
        top = frame.id_of(poset.down(p))
        covers.append(
            frozenset(
                s
                for s in sieves_on(poset, p)
                if congruence.related(frame.id_of(s), top)
            )
        )
    return validate_topology(poset, covers)


def sublocale_from_topology(
    topology: GrothTopology, frame: DownSetFrame | None = None
) -> Sublocale:
    """Members are the down-sets containing every element they cover."""
    poset = topology.poset
    frame = frame if frame is not None else enumerate_downsets(poset)
    members = []
    for i, d in enumerate(frame):
        if all(
            p in d
            for p in range(poset.n)
            if (d & poset.down(p)) in topology.covers[p]
        ):
            members.append(i)
    return Sublocale(frame, members)


def topology_from_sublocale(sublocale: Sublocale) -> GrothTopology:
    """Covers of p are the sieves contained in no member that omits p."""
    frame = sublocale.frame
    poset = frame.poset
    covers = []
    for p in range(poset.n):
        fam = []
        for s in sieves_on(poset, p):
            if all(
                p in frame.downset(m)
                for m in sublocale.members
                if s <= frame.downset(m)
            ):
                fam.append(s)
        covers.append(frozenset(fam))
    return validate_topology(poset, covers)


# -- subset-generated presentations -----------------------------------------


@dataclass(frozen=True)
class SubsetForms:
    nucleus: Nucleus
    congruence: Congruence
    sublocale: Sublocale


def subset_forms(
    poset: FinitePoset, subset: Iterable[int], frame: DownSetFrame | None = None
) -> SubsetForms:
    """The nucleus, congruence, and sublocale generated by a subset.

    The nucleus is implication from the subset; the congruence identifies
    down-sets with equal subset cut; the sublocale collects the
    implication-fixed down-sets.
    """
    frame = frame if frame is not None else enumerate_downsets(poset)
    xs = frozenset(subset)
    table = tuple(frame.id_of(heyting_implication(poset, xs, d)) for d in frame)
    nucleus = Nucleus(frame, table)
    congruence = Congruence.from_key(frame, [d & xs for d in frame])
    sublocale = Sublocale(frame, nucleus.fixed_point_ids())
    return SubsetForms(nucleus, congruence, sublocale)


def double_negation_nucleus(
    poset: FinitePoset, frame: DownSetFrame | None = None
) -> Nucleus:
    frame = frame if frame is not None else enumerate_downsets(poset)
    return Nucleus(frame, tuple(frame.id_of(double_negation(poset, d)) for d in frame))


@dataclass(frozen=True)
class SublocaleFrameIso:
    """Concrete frame isomorphism from a subset sublocale onto the down-sets
    of the subset: forward is intersection, backward is implication."""

    sublocale: Sublocale
    sub_frame: DownSetFrame
    forward: dict  # member id -> sub-frame id
    backward: dict  # sub-frame id -> member id


def mx_frame_isomorphism(
    poset: FinitePoset, subset: Iterable[int], frame: DownSetFrame | None = None
) -> SublocaleFrameIso:
    """Build and verify the isomorphism between the subset sublocale and the
    subset's own down-set frame.

    Meets on the sublocale are intersections; joins are the nucleus applied
    to the union.  Both are checked against the subset frame.
    """
    frame = frame if frame is not None else enumerate_downsets(poset)
    xs = frozenset(subset)
    forms = subset_forms(poset, xs, frame)
    sub = enumerate_downsets(poset.induced(sorted(xs)))
    elems = sorted(xs)
    pos = {e: k for k, e in enumerate(elems)}
    forward = {}
    for m in sorted(forms.sublocale.members):
        cut = frozenset(pos[e] for e in frame.downset(m) & xs)
        forward[m] = sub.id_of(cut)
    if len(set(forward.values())) != len(forward) or set(forward.values()) != set(
        range(len(sub))
    ):
        raise NotASublocaleError("subset sublocale is not in bijection with the subset frame")
    backward = {}
    for y in range(len(sub)):
        lifted = frozenset(elems[k] for k in sub.downset(y))
        backward[y] = frame.id_of(heyting_implication(poset, xs, lifted))
    for m in forward:
        if backward[forward[m]] != m:
            raise NotASublocaleError("intersection and implication are not mutually inverse")
    members = sorted(forms.sublocale.members)
    nuc = forms.nucleus
    for a in members:
        for b in members:
            if forward[frame.meet(a, b)] != sub.meet(forward[a], forward[b]):
                raise NotASublocaleError("isomorphism does not preserve meets")
            join_in_m = nuc.table[frame.join(a, b)]
            if forward[join_in_m] != sub.join(forward[a], forward[b]):
                raise NotASublocaleError("isomorphism does not preserve joins")
    return SublocaleFrameIso(forms.sublocale, sub, forward, backward)


# -- completeness ------------------------------------------------------------


def nucleus_is_complete(nucleus: Nucleus, guard: int = COMPLETENESS_GUARD) -> bool:
    """Whether the nucleus preserves arbitrary intersections.

    For any family, grouping by image reduces the check to: the
    intersection of every union of fibers maps to the intersection of the
    corresponding image values.  Subsets of the image are enumerated, so
    the image size is guarded.
    """
    frame, table = nucleus.frame, nucleus.table
    image = sorted(set(table))
    if len(image) > guard:
        raise TooLargeError(f"nucleus image has {len(image)} values; guard is {guard}")
    fibers = {m: [i for i, t in enumerate(table) if t == m] for m in image}
    for bits in range(1 << len(image)):
        chosen = [image[i] for i in range(len(image)) if bits >> i & 1]
        pooled: list[int] = []
        for m in chosen:
            pooled.extend(fibers[m])
        a = frame.meet_all(pooled)
        if table[a] != frame.meet_all(chosen):
            return False
    return True


def congruence_is_complete(
    congruence: Congruence, guard: int = COMPLETENESS_GUARD
) -> bool:
    """Whether the congruence respects arbitrary intersections.

    The extremal families run over whole classes on one side and class
    joins on the other; subsets of the class list are enumerated under a
    guard.
    """
    frame = congruence.frame
    classes = congruence.classes
    if len(classes) > guard:
        raise TooLargeError(f"{len(classes)} classes; guard is {guard}")
    joins = [frame.join_all(c) for c in classes]
    for bits in range(1 << len(classes)):
        chosen = [i for i in range(len(classes)) if bits >> i & 1]
        pooled: list[int] = []
        for i in chosen:
            pooled.extend(classes[i])
        a = frame.meet_all(pooled)
        b = frame.meet_all(joins[i] for i in chosen)
        if not congruence.related(a, b):
            return False
    return True


# -- frame quotients ----------------------------------------------------------


@dataclass(frozen=True)
class QuotientFrame:
    """The frame of congruence classes, with operations via representatives."""

    congruence: Congruence

    @property
    def size(self) -> int:
        return len(self.congruence.classes)

    def rep(self, c: int) -> int:
        return min(self.congruence.classes[c])

    def meet(self, c1: int, c2: int) -> int:
        frame = self.congruence.frame
        return self.congruence.class_of[frame.meet(self.rep(c1), self.rep(c2))]

    def join(self, c1: int, c2: int) -> int:
        frame = self.congruence.frame
        return self.congruence.class_of[frame.join(self.rep(c1), self.rep(c2))]

    @property
    def top(self) -> int:
        return self.congruence.class_of[self.congruence.frame.top_id]

    @property
    def bottom(self) -> int:
        return self.congruence.class_of[self.congruence.frame.bottom_id]


def quotient_frame(congruence: Congruence) -> QuotientFrame:
    """Classes with meet and join via representatives; well-defined because
    congruence validation already checked representative independence."""
    return QuotientFrame(congruence)


@dataclass(frozen=True)
class FactorizationWitness:
    kernel: Congruence
    quotient: QuotientFrame
    iso: tuple[int, ...]  # class id -> target down-set id


def homomorphism_factorization(f: FrameMap) -> FactorizationWitness:
    """Factor a frame surjection through its kernel congruence.

    Produces the kernel, the quotient, and the induced bijection from
    classes onto the target, verified to preserve meets and joins and to
    recompose to the original map.
    """
    violation = frame_morphism_violation(f)
    if violation is not None:
        raise NotAFrameMorphismError(
            f"map does not preserve {violation['law']}", witness=violation
        )
    if set(f.table) != set(range(len(f.target))):
        missing = sorted(set(range(len(f.target))) - set(f.table))[0]
        raise NotSurjectiveError(
            "map is not surjective",
            witness={"missing": sorted(f.target.downset(missing))},
        )
    kernel = Congruence.from_key(f.source, f.table)
    quotient = QuotientFrame(kernel)
    iso = tuple(f.table[quotient.rep(c)] for c in range(quotient.size))
    assert len(set(iso)) == quotient.size
    for c1 in range(quotient.size):
        for c2 in range(quotient.size):
            assert iso[quotient.meet(c1, c2)] == f.target.meet(iso[c1], iso[c2])
            assert iso[quotient.join(c1, c2)] == f.target.join(iso[c1], iso[c2])
    for a in range(len(f.source)):
        assert f.table[a] == iso[kernel.class_of[a]]
    return FactorizationWitness(kernel, quotient, iso)


def extract_subset(congruence: Congruence) -> frozenset[int]:
    """Elements whose principal down-set is separated from its punctured form."""
    frame = congruence.frame
    poset = frame.poset
    out = []
    for p in range(poset.n):
        whole = frame.id_of(poset.down(p))
        punctured = frame.id_of(poset.down(p) - {p})
        if not congruence.related(whole, punctured):
            out.append(p)
    return frozenset(out)


# -- the commuting diagram ----------------------------------------------------


# How each conversion interacts with the documented orders: topologies,
# nuclei, and congruences are compared pointwise and convert covariantly;
# sublocales are ordered by inclusion and convert contravariantly.
CONVERSION_VARIANCE = {
    "topology<->nucleus": "covariant",
    "nucleus<->congruence": "covariant",
    "nucleus<->sublocale": "contravariant",
    "topology<->congruence": "covariant",
    "topology<->sublocale": "contravariant",
}


@dataclass(frozen=True)
class DiagramReport:
    poset: FinitePoset
    topology_count: int
    failures: tuple[str, ...]
    variance: tuple[tuple[str, str], ...] = tuple(sorted(CONVERSION_VARIANCE.items()))

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_commuting_diagram(poset: FinitePoset, cap: int = 4) -> DiagramReport:
    """Replay all conversion round trips on every topology of the poset.

    For each enumerated topology: the five round trips are identities, the
    two triangle composites through congruences and through sublocales
    agree with the direct conversion, and completeness is preserved across
    the three presentations.
    """
    frame = enumerate_downsets(poset)
    failures: list[str] = []
    topologies = enumerate_all_topologies(poset, cap=cap)
    for idx, topology in enumerate(topologies):
        tag = f"topology #{idx}"
        nuc = nucleus_from_topology(topology, frame)
        if topology_from_nucleus(nuc) != topology:
            failures.append(f"{tag}: topology/nucleus round trip")
        cong = congruence_from_nucleus(nuc)
        if nucleus_from_congruence(cong) != nuc:
            failures.append(f"{tag}: nucleus/congruence round trip")
        sub = sublocale_from_nucleus(nuc)
        if nucleus_from_sublocale(sub) != nuc:
            failures.append(f"{tag}: nucleus/sublocale round trip")
        if congruence_from_topology(topology, frame) != cong:
            failures.append(f"{tag}: congruence triangle")
        if sublocale_from_topology(topology, frame) != sub:
            failures.append(f"{tag}: sublocale triangle")
        if topology_from_congruence(cong) != topology:
            failures.append(f"{tag}: congruence/topology round trip")
        if topology_from_sublocale(sub) != topology:
            failures.append(f"{tag}: sublocale/topology round trip")
        flags = {
            topology_is_complete(topology),
            nucleus_is_complete(nuc),
            congruence_is_complete(cong),
        }
        if len(flags) != 1:
            failures.append(f"{tag}: completeness flags disagree")
    return DiagramReport(poset, len(topologies), tuple(failures))
