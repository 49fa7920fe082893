"""Finite posets, their down-set frames, and Heyting-algebra operations.

Elements are dense integer indices ``0..n-1``; labels are display metadata
only.  The order relation is stored fully closed (reflexive-transitive);
cover pairs are recomputed on demand for DOT export, since ``leq`` queries
dominate every inner loop.

Down-sets are plain ``frozenset[int]`` values.  A :class:`DownSetFrame`
materializes all down-sets of a poset with stable integer ids, ordered
lexicographically on characteristic vectors so that golden files stay
byte-identical across runs.

All types are immutable after construction and safe to share across
concurrent readers.  The sieve cache on :class:`FinitePoset` is write-once
and idempotent, so concurrent recomputation is benign.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleError,
    DuplicateElementError,
    FrameTooLargeError,
    NotAFrameMorphismError,
    NotOrderIsomorphismError,
    NotOrderMorphismError,
    ParseError,
)

DEFAULT_FRAME_CAP = 2**20


def _close_relation(n: int, pairs: Iterable[tuple[int, int]]) -> list[set[int]]:
    """Reflexive-transitive closure, as per-element up-sets."""
    up = [{i} for i in range(n)]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"relation pair ({a}, {b}) out of range for {n} elements")
        up[a].add(b)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            extra: set[int] = set()
            for j in up[i]:
                extra |= up[j]
            if not extra <= up[i]:
                up[i] |= extra
                changed = True
    return up


class FinitePoset:
    """A finite partial order on elements ``0..n-1``.

    The constructor accepts an arbitrary generating relation and takes its
    reflexive-transitive closure; a closure that violates antisymmetry
    raises :class:`CycleError`.
    """

    __slots__ = ("n", "labels", "_up", "_down", "_sieve_cache", "_hash")

    def __init__(self, labels: int | Sequence[str], pairs: Iterable[tuple[int, int]] = ()):
        if isinstance(labels, int):
            labels = tuple(str(i) for i in range(labels))
        else:
            labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise DuplicateElementError(f"duplicate element names in {labels!r}")
        n = len(labels)
        up = _close_relation(n, pairs)
        for i in range(n):
            for j in up[i]:
                if i != j and i in up[j]:
                    raise CycleError(
                        f"antisymmetry fails: {labels[i]!r} <= {labels[j]!r} <= {labels[i]!r}",
                        witness={"cycle": [labels[i], labels[j]]},
                    )
        self.n = n
        self.labels = labels
        self._up = tuple(frozenset(s) for s in up)
        down = [set() for _ in range(n)]
        for i in range(n):
            for j in up[i]:
                down[j].add(i)
        self._down = tuple(frozenset(s) for s in down)
        self._sieve_cache: dict[int, tuple[frozenset[int], ...]] = {}
        self._hash = hash((self.labels, self._up))

    # -- order queries -------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        return j in self._up[i]

    def lt(self, i: int, j: int) -> bool:
        return i != j and j in self._up[i]

    def up(self, p: int) -> frozenset[int]:
        return self._up[p]

    def down(self, p: int) -> frozenset[int]:
        return self._down[p]

    @property
    def elements(self) -> range:
        return range(self.n)

    def label(self, i: int) -> str:
        return self.labels[i]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParseError(f"unknown element {label!r}") from None

    def relation_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.n) for j in sorted(self._up[i]))

    # -- closures and extremal elements --------------------------------

    def down_closure(self, subset: Iterable[int]) -> frozenset[int]:
        """Smallest down-set containing ``subset``."""
        out: set[int] = set()
        for m in subset:
            out |= self._down[m]
        return frozenset(out)

    def up_closure(self, subset: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for m in subset:
            out |= self._up[m]
        return frozenset(out)

    def minimal_elements(self, subset: Iterable[int] | None = None) -> frozenset[int]:
        """Minimal elements of ``subset`` viewed as a subposet (default: all of P)."""
        univ = frozenset(subset) if subset is not None else frozenset(range(self.n))
        return frozenset(p for p in univ if not any(self.lt(q, p) for q in univ))

    def maximal_elements(self, subset: Iterable[int] | None = None) -> frozenset[int]:
        univ = frozenset(subset) if subset is not None else frozenset(range(self.n))
        return frozenset(p for p in univ if not any(self.lt(p, q) for q in univ))

    def least_element(self) -> int | None:
        for p in range(self.n):
            if all(self.leq(p, q) for q in range(self.n)):
                return p
        return None

    def is_downwards_directed(self, subset: Iterable[int] | None = None) -> bool:
        """Every pair has a lower bound inside the given universe."""
        univ = sorted(subset) if subset is not None else range(self.n)
        for a in univ:
            for b in univ:
                if not any(self.leq(c, a) and self.leq(c, b) for c in univ):
                    return False
        return True

    def covers(self) -> tuple[tuple[int, int], ...]:
        """Cover pairs (q, p) with q < p and nothing strictly between."""
        out = []
        for p in range(self.n):
            for q in sorted(self._down[p] - {p}):
                if not any(self.lt(q, r) and self.lt(r, p) for r in range(self.n)):
                    out.append((q, p))
        return tuple(out)

    def induced(self, subset: Iterable[int]) -> "FinitePoset":
        """Full subposet on ``subset``; elements are renumbered in index order."""
        elems = sorted(set(subset))
        labels = [self.labels[i] for i in elems]
        pos = {e: k for k, e in enumerate(elems)}
        pairs = [(pos[a], pos[b]) for a in elems for b in elems if a != b and self.leq(a, b)]
        return FinitePoset(labels, pairs)

    # -- value semantics ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FinitePoset)
            and self.labels == other.labels
            and self._up == other._up
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        rel = [f"{self.labels[a]}<{self.labels[b]}" for a, b in self.covers()]
        return f"FinitePoset({list(self.labels)}, {rel})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "elements": list(self.labels),
            "le_pairs": [list(p) for p in self.relation_pairs()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FinitePoset":
        if not isinstance(doc, dict) or "elements" not in doc:
            raise ParseError("poset JSON must contain an 'elements' list")
        pairs = [tuple(p) for p in doc.get("le_pairs", [])]
        return cls(doc["elements"], pairs)


def parse_poset(text: str) -> FinitePoset:
    """Parse the line-oriented poset text format.

    ``#`` starts a comment; ``/`` may be used instead of a newline.  One
    ``elements:`` line names the elements; each ``le: a b`` line declares
    ``a <= b``.  The declared relation need not be closed or list covers;
    its reflexive-transitive closure is taken.
    """
    statements: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        for part in line.split("/"):
            part = part.strip()
            if part:
                statements.append(part)
    names: list[str] | None = None
    le_decls: list[tuple[str, str]] = []
    for stmt in statements:
        if ":" not in stmt:
            raise ParseError(f"cannot parse line {stmt!r}")
        head, rest = stmt.split(":", 1)
        head = head.strip()
        if head == "elements":
            if names is not None:
                raise ParseError("more than one 'elements:' line")
            names = rest.split()
            if not names:
                raise ParseError("'elements:' line names no elements")
        elif head == "le":
            toks = rest.split()
            if len(toks) != 2:
                raise ParseError(f"'le:' wants two names, got {rest.strip()!r}")
            le_decls.append((toks[0], toks[1]))
        else:
            raise ParseError(f"unknown directive {head!r}")
    if names is None:
        raise ParseError("missing 'elements:' line")
    if len(set(names)) != len(names):
        raise DuplicateElementError(f"duplicate element names in {names!r}")
    index = {name: i for i, name in enumerate(names)}
    pairs = []
    for a, b in le_decls:
        if a not in index or b not in index:
            raise ParseError(f"'le: {a} {b}' mentions an undeclared element")
        pairs.append((index[a], index[b]))
    return FinitePoset(names, pairs)


def subset_of_labels(poset: FinitePoset, names: Iterable[str]) -> frozenset[int]:
    return frozenset(poset.index_of(name) for name in names)


def export_dot(poset: FinitePoset) -> str:
    """Hasse diagram (cover relation only) in DOT format, edges lower -> upper."""
    lines = ["digraph poset {", "  rankdir=BT;"]
    for i in range(poset.n):
        label = poset.labels[i].replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  n{i} [label="{label}"];')
    for q, p in poset.covers():
        lines.append(f"  n{q} -> n{p};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- down-set enumeration ----------------------------------------------


def _char_key(poset_n: int, downset: frozenset[int]) -> tuple[int, ...]:
    return tuple(1 if i in downset else 0 for i in range(poset_n))


def _downsets_within(poset: FinitePoset, elems: Sequence[int], cap: int) -> list[frozenset[int]]:
    """All down-sets of P contained in the down-closed set ``elems``.

    Processes elements in a linear extension; a down-set of a prefix is a
    down-set of the whole, so intermediate collections never exceed the
    final count and the cap check is exact.
    """
    order = sorted(elems, key=lambda e: (len(poset.down(e)), e))
    sets: list[frozenset[int]] = [frozenset()]
    for e in order:
        pred = poset.down(e) - {e}
        grown = [s | {e} for s in sets if pred <= s]
        sets.extend(grown)
        if len(sets) > cap:
            raise FrameTooLargeError(
                f"more than {cap} down-sets", witness={"cap": cap}
            )
    return sets


class DownSetFrame:
    """The frame D(P) of all down-sets of a finite poset.

    Ids are positions in the lexicographic-on-characteristic-vector order,
    so they are stable for a fixed poset.  Meets are intersections and
    joins are unions.
    """

    __slots__ = ("poset", "downsets", "index")

    def __init__(self, poset: FinitePoset, downsets: Sequence[frozenset[int]]):
        self.poset = poset
        self.downsets = tuple(downsets)
        self.index = {d: i for i, d in enumerate(self.downsets)}

    def __len__(self) -> int:
        return len(self.downsets)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.downsets)

    def id_of(self, downset: frozenset[int]) -> int:
        try:
            return self.index[frozenset(downset)]
        except KeyError:
            raise KeyError(f"{sorted(downset)} is not a down-set of this poset") from None

    def downset(self, i: int) -> frozenset[int]:
        return self.downsets[i]

    @property
    def bottom_id(self) -> int:
        return self.index[frozenset()]

    @property
    def top_id(self) -> int:
        return self.index[frozenset(range(self.poset.n))]

    def meet(self, i: int, j: int) -> int:
        return self.index[self.downsets[i] & self.downsets[j]]

    def join(self, i: int, j: int) -> int:
        return self.index[self.downsets[i] | self.downsets[j]]

    def meet_all(self, ids: Iterable[int]) -> int:
        acc = frozenset(range(self.poset.n))
        for i in ids:
            acc &= self.downsets[i]
        return self.index[acc]

    def join_all(self, ids: Iterable[int]) -> int:
        acc: frozenset[int] = frozenset()
        for i in ids:
            acc |= self.downsets[i]
        return self.index[acc]

    def heyting(self, i: int, j: int) -> int:
        return self.index[heyting_implication(self.poset, self.downsets[i], self.downsets[j])]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DownSetFrame)
            and self.poset == other.poset
            and self.downsets == other.downsets
        )

    def __hash__(self) -> int:
        return hash((self.poset, self.downsets))

    def to_json(self) -> dict:
        return {
            "poset": self.poset.to_json(),
            "downsets": [[self.poset.labels[i] for i in sorted(d)] for d in self.downsets],
        }


def enumerate_downsets(poset: FinitePoset, cap: int = DEFAULT_FRAME_CAP) -> DownSetFrame:
    """Materialize D(P) with stable ids; FrameTooLargeError beyond ``cap``."""
    sets = _downsets_within(poset, range(poset.n), cap)
    sets.sort(key=lambda d: _char_key(poset.n, d))
    return DownSetFrame(poset, sets)


def sieves_on(poset: FinitePoset, p: int) -> tuple[frozenset[int], ...]:
    """All sieves on p, i.e. down-sets contained in the principal down-set of p."""
    cached = poset._sieve_cache.get(p)
    if cached is None:
        sets = _downsets_within(poset, sorted(poset.down(p)), DEFAULT_FRAME_CAP)
        sets.sort(key=lambda d: _char_key(poset.n, d))
        cached = tuple(sets)
        poset._sieve_cache[p] = cached
    return cached


# -- Heyting structure --------------------------------------------------


def heyting_implication(
    poset: FinitePoset, x: Iterable[int], y: Iterable[int]
) -> frozenset[int]:
    """The largest down-set A with A & X <= Y, for arbitrary subsets X, Y.

    Computed pointwise as ``{p : down(p) & X <= Y}``, which is down-closed
    by construction; the defining union over all down-sets is kept as a
    test oracle.
    """
    xs = frozenset(x)
    ys = frozenset(y)
    return frozenset(p for p in range(poset.n) if poset.down(p) & xs <= ys)


def negation(poset: FinitePoset, a: Iterable[int]) -> frozenset[int]:
    return heyting_implication(poset, a, frozenset())


def double_negation(poset: FinitePoset, a: Iterable[int]) -> frozenset[int]:
    return negation(poset, negation(poset, a))


# -- Dedekind-MacNeille machinery ---------------------------------------


def upper_bounds(poset: FinitePoset, subset: Iterable[int]) -> frozenset[int]:
    acc = frozenset(range(poset.n))
    for a in subset:
        acc &= poset.up(a)
    return acc


def lower_bounds(poset: FinitePoset, subset: Iterable[int]) -> frozenset[int]:
    acc = frozenset(range(poset.n))
    for a in subset:
        acc &= poset.down(a)
    return acc


def dm_closure(poset: FinitePoset, a: Iterable[int]) -> frozenset[int]:
    """Lower bounds of the upper bounds of ``a``.

    Always a closure operator on down-sets; it additionally preserves
    binary intersections when the poset is linearly ordered.
    """
    return lower_bounds(poset, upper_bounds(poset, a))


def dm_completion(
    poset: FinitePoset, frame: DownSetFrame | None = None
) -> tuple[frozenset[int], ...]:
    """Fixed points of the cut closure among down-sets, in stable id order."""
    frame = frame if frame is not None else enumerate_downsets(poset)
    return tuple(d for d in frame if dm_closure(poset, d) == d)


# -- maps between frames -------------------------------------------------


@dataclass(frozen=True)
class FrameMap:
    """A monotone table-backed map between two down-set frames."""

    source: DownSetFrame
    target: DownSetFrame
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != len(self.source):
            raise NotAFrameMorphismError(
                f"table has {len(self.table)} entries for a {len(self.source)}-element frame"
            )
        for i in self.table:
            if not (0 <= i < len(self.target)):
                raise NotAFrameMorphismError(f"table entry {i} is not a target id")

    def apply_id(self, i: int) -> int:
        return self.table[i]

    def apply(self, downset: frozenset[int]) -> frozenset[int]:
        return self.target.downset(self.table[self.source.id_of(downset)])


def frame_morphism_violation(f: FrameMap) -> dict | None:
    """None if ``f`` preserves finite meets and all joins, else a witness.

    On a finite frame, arbitrary meets and joins reduce to the binary and
    empty cases, so the check covers top, bottom, and all pairs.
    """
    src, tgt, table = f.source, f.target, f.table
    if table[src.top_id] != tgt.top_id:
        return {"law": "top", "a": None, "b": None}
    if table[src.bottom_id] != tgt.bottom_id:
        return {"law": "bottom", "a": None, "b": None}
    m = len(src)
    for i in range(m):
        for j in range(i + 1, m):
            if table[src.meet(i, j)] != tgt.meet(table[i], table[j]):
                return {"law": "meet", "a": i, "b": j}
            if table[src.join(i, j)] != tgt.join(table[i], table[j]):
                return {"law": "join", "a": i, "b": j}
    return None


def upper_adjoint(f: FrameMap) -> FrameMap:
    """Upper adjoint of a frame morphism, as the join of everything mapped below.

    The adjunction ``f(A) <= B  iff  A <= g(B)`` is verified exhaustively on
    construction.
    """
    witness = frame_morphism_violation(f)
    if witness is not None:
        if witness["a"] is not None:
            witness = dict(
                witness,
                a=sorted(f.source.downset(witness["a"])),
                b=sorted(f.source.downset(witness["b"])),
            )
        raise NotAFrameMorphismError(
            f"map does not preserve {witness['law']}", witness=witness
        )
    src, tgt = f.source, f.target
    table = []
    for b in range(len(tgt)):
        acc: frozenset[int] = frozenset()
        tb = tgt.downset(b)
        for a in range(len(src)):
            if tgt.downset(f.table[a]) <= tb:
                acc |= src.downset(a)
        table.append(src.id_of(acc))
    g = FrameMap(tgt, src, tuple(table))
    for a in range(len(src)):
        fa = tgt.downset(f.table[a])
        sa = src.downset(a)
        for b in range(len(tgt)):
            if (fa <= tgt.downset(b)) != (sa <= src.downset(g.table[b])):
                raise NotAFrameMorphismError(
                    "adjunction failed; input is not a frame morphism",
                    witness={"a": sorted(sa), "b": sorted(tgt.downset(b))},
                )
    return g


def restriction_frame_map(
    frame: DownSetFrame, subset: Iterable[int], sub_frame: DownSetFrame | None = None
) -> FrameMap:
    """The frame surjection D(P) -> D(X) given by A |-> A & X."""
    poset = frame.poset
    elems = sorted(set(subset))
    pos = {e: k for k, e in enumerate(elems)}
    if sub_frame is None:
        sub_frame = enumerate_downsets(poset.induced(elems))
    table = tuple(
        sub_frame.id_of(frozenset(pos[e] for e in d if e in pos)) for d in frame
    )
    return FrameMap(frame, sub_frame, table)


# -- order morphisms -----------------------------------------------------


@dataclass(frozen=True)
class OrderMorphism:
    """A monotone map between finite posets, validated on construction."""

    source: FinitePoset
    target: FinitePoset
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.mapping) != self.source.n:
            raise NotOrderMorphismError(
                f"mapping has {len(self.mapping)} entries for {self.source.n} elements"
            )
        for i in self.mapping:
            if not (0 <= i < self.target.n):
                raise NotOrderMorphismError(f"image {i} is not a target element")
        for x in range(self.source.n):
            for y in self.source.up(x):
                if not self.target.leq(self.mapping[x], self.mapping[y]):
                    raise NotOrderMorphismError(
                        f"monotonicity fails at {self.source.labels[x]} <= {self.source.labels[y]}",
                        witness={"x": self.source.labels[x], "y": self.source.labels[y]},
                    )

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def image_of(self, subset: Iterable[int]) -> frozenset[int]:
        return frozenset(self.mapping[x] for x in subset)

    def is_isomorphism(self) -> bool:
        if self.source.n != self.target.n or len(set(self.mapping)) != self.source.n:
            return False
        inv = [0] * self.target.n
        for x, fx in enumerate(self.mapping):
            inv[fx] = x
        return all(
            self.source.leq(inv[a], inv[b])
            for a in range(self.target.n)
            for b in self.target.up(a)
        )

    def inverse(self) -> "OrderMorphism":
        if not self.is_isomorphism():
            raise NotOrderIsomorphismError("map is not an order isomorphism")
        inv = [0] * self.target.n
        for x, fx in enumerate(self.mapping):
            inv[fx] = x
        return OrderMorphism(self.target, self.source, tuple(inv))


def all_order_morphisms(source: FinitePoset, target: FinitePoset) -> list[OrderMorphism]:
    """Every monotone map source -> target, in lexicographic mapping order."""
    out = []
    for mapping in product(range(target.n), repeat=source.n):
        ok = all(
            target.leq(mapping[x], mapping[y])
            for x in range(source.n)
            for y in source.up(x)
        )
        if ok:
            out.append(OrderMorphism(source, target, mapping))
    return out


def all_order_isomorphisms(source: FinitePoset, target: FinitePoset) -> list[OrderMorphism]:
    if source.n != target.n:
        return []
    return [f for f in all_order_morphisms(source, target) if f.is_isomorphism()]
