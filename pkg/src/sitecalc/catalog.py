"""Built-in posets used throughout the tests and the CLI."""

from __future__ import annotations

from .poset import FinitePoset

_DEFS: tuple[tuple[str, list[str], list[tuple[str, str]]], ...] = (
    ("point", ["a"], []),
    ("chain2", ["0", "1"], [("0", "1")]),
    ("chain3", ["0", "1", "2"], [("0", "1"), ("1", "2")]),
    ("chain4", ["0", "1", "2", "3"], [("0", "1"), ("1", "2"), ("2", "3")]),
    ("antichain2", ["a", "b"], []),
    ("antichain3", ["a", "b", "c"], []),
    ("V", ["x", "y", "z"], [("y", "x"), ("z", "x")]),
    ("Lambda", ["x", "y", "z"], [("x", "y"), ("x", "z")]),
    ("diamond", ["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]),
)

# Shape-named posets that also star in specific counterexamples.
ALIASES = {
    "stability-counterexample": "V",
    "subcanonicity-example": "Lambda",
}


def _build() -> dict[str, FinitePoset]:
    out = {}
    for name, labels, pairs in _DEFS:
        index = {lab: i for i, lab in enumerate(labels)}
        out[name] = FinitePoset(labels, [(index[a], index[b]) for a, b in pairs])
    return out


_CATALOG = _build()

CATALOG_NAMES = tuple(name for name, _, _ in _DEFS)


def catalog() -> dict[str, FinitePoset]:
    """Name -> poset for the canonical catalog (aliases excluded)."""
    return dict(_CATALOG)


def catalog_poset(name: str) -> FinitePoset:
    key = ALIASES.get(name, name)
    if key not in _CATALOG:
        known = ", ".join(list(CATALOG_NAMES) + sorted(ALIASES))
        raise KeyError(f"unknown catalog poset {name!r}; known: {known}")
    return _CATALOG[key]
