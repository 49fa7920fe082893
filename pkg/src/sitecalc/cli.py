"""Command-line surface.

Exit codes: 0 on success with JSON (or DOT) on stdout, 1 on domain errors
with an ``{"error": {code, message, witness}}`` envelope, 2 on usage
errors.  All output is deterministic; the library is randomness-free.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import localic, sheaves, sites
from .catalog import ALIASES, catalog, catalog_poset
from .errors import SiteCalcError
from .poset import FinitePoset, enumerate_downsets, export_dot, parse_poset, subset_of_labels


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_poset(path: str) -> FinitePoset:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return FinitePoset.from_json(json.loads(text))
    return parse_poset(text)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _split_elements(poset: FinitePoset, raw: str) -> frozenset[int]:
    names = [tok for tok in raw.replace(",", " ").split() if tok]
    return subset_of_labels(poset, names)


def _cmd_validate(args) -> int:
    poset = _load_poset(args.poset)
    _emit({"ok": True, "poset": poset.to_json()})
    return 0


def _cmd_topology(args) -> int:
    poset = _load_poset(args.poset)
    if args.subset is not None:
        topology = sites.subset_topology(poset, _split_elements(poset, args.subset))
    elif args.kind is not None:
        maker = {
            "indiscrete": sites.indiscrete_topology,
            "discrete": sites.discrete_topology,
            "atomic": sites.atomic_topology,
            "dense": sites.dense_topology,
        }[args.kind]
        topology = maker(poset)
    elif args.derived is not None:
        topology = sites.derived_topology(poset, _split_elements(poset, args.derived))
    else:
        topology = sites.lx_topology(poset, _split_elements(poset, args.lx))
    _emit(topology.to_json())
    return 0


def _cmd_enumerate(args) -> int:
    poset = _load_poset(args.poset)
    topologies = sites.enumerate_all_topologies(poset, cap=args.cap)
    out = []
    for topology in topologies:
        doc = topology.to_json()
        doc["generated_by"] = sorted(
            poset.labels[i] for i in sites.generating_subset(topology)
        )
        del doc["poset"]
        out.append(doc)
    _emit({"poset": poset.to_json(), "count": len(topologies), "topologies": out})
    return 0


def _cmd_convert(args) -> int:
    poset = _load_poset(args.poset)
    frame = enumerate_downsets(poset)
    if args.to is not None:
        topology = sites.GrothTopology.from_json(_load_json(args.topology))
        nucleus = localic.nucleus_from_topology(topology, frame)
        if args.to == "nucleus":
            _emit(nucleus.to_json())
        elif args.to == "congruence":
            _emit(localic.congruence_from_nucleus(nucleus).to_json())
        else:
            _emit(localic.sublocale_from_nucleus(nucleus).to_json())
        return 0
    doc = _load_json(args.input)
    if args.from_ == "nucleus":
        nucleus = localic.Nucleus.from_json(doc, frame)
    elif args.from_ == "congruence":
        nucleus = localic.nucleus_from_congruence(localic.Congruence.from_json(doc, frame))
    else:
        nucleus = localic.nucleus_from_sublocale(localic.Sublocale.from_json(doc, frame))
    _emit(localic.topology_from_nucleus(nucleus).to_json())
    return 0


def _cmd_sheaf(args) -> int:
    poset = _load_poset(args.poset)
    topology = sites.GrothTopology.from_json(_load_json(args.topology))
    presheaf = sheaves.Presheaf.from_json(_load_json(args.presheaf), poset)
    check = sheaves.is_sheaf(presheaf, topology)
    _emit({"is_sheaf": check.ok, "witness": check.witness})
    return 0


def _cmd_subcanonical(args) -> int:
    poset = _load_poset(args.poset)
    topology = sites.GrothTopology.from_json(_load_json(args.topology))
    witnesses = sites.subcanonicity_report(poset, topology)
    _emit(
        {
            "subcanonical": not witnesses,
            "witnesses": [
                {
                    "representable": poset.labels[p],
                    "q": poset.labels[q],
                    "cover": sorted(poset.labels[i] for i in s),
                }
                for p, q, s in witnesses
            ],
        }
    )
    return 0


def _cmd_catalog(args) -> int:
    if args.name is not None:
        _emit(catalog_poset(args.name).to_json())
        return 0
    _emit(
        {
            "posets": [
                {"name": name, **poset.to_json()} for name, poset in catalog().items()
            ],
            "aliases": dict(ALIASES),
        }
    )
    return 0


def _cmd_export(args) -> int:
    poset = _load_poset(args.poset)
    sys.stdout.write(export_dot(poset))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitecalc",
        description="Grothendieck topologies on finite posets",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="parse and validate a poset file")
    p.add_argument("--poset", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("topology", help="construct a topology")
    p.add_argument("--poset", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--subset", help="comma-separated generating elements")
    group.add_argument("--kind", choices=["indiscrete", "discrete", "atomic", "dense"])
    group.add_argument("--derived", help="subset for the derived topology")
    group.add_argument("--lx", help="subset for the meets-the-subset topology")
    p.set_defaults(func=_cmd_topology)

    p = sub.add_parser("enumerate", help="brute-force all topologies")
    p.add_argument("--poset", required=True)
    p.add_argument("--cap", type=int, default=sites.DEFAULT_BRUTE_FORCE_CAP)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("convert", help="move between topology presentations")
    p.add_argument("--poset", required=True)
    p.add_argument("--topology", help="topology JSON file (forward direction)")
    p.add_argument("--to", choices=["nucleus", "congruence", "sublocale"])
    p.add_argument("--from", dest="from_", choices=["nucleus", "congruence", "sublocale"])
    p.add_argument("--input", help="presentation JSON file (reverse direction)")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("sheaf", help="sheaf conditions")
    action = p.add_subparsers(dest="action", required=True)
    check = action.add_parser("check", help="test a presheaf against a topology")
    check.add_argument("--poset", required=True)
    check.add_argument("--topology", required=True)
    check.add_argument("--presheaf", required=True)
    check.set_defaults(func=_cmd_sheaf)

    p = sub.add_parser("subcanonical", help="do all representables satisfy descent")
    p.add_argument("--poset", required=True)
    p.add_argument("--topology", required=True)
    p.set_defaults(func=_cmd_subcanonical)

    p = sub.add_parser("catalog", help="built-in posets")
    p.add_argument("--name")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("export", help="export formats")
    what = p.add_subparsers(dest="what", required=True)
    dot = what.add_parser("dot", help="Hasse diagram in DOT format")
    dot.add_argument("--poset", required=True)
    dot.set_defaults(func=_cmd_export)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "convert":
        forward = args.topology is not None and args.to is not None
        reverse = args.from_ is not None and args.input is not None
        if forward == reverse:
            parser.error("convert wants either --topology/--to or --from/--input")
    try:
        return args.func(args)
    except SiteCalcError as err:
        _emit({"error": err.to_json()})
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as err:
        _emit({"error": {"code": type(err).__name__, "message": str(err), "witness": None}})
        return 1


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
