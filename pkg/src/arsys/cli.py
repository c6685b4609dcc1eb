"""Command-line surface: construction, enumeration, verification, oracle.

All output is canonical JSON under --json (sorted keys, fixed separators)
and plain tables otherwise; identical invocations produce byte-identical
output.  Exit statuses: 0 ok, 2 validation failure, 3 oracle/classifier
diff mismatch, 4 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ResourceBoundError, ValidationError
from .lattice import LatticeSubgroup, enumerate_prime_maximal_subgroups
from .roots import (
    RootSystemType,
    all_maximal_closed,
    borel_de_siebenthal,
    build_root_system,
    classify_subset,
    highest_root_marks,
    m_constant,
)
from .subroot import (
    SubrootDescriptor,
    common_period,
    enumerate_maximal_periodic,
    gradient_class,
    is_closed_subroot,
    is_maximal_periodic,
)
from .classify import ALL_CASES, ClassifyRequest, classify_all
from .systems import build_system
from .toroidal import saito_families

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIFF = 3
EXIT_BOUND = 4


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _system_from_args(args) -> dict:
    kind = args.system
    if kind == "finite":
        return {"kind": "finite", "base": RootSystemType.parse(args.base).to_json()}
    if kind == "toroidal":
        if args.nullity is None:
            raise ValidationError("toroidal systems need --nullity")
        return {
            "kind": "toroidal",
            "base": RootSystemType.parse(args.base).to_json(),
            "nullity": args.nullity,
        }
    if kind == "twisted":
        if args.order is None:
            raise ValidationError("twisted systems need --order")
        return {
            "kind": "twisted_affine",
            "outer": RootSystemType.parse(args.base).to_json(),
            "order": args.order,
        }
    if kind == "saito":
        if args.rank is None:
            raise ValidationError("saito systems need --rank")
        return {"kind": "saito", "rank": args.rank}
    if kind == "custom":
        if args.config is None:
            raise ValidationError("custom systems need --config FILE")
        with open(args.config) as fh:
            return json.load(fh)
    raise ValidationError(f"unknown system kind {kind!r}")


def _add_system_flags(p):
    p.add_argument("--system", required=True,
                   choices=["finite", "toroidal", "twisted", "saito", "custom"])
    p.add_argument("--base", help="root system type, e.g. A2, BC3 (outer type for twisted)")
    p.add_argument("--nullity", type=int, help="nullity k for toroidal systems")
    p.add_argument("--order", type=int, help="automorphism order for twisted systems")
    p.add_argument("--rank", type=int, help="rank for saito systems")
    p.add_argument("--config", help="JSON config file for custom systems")


def cmd_roots(args) -> int:
    rstype = RootSystemType.parse(args.type)
    rs = build_root_system(rstype)
    info = {
        "type": rstype.to_json(),
        "roots": [list(r) for r in rs.sorted_roots],
        "length_classes": {
            cls: [list(r) for r in rs.of_class(cls)] for cls in rs.classes()
        },
        "simple_system": [list(r) for r in rs.simple_system],
        "m_constant": m_constant(rstype),
        "maximal_closed_classes": [
            sorted(map(list, s)) for s in borel_de_siebenthal(rs)
        ],
    }
    if rstype.is_reduced:
        alpha0, marks = highest_root_marks(rs)
        info["highest_root"] = list(alpha0)
        info["marks"] = list(marks)
    if args.json:
        _emit_json(info)
    else:
        print(f"type {rstype}: {len(rs)} roots, m-constant {info['m_constant']}")
        for cls in rs.classes():
            print(f"  {cls}: {len(rs.of_class(cls))}")
        if "marks" in info:
            print(f"  highest root {info['highest_root']} marks {info['marks']}")
        print(f"  maximal closed classes: {len(info['maximal_closed_classes'])}")
        for s in info["maximal_closed_classes"]:
            print(f"    size {len(s)}: {s}")
    return EXIT_OK


def cmd_hnf(args) -> int:
    mats = enumerate_prime_maximal_subgroups(args.k, args.q)
    obj = {"k": args.k, "q": args.q, "count": len(mats),
           "matrices": [m.to_json() for m in mats]}
    if args.json:
        _emit_json(obj)
    else:
        print(f"{len(mats)} Hermite normal forms of determinant {args.q} in rank {args.k}")
        for m in mats:
            print(f"  {m.to_json()}")
    return EXIT_OK


def cmd_classify(args) -> int:
    system = build_system(_system_from_args(args))
    cases = tuple(args.cases.split(",")) if args.cases else ALL_CASES
    req = ClassifyRequest(system, q_max=args.qmax, cases=cases)
    rep = classify_all(req)
    if args.json:
        _emit_json(rep.to_json())
    else:
        print(f"{len(rep.entries)} maximal closed subroot systems (q_max={args.qmax})")
        for d, prov in rep.entries:
            print(f"  [{prov['gradient_class']}] {prov['case']}: "
                  f"gradient size {len(d.gradient)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.infile) as fh:
        obj = json.load(fh)
    d = SubrootDescriptor.from_json(obj)
    closed, witness = is_closed_subroot(d)
    base = d.system.base
    flags = classify_subset(base, set(d.gradient)).to_json()
    out = {
        "closed": closed,
        "witness": None if witness is None else [
            [list(witness[0][0]), list(witness[0][1])],
            [list(witness[1][0]), list(witness[1][1])],
        ],
        "gradient_flags": flags,
    }
    if closed:
        out["gradient_class"] = gradient_class(d)
    if args.period:
        M = common_period(d.system, [d], scale=args.period)
        out["period"] = M.to_json()
        out["maximal"] = is_maximal_periodic(d, M)
    if args.json:
        _emit_json(out)
    else:
        print(f"closed={str(closed).lower()}")
        if not closed:
            print(f"witness={out['witness']}")
        else:
            print(f"gradient_class={out['gradient_class']}")
        for key, val in flags.items():
            print(f"gradient.{key}={str(val).lower()}")
        if "maximal" in out:
            print(f"maximal={str(out['maximal']).lower()}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    system = build_system(_system_from_args(args))
    M = common_period(system, scale=args.period)
    oracle = enumerate_maximal_periodic(system, M, cell_bound=args.cell_bound)
    qmax = args.qmax if args.qmax else max(2, args.period)
    rep = classify_all(ClassifyRequest(system, q_max=qmax))
    periodic = [
        d for d in rep.descriptors
        if all(cs.subgroup.contains_lattice(M) for _, cs in d.z_map)
    ]
    okeys = {d.canonical_key(): d for d in oracle}
    ckeys = {d.canonical_key(): d for d in periodic}
    only_oracle = sorted(set(okeys) - set(ckeys))
    only_classified = sorted(set(ckeys) - set(okeys))
    obj = {
        "period": M.to_json(),
        "q_max": qmax,
        "oracle_count": len(okeys),
        "classified_periodic_count": len(ckeys),
        "descriptors": [okeys[k].to_json()["z"] for k in sorted(okeys)],
        "diff": {
            "oracle_only": [okeys[k].to_json()["z"] for k in only_oracle],
            "classified_only": [ckeys[k].to_json()["z"] for k in only_classified],
        },
    }
    if args.json:
        _emit_json(obj)
    else:
        print(f"oracle: {len(okeys)} maximal systems modulo {M.to_json()}")
        print(f"classifier (q_max={qmax}, restricted): {len(ckeys)}")
        print(f"diff: {len(only_oracle)} oracle-only, {len(only_classified)} classified-only")
    if args.diff and (only_oracle or only_classified):
        return EXIT_DIFF
    return EXIT_OK


def cmd_saito(args) -> int:
    rep = saito_families(args.rank, args.qmax)
    if args.json:
        _emit_json(rep.to_json())
    else:
        print(f"{len(rep.entries)} maximal closed subroot systems "
              f"(rank {args.rank}, q_max={args.qmax})")
        for d, prov in rep.entries:
            print(f"  {prov['case']}: gradient size {len(d.gradient)}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="arsys",
        description="exact classification of maximal closed subroot systems "
                    "of affine reflection systems",
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("roots", help="finite root system data")
    p.add_argument("--type", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("hnf", help="Hermite normal forms of prime determinant")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hnf)

    p = sub.add_parser("classify", help="run the classification engines")
    _add_system_flags(p)
    p.add_argument("--qmax", type=int, default=2)
    p.add_argument("--cases", help="comma list: semi_closed,full,proper_closed")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="check a descriptor file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--period", type=int,
                   help="scale factor m for the maximality period m*Z^k")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="periodic brute force and classifier diff")
    _add_system_flags(p)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--qmax", type=int)
    p.add_argument("--cell-bound", type=int, default=64)
    p.add_argument("--diff", action="store_true",
                   help="exit 3 when oracle and classifier differ")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("saito", help="the four nullity-2 families over C_n")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--qmax", type=int, default=2)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_saito)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ResourceBoundError as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
