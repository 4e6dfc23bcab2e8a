"""Command-line front end.

Exit codes: 0 success / verification passed, 1 verification failure,
2 usage errors (bad flags, malformed tower specs or input files).
Reports print as plain tables; ``--json`` switches to canonical JSON.
The ADELION_CACHE environment variable, when set, is used as a cache
directory for Hensel-lifted local contexts.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import serialize
from .adeles import (
    Adele,
    cantor_adele,
    conorm,
    conorm_adele,
    contains,
    densify,
    in_conorm_image,
    is_cauchy,
    limit_local,
    neighborhood_base,
)
from .cyclotomic import Tower
from .errors import AdelionError, InvalidTowerError
from .places import ARCH, places_above, splitting_profile
from .suites import SUITES, run_suites
from .towerdata import (
    export_tower_data,
    tower_data_from_json,
    tower_data_to_json,
    validate_tower_data,
)
from .transition import CyclotomicTowerView, build_transition, verify_td

USAGE_ERROR = 2
CHECK_FAILED = 1


class CliError(Exception):
    """Usage-level problem; maps to exit code 2."""


def _parse_tower(spec: str) -> Tower:
    try:
        return Tower.parse(spec)
    except InvalidTowerError as exc:
        raise CliError(str(exc))


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}")


def _write_json(path: str, doc: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize.dumps_canonical(doc))
        fh.write("\n")


def _load(path: str, expected: str):
    doc = _read_json(path)
    if doc.get("schema") != expected:
        raise CliError(f"{path}: expected schema {expected}, got {doc.get('schema')!r}")
    try:
        return serialize.LOADERS[expected](doc)
    except (AdelionError, ValueError, KeyError) as exc:
        raise CliError(f"{path}: {exc}")


def _emit(doc: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        print(serialize.dumps_canonical(doc))
    else:
        for line in human_lines:
            print(line)


# --------------------------------------------------------------------------
# subcommands


def cmd_places(args) -> int:
    tower = _parse_tower(args.tower)
    base = ARCH if args.arch else args.prime
    if base is None:
        raise CliError("one of --prime or --arch is required")
    profile = splitting_profile(base, tower)
    levels = []
    for idx, n in enumerate(tower.conductors):
        if args.level is not None and idx != args.level:
            continue
        pls = places_above(n, base)
        levels.append(
            {"level": idx, "conductor": n, "count": len(pls), "places": [p.serialize() for p in pls]}
        )
    doc = {"tower": tower.spec(), "base": str(base), "profile": profile, "levels": levels}
    human = [f"places above {base} in tower {tower.spec()}", f"profile: {profile}"]
    for lv in levels:
        human.append(f"  level {lv['level']} (n={lv['conductor']}): {lv['count']} places")
        for s in lv["places"]:
            human.append(f"    {s}")
    _emit(doc, args.json, human)
    return 0


def cmd_transition(args) -> int:
    if args.action == "build":
        tower = _parse_tower(args.tower)
        if args.prime is None:
            raise CliError("--prime is required for build")
        depth = tower.depth if args.depth is None else args.depth
        view = CyclotomicTowerView(tower)
        v = places_above(tower.conductors[tower.base_index], args.prime)[0]
        td = build_transition(view, v, depth, args.tie_break)
        doc = serialize.td_to_json(td)
        if args.out:
            _write_json(args.out, doc)
            print(f"wrote transition table ({len(td.places)} places) to {args.out}")
        else:
            print(serialize.dumps_canonical(doc))
        return 0
    td = _load(args.infile, "td/1")
    report = verify_td(td)
    doc = {
        "ok": report.ok,
        "pairs": report.checked_pairs,
        "triples": report.checked_triples,
        "failures": list(report.failures),
    }
    human = [
        f"transition table: {'pass' if report.ok else 'FAIL'}"
        f" ({report.checked_pairs} pairs, {report.checked_triples} triples)"
    ]
    human += [f"  {f}" for f in report.failures]
    _emit(doc, args.json, human)
    return 0 if report.ok else CHECK_FAILED


def cmd_adele(args) -> int:
    op = args.op
    if op == "cantor":
        tower = _parse_tower(args.tower)
        depth = tower.depth if args.depth is None else args.depth
        try:
            a = cantor_adele(tower, args.prime, depth)
        except AdelionError as exc:
            raise CliError(f"{exc.code}: {exc}")
        _write_json(args.out, serialize.adele_to_json(a))
        print(f"wrote digit-map adele ({len(a.slices[args.prime])} places) to {args.out}")
        return 0
    if op == "conorm":
        c = _load(args.infile, "cadele/1")
        if args.to_level is not None:
            out = conorm(c, args.to_level)
            doc = serialize.cadele_to_json(out)
        else:
            out = conorm_adele(c, args.to_depth)
            doc = serialize.adele_to_json(out)
        _write_json(args.out, doc)
        print(f"wrote conorm to {args.out}")
        return 0
    if op == "member":
        a = _load(args.infile, "adele/1")
        ok, witness = in_conorm_image(a, args.level)
        doc = {"member": ok}
        if ok:
            doc["witness"] = serialize.cadele_to_json(witness)
        human = [f"conorm image at level {args.level}: {'true' if ok else 'false'}"]
        _emit(doc, args.json, human)
        if ok and args.out:
            _write_json(args.out, serialize.cadele_to_json(witness))
        return 0
    if op in ("add", "mul"):
        a = _load(args.a, "adele/1")
        b = _load(args.b, "adele/1")
        try:
            out = a + b if op == "add" else a * b
        except AdelionError as exc:
            raise CliError(f"{exc.code}: {exc}")
        _write_json(args.out, serialize.adele_to_json(out))
        print(f"wrote {op} result to {args.out}")
        return 0
    if op == "densify":
        a = _load(args.infile, "adele/1")
        U = _load(args.open, "uopen/1")
        try:
            level, witness = densify(a, U)
        except AdelionError as exc:
            print(f"densify failed: {exc.code}")
            return CHECK_FAILED
        recheck = contains(U, conorm_adele(witness))
        _write_json(args.out, serialize.cadele_to_json(witness))
        doc = {"level": level, "witness": args.out, "recheck": recheck is True}
        _emit(doc, args.json, [f"witness at tower level {level} written to {args.out}",
                               f"membership recheck: {recheck}"])
        return 0 if recheck is True else CHECK_FAILED
    if op == "cauchy":
        seq = [_load(path, "adele/1") for path in args.seq]
        tower = seq[0].tower
        base = [
            neighborhood_base(tower, {args.prime}, args.prime**j)
            for j in range(1, args.max_exponent + 1)
        ]
        try:
            report = is_cauchy(seq, base)
        except AdelionError as exc:
            raise CliError(f"{exc.code}: {exc}")
        doc = {"cauchy": report.ok, "indices": [[label, idx] for label, idx in report.entries]}
        human = [f"Cauchy w.r.t. scales p^-1..p^-{args.max_exponent}: {report.ok}"]
        human += [f"  {label}: settles at index {idx}" for label, idx in report.entries]
        if args.precision:
            lim = limit_local(seq, args.prime, args.precision)
            doc["limit_constant_level"] = lim.constant_level
            doc["limit_final_step"] = lim.final_step
            human.append(
                f"local limit at precision {args.precision}: constant at level {lim.constant_level}"
            )
        _emit(doc, args.json, human)
        return 0 if report.ok else CHECK_FAILED
    raise CliError(f"unknown adele operation {op!r}")


def cmd_tower(args) -> int:
    if args.action == "export":
        tower = _parse_tower(args.tower)
        primes = []
        for part in args.primes.split(","):
            part = part.strip()
            primes.append(ARCH if part == "inf" else int(part))
        data = export_tower_data(tower, primes)
        _write_json(args.out, tower_data_to_json(data))
        print(f"wrote tower tables to {args.out}")
        return 0
    doc = _read_json(args.infile)
    try:
        data = tower_data_from_json(doc)
    except (ValueError, KeyError) as exc:
        raise CliError(f"{args.infile}: {exc}")
    report = validate_tower_data(data)
    out = {
        "ok": report.ok,
        "failures": [{"code": f.code, "detail": f.detail} for f in report.failures],
    }
    human = [f"tower tables: {'pass' if report.ok else 'FAIL'}"]
    human += [f"  {f.code}: {f.detail}" for f in report.failures]
    _emit(out, args.json, human)
    return 0 if report.ok else CHECK_FAILED


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, args.seed)
    ok = all(r.ok for r in results)
    doc = {
        "seed": args.seed,
        "ok": ok,
        "suites": [
            {"name": r.name, "checks": r.checks, "failures": list(r.failures)} for r in results
        ],
    }
    human = []
    for r in results:
        human.extend(r.lines())
    human.append(f"overall: {'pass' if ok else 'FAIL'}")
    _emit(doc, args.json, human)
    return 0 if ok else CHECK_FAILED


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adelion",
        description="finite-depth laboratory for places, transition tables and adele rings of cyclotomic towers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_places = sub.add_parser("places", help="list places and splitting profiles")
    p_places.add_argument("--tower", required=True)
    p_places.add_argument("--prime", type=int)
    p_places.add_argument("--arch", action="store_true")
    p_places.add_argument("--level", type=int, default=None)
    p_places.add_argument("--json", action="store_true")
    p_places.set_defaults(func=cmd_places)

    p_td = sub.add_parser("transition", help="build or verify transition tables")
    td_sub = p_td.add_subparsers(dest="action", required=True)
    td_build = td_sub.add_parser("build")
    td_build.add_argument("--tower", required=True)
    td_build.add_argument("--prime", type=int, required=True)
    td_build.add_argument("--depth", type=int, default=None)
    td_build.add_argument("--tie-break", choices=("least", "greatest"), default="least")
    td_build.add_argument("--out", default=None)
    td_build.set_defaults(func=cmd_transition)
    td_verify = td_sub.add_parser("verify")
    td_verify.add_argument("--in", dest="infile", required=True)
    td_verify.add_argument("--json", action="store_true")
    td_verify.set_defaults(func=cmd_transition)

    p_adele = sub.add_parser("adele", help="adele construction and operations")
    ad_sub = p_adele.add_subparsers(dest="op", required=True)
    ad_cantor = ad_sub.add_parser("cantor")
    ad_cantor.add_argument("--tower", required=True)
    ad_cantor.add_argument("--prime", type=int, required=True)
    ad_cantor.add_argument("--depth", type=int, default=None)
    ad_cantor.add_argument("--out", required=True)
    ad_conorm = ad_sub.add_parser("conorm")
    ad_conorm.add_argument("--in", dest="infile", required=True)
    group = ad_conorm.add_mutually_exclusive_group()
    group.add_argument("--to-level", type=int, default=None)
    group.add_argument("--to-depth", type=int, default=None)
    ad_conorm.add_argument("--out", required=True)
    ad_member = ad_sub.add_parser("member")
    ad_member.add_argument("--in", dest="infile", required=True)
    ad_member.add_argument("--level", type=int, required=True)
    ad_member.add_argument("--out", default=None)
    ad_member.add_argument("--json", action="store_true")
    for name in ("add", "mul"):
        ad_bin = ad_sub.add_parser(name)
        ad_bin.add_argument("--a", required=True)
        ad_bin.add_argument("--b", required=True)
        ad_bin.add_argument("--out", required=True)
    ad_dense = ad_sub.add_parser("densify")
    ad_dense.add_argument("--in", dest="infile", required=True)
    ad_dense.add_argument("--open", required=True)
    ad_dense.add_argument("--out", required=True)
    ad_dense.add_argument("--json", action="store_true")
    ad_cauchy = ad_sub.add_parser("cauchy")
    ad_cauchy.add_argument("--seq", nargs="+", required=True)
    ad_cauchy.add_argument("--prime", type=int, required=True)
    ad_cauchy.add_argument("--max-exponent", type=int, default=4)
    ad_cauchy.add_argument("--precision", type=int, default=None)
    ad_cauchy.add_argument("--json", action="store_true")
    p_adele.set_defaults(func=cmd_adele)

    p_tower = sub.add_parser("tower", help="export or validate generic tower tables")
    tw_sub = p_tower.add_subparsers(dest="action", required=True)
    tw_export = tw_sub.add_parser("export")
    tw_export.add_argument("--tower", required=True)
    tw_export.add_argument("--primes", required=True, help="comma separated, 'inf' allowed")
    tw_export.add_argument("--out", required=True)
    tw_validate = tw_sub.add_parser("validate")
    tw_validate.add_argument("--in", dest="infile", required=True)
    tw_validate.add_argument("--json", action="store_true")
    p_tower.set_defaults(func=cmd_tower)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument(
        "--suite",
        default="all",
        choices=("all",) + tuple(SUITES),
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--json", action="store_true")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except AdelionError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
