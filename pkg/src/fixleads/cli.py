"""Command line surface: check, explain, check-cert and si subcommands.

Exit codes: 0 all requested checks pass, 1 some property fails or a
certificate is rejected, 2 usage or parse errors, 3 internal defect (the
independent trace oracle disagrees with the fixpoint verdict, or a rule's
self-check fires).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Tuple

from . import __version__
from .certificates import (
    Basic,
    CertificateError,
    cert_from_json,
    cert_to_json,
    check_certificate,
    derive_certificate_mp,
    derive_certificate_wf,
    SCHEMA_VERSION,
)
from .dsl import DslError, Elaborated, Property, load_file
from .events import EventSystem
from .mp import ensures_mp, leadsto_mp, leadsto_mp_si, rule_mp_variant
from .oracle import oracle_mp, oracle_reachable, oracle_wf, validate_counterexample
from .states import DEFAULT_STATE_CAP, SpaceError, StateSet
from .verdicts import SelfCheckDefect, Verdict
from .wf import ensures_wf, leadsto_wf, leadsto_wf_si, rule_wf_to_mp

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DEFECT = 3

REPORT_SCHEMA = 1


class UsageError(Exception):
    pass


def _state_cap(args) -> int:
    if getattr(args, "max_states", None) is not None:
        return args.max_states
    env = os.environ.get("FIXLEADS_MAX_STATES")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FIXLEADS_MAX_STATES must be an integer, got {env!r}")
    return DEFAULT_STATE_CAP


def _load(path: str, args) -> Elaborated:
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    try:
        return load_file(path, cap=_state_cap(args))
    except (DslError, SpaceError) as exc:
        raise UsageError(f"{path}: {exc}")


def check_property(
    elab: Elaborated, prop: Property, assume: Optional[str] = None, force_si: bool = False
) -> Verdict:
    """Dispatch one elaborated property to the matching engine."""
    sys_ = elab.system
    assumption = assume or prop.assumption
    if prop.kind == "ensures":
        if assumption == "mp":
            return ensures_mp(sys_, prop.p, prop.q)
        if prop.via is None:
            raise UsageError(
                f"property {prop.name!r}: ensures under wf needs 'via <event>'"
            )
        return ensures_wf(sys_, sys_.event(prop.via), prop.p, prop.q)
    use_si = prop.with_si or force_si
    if prop.using is not None:
        variant = elab.variants[prop.using]
        if assumption == "mp":
            return rule_mp_variant(sys_, prop.p, prop.q, variant)
        return rule_wf_to_mp(sys_, prop.p, prop.q, variant)
    if assumption == "mp":
        return leadsto_mp_si(sys_, prop.p, prop.q) if use_si else leadsto_mp(sys_, prop.p, prop.q)
    return leadsto_wf_si(sys_, prop.p, prop.q) if use_si else leadsto_wf(sys_, prop.p, prop.q)


def _oracle_claim(
    elab: Elaborated, prop: Property, assumption: str, use_si: bool
) -> Tuple[StateSet, StateSet]:
    a, b = prop.p, prop.q
    if use_si:
        si = elab.system.strongest_invariant()
        a, b = a & si, b & si
    return a, b


def _run_oracle(sys_: EventSystem, assumption: str, a: StateSet, b: StateSet):
    if assumption == "mp":
        return oracle_mp(sys_, a, b)
    return oracle_wf(sys_, a, b)


def _format_set(s: StateSet) -> str:
    if len(s) <= 16:
        inner = ", ".join(
            " ".join(f"{k}={v}" for k, v in st.items()) for st in s.to_json()
        )
        return "{" + inner + "}"
    return f"<{len(s)} states>"


def cmd_check(args) -> int:
    elab = _load(args.file, args)
    report = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "system": elab.system.name,
        "properties": [],
    }
    if not elab.properties:
        raise UsageError(f"{args.file}: no properties declared")
    all_hold = True
    defect = False
    for prop in elab.properties:
        started = time.perf_counter()
        verdict = check_property(elab, prop, assume=args.assume, force_si=args.si)
        assumption = args.assume or prop.assumption
        entry = {
            "name": prop.name,
            "kind": prop.kind,
            "assumption": assumption,
            "verdict": verdict.to_json(),
        }
        cx = None
        if prop.kind == "leadsto" and (args.oracle or not verdict.holds):
            use_si = prop.with_si or args.si
            a, b = _oracle_claim(elab, prop, assumption, use_si)
            oracle_assumption = "mp" if prop.using is not None else assumption
            o_holds, cx = _run_oracle(elab.system, oracle_assumption, a, b)
            if args.oracle:
                entry["oracle"] = {"holds": o_holds}
                entry["agreement"] = o_holds == verdict.holds
                if not entry["agreement"]:
                    defect = True
            if cx is not None and not verdict.holds:
                if not validate_counterexample(elab.system, cx, b):
                    defect = True
                entry["counterexample"] = cx.to_json(elab.system.space)
        entry["time_ms"] = round((time.perf_counter() - started) * 1000, 3)
        report["properties"].append(entry)
        all_hold = all_hold and verdict.holds
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print(f"system {report['system']} ({len(report['properties'])} properties)")
        for entry in report["properties"]:
            mark = "PASS" if entry["verdict"]["holds"] else "FAIL"
            line = f"  {mark} {entry['name']} ({entry['kind']} under {entry['assumption']})"
            if "agreement" in entry:
                line += " [oracle agrees]" if entry["agreement"] else " [ORACLE DISAGREES]"
            print(line)
            if "counterexample" in entry:
                print(f"       counterexample: {json.dumps(entry['counterexample'])}")
    if defect:
        print("internal defect: oracle and fixpoint verdicts disagree", file=sys.stderr)
        return EXIT_DEFECT
    return EXIT_OK if all_hold else EXIT_FAIL


def _find_property(elab: Elaborated, name: str) -> Property:
    for prop in elab.properties:
        if prop.name == name:
            return prop
    raise UsageError(f"no property named {name!r}")


def cmd_explain(args) -> int:
    elab = _load(args.file, args)
    prop = _find_property(elab, args.property)
    sys_ = elab.system
    verdict = check_property(elab, prop)
    if not verdict.holds:
        print(f"property {prop.name!r} fails; nothing to certify", file=sys.stderr)
        return EXIT_FAIL
    if prop.kind == "ensures":
        assumption = prop.assumption
        a, b = prop.p, prop.q
        cert = Basic(a, b, assumption, helpful=prop.via)
    else:
        assumption = "mp" if prop.using is not None else prop.assumption
        a, b = _oracle_claim(elab, prop, assumption, prop.with_si)
        if verdict.trace is None:
            verdict = (leadsto_mp if assumption == "mp" else leadsto_wf)(sys_, a, b)
        derive = derive_certificate_mp if assumption == "mp" else derive_certificate_wf
        cert = derive(sys_, a, b, verdict.trace)
    payload = {
        "schema": SCHEMA_VERSION,
        "system": sys_.name,
        "property": prop.name,
        "assumption": assumption,
        "claimed": {"a": a.to_json(), "b": b.to_json()},
        "certificate": cert_to_json(cert),
    }
    out = args.out or (os.path.splitext(args.file)[0] + f".{prop.name}.cert.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote certificate to {out}")
    return EXIT_OK


def cmd_check_cert(args) -> int:
    elab = _load(args.file, args)
    if not os.path.exists(args.cert):
        raise UsageError(f"no such file: {args.cert}")
    with open(args.cert, encoding="utf-8") as fh:
        payload = json.load(fh)
    space = elab.system.space
    try:
        cert = cert_from_json(space, payload["certificate"])
        a = space.from_indices(space.index_of(st) for st in payload["claimed"]["a"])
        b = space.from_indices(space.index_of(st) for st in payload["claimed"]["b"])
        assumption = payload["assumption"]
    except (KeyError, CertificateError, SpaceError) as exc:
        raise UsageError(f"{args.cert}: malformed certificate file ({exc})")
    ok = check_certificate(elab.system, cert, (a, b), assumption)
    print("certificate accepted" if ok else "certificate rejected")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_si(args) -> int:
    elab = _load(args.file, args)
    if not elab.has_init:
        raise UsageError(f"{args.file}: no init declared")
    si = elab.system.strongest_invariant()
    if args.json:
        json.dump({"schema": REPORT_SCHEMA, "si": si.to_json()}, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print(_format_set(si))
    if args.verify:
        reachable = oracle_reachable(elab.system, elab.system.init)
        if reachable.mask != si.mask:
            print("internal defect: reachability disagrees with the fixpoint", file=sys.stderr)
            return EXIT_DEFECT
        print("verified against trace reachability")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixleads",
        description="Verify ensures and leads-to properties of finite event systems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--max-states", type=int, default=None,
                       help="state space cap (default from FIXLEADS_MAX_STATES)")

    p_check = sub.add_parser("check", help="check every property in a file")
    p_check.add_argument("file")
    p_check.add_argument("--assume", choices=["mp", "wf"], default=None,
                         help="override each property's declared assumption")
    p_check.add_argument("--si", action="store_true",
                         help="restrict checks to reachable states")
    p_check.add_argument("--oracle", action="store_true",
                         help="cross-check verdicts against the trace oracle")
    p_check.add_argument("--json", action="store_true")
    common(p_check)
    p_check.set_defaults(fn=cmd_check)

    p_explain = sub.add_parser("explain", help="emit a derivation certificate")
    p_explain.add_argument("file")
    p_explain.add_argument("property")
    p_explain.add_argument("--out", default=None)
    common(p_explain)
    p_explain.set_defaults(fn=cmd_explain)

    p_cert = sub.add_parser("check-cert", help="re-validate an emitted certificate")
    p_cert.add_argument("file")
    p_cert.add_argument("cert")
    common(p_cert)
    p_cert.set_defaults(fn=cmd_check_cert)

    p_si = sub.add_parser("si", help="print the strongest invariant")
    p_si.add_argument("file")
    p_si.add_argument("--verify", action="store_true",
                      help="compare against trace reachability")
    p_si.add_argument("--json", action="store_true")
    common(p_si)
    p_si.set_defaults(fn=cmd_si)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SelfCheckDefect as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT


if __name__ == "__main__":
    sys.exit(main())
