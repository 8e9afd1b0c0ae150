"""redact-audit command line: formula, redact, count, match."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .bench import read_netlist, serialize_bench, serialize_key
from .funcspace import CapExceeded, ConeShape, LutCone, MethodMismatch, analyze_cone, b_constants, formula_report
from .funcspace.dd import DD_MAX_SUPPORT, DEFAULT_DD_MAX_KEY_BITS
from .funcspace.oracle import DEFAULT_MAX_KEY_BITS, MAX_ORACLE_SUPPORT
from .matcher import DEFAULT_ROUNDS, DEFAULT_THRESHOLD, MAPPED, LibraryIndex, match_against_library
from .netlist import NetlistError
from .redactor import RedactedNetlist, RedactionPolicy, compact, random_groups, redact

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NO_MATCH, EXIT_CAP, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5
ENV_MAX_KEY_BITS = "REDACT_AUDIT_MAX_KEY_BITS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _err(msg: str) -> None:
    print(f"redact-audit: {msg}", file=sys.stderr)


def _load(path: str):
    try:
        return read_netlist(path)
    except NetlistError as exc:
        raise NetlistError(f"{path}: {exc}") from exc


# -- formula ---------------------------------------------------------------------


def cmd_formula(args) -> int:
    try:
        shape = ConeShape(args.a2, args.a3, args.a4)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = formula_report(shape)
    report["b_constants"] = b_constants()
    if args.json:
        _emit(report)
        return EXIT_OK
    print(f"shape         a2={shape.a2} a3={shape.a3} a4={shape.a4}  (support {shape.support_bits}, key bits {shape.key_bits})")
    for name in ("F_I", "F_K", "F_R"):
        print(f"{name:<13} {report[name]}  (log2 {report['log2'][name]})")
    if "F_R_with_printed_b" in report:
        print(f"F_R (printed b_4) {report['F_R_with_printed_b']}")
    for i, row in report["b_constants"].items():
        flag = "" if row["delta_vs_printed"] == 0 else f"  delta {row['delta_vs_printed']:+d} vs printed {row['printed']}"
        print(f"b_{i:<11} {row['inclusion_exclusion']}{flag}")
    return EXIT_OK


# -- redact ------------------------------------------------------------------------


def _read_groups(path: str) -> list[list[int]]:
    groups = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").split()
        if not line:
            continue
        try:
            groups.append([int(tok[1:]) if tok[:1] in "kK" else int(tok) for tok in line])
        except ValueError:
            raise NetlistError(f"{path}: bad compaction group {raw.strip()!r}", lineno, 1) from None
    return groups


def cmd_redact(args) -> int:
    if args.json and not args.out:
        raise UsageError("--json needs --out for the LUT netlist")
    net = _load(args.input)
    scope = "all" if args.scope == "all" else [s for s in args.scope.split(",") if s]
    red, key = redact(net, RedactionPolicy(scope=scope, absorb_single_input_gates=not args.no_absorb))
    groups = []
    if args.compaction:
        groups += _read_groups(args.compaction)
    if args.random_groups:
        taken = {c for g in groups for c in g}
        groups += random_groups(red.key_space - taken, random.Random(args.seed), args.random_groups)
    before = len(red.key_space)
    if groups:
        red = compact(red, groups)
        # the shared bit takes its representative's correct value
        key = {c: key[c] for c in red.key_space}
    text = serialize_bench(red.netlist)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.key:
        Path(args.key).write_text(serialize_key(key))
    summary = {
        "input": args.input,
        "luts": len(red.luts),
        "key_bits": len(red.key_space),
        "key_bits_before_compaction": before,
        "lut_histogram": {str(k): v for k, v in red.lut_histogram().items()},
        "shared_bits": len(red.compaction),
        "kept_inverters": list(red.netlist.meta.get("kept_inverters", ())),
    }
    if args.json:
        _emit(summary)
    else:
        hist = ", ".join(f"LUT{k}: {v}" for k, v in summary["lut_histogram"].items())
        out = sys.stdout if args.out else sys.stderr
        print(f"K = {summary['key_bits']}  ({summary['luts']} LUTs; {hist})", file=out)
    return EXIT_OK


# -- count ---------------------------------------------------------------------------


def _key_bit_cap(args, default: int) -> int:
    if args.max_key_bits is not None:
        return args.max_key_bits
    env = os.environ.get(ENV_MAX_KEY_BITS)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{ENV_MAX_KEY_BITS} must be an integer, got {env!r}") from None
        if value <= 0:
            raise UsageError(f"{ENV_MAX_KEY_BITS} must be positive")
        return value
    return default


def cmd_count(args) -> int:
    net = _load(args.input)
    red = RedactedNetlist(net)
    names = net.names
    if args.po:
        roots = []
        for po in args.po:
            if po not in net.ids:
                raise NetlistError(f"unknown PO {po!r}")
            roots.append(net.ids[po])
    else:
        roots = list(net.outputs)
    dd_cap = _key_bit_cap(args, DEFAULT_DD_MAX_KEY_BITS)
    or_cap = _key_bit_cap(args, DEFAULT_MAX_KEY_BITS)
    caps_hit = False
    cones = []
    for root in roots:
        cone = LutCone.from_netlist(red, root)
        limit = max(dd_cap, or_cap) if args.method == "both" else (dd_cap if args.method == "dd" else or_cap)
        hard = DD_MAX_SUPPORT if args.method == "dd" else MAX_ORACLE_SUPPORT
        support_cap = min(args.max_support or hard, hard)
        try:
            if cone.n > support_cap:
                raise CapExceeded(f"cone has {cone.n} support bits, limit is {support_cap}")
            if args.method == "both" and cone.key_bits > min(dd_cap, or_cap):
                raise CapExceeded(f"cone has {cone.key_bits} key bits, limit is {min(dd_cap, or_cap)}")
            cones.append(analyze_cone(cone, args.method, max_key_bits=limit, list_functions=args.list))
        except CapExceeded as exc:
            caps_hit = True
            other = "oracle" if args.method == "dd" else "dd"
            hint = f"try --method {other} or raise --max-key-bits / --max-support"
            _err(f"cone {names[root]!r}: {exc}; {hint}")
            cones.append({"cone": names[root], "error": f"cap exceeded: {exc}"})
    if args.json:
        _emit({"input": args.input, "method": args.method, "cones": cones})
    else:
        print(f"{'cone':<16} {'n':>3} {'K':>4} {'tree':>5} {'valid':>14} {'functions':>12}  F_R")
        for r in cones:
            if "error" in r:
                print(f"{r['cone']:<16} {r['error']}")
                continue
            tree = r["tree"]
            is_tree = "-" if tree is None else ("yes" if tree["is_tree"] else tree["reason"])
            fr = tree["F_R"] if tree and tree["is_tree"] else ""
            print(f"{r['cone']:<16} {r['support_bits']:>3} {r['key_bits']:>4} {is_tree:>5} "
                  f"{r['valid_bitstreams']:>14} {r['distinct_functionalities']:>12}  {fr}")
            for t in r.get("functionalities", ()):
                print(f"    {t}")
    return EXIT_CAP if caps_hit else EXIT_OK


# -- match ----------------------------------------------------------------------------


def _plot(path: str, target: str, verdicts, threshold: float) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(3.0, 0.8 * len(verdicts) + 1.5), 3.0))
    names = [v.design_name for v in verdicts]
    fracs = [v.mapped_fraction for v in verdicts]
    colors = ["tab:green" if v.verdict == MAPPED else "tab:gray" for v in verdicts]
    ax.bar(names, fracs, color=colors)
    ax.axhline(threshold, color="tab:red", lw=1, ls="--")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("mapped fraction")
    ax.set_title(Path(target).name, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if path.endswith(".png") else None)
    plt.close(fig)


def cmd_match(args) -> int:
    if not 0 < args.threshold <= 1:
        raise UsageError("--threshold must be in (0, 1]")
    if args.rounds < 0:
        raise UsageError("--rounds must be >= 0")
    target = _load(args.target)
    if not Path(args.library).is_dir():
        raise NetlistError(f"library {args.library!r} is not a directory")
    lib = LibraryIndex.from_dir(args.library, rounds=args.rounds)
    for name, msg in lib.errors:
        _err(f"skipping library entry {name}: {msg}")
    if not len(lib):
        raise NetlistError(f"library {args.library!r} has no readable designs")
    verdicts = match_against_library(target, lib, args.threshold)
    report = {
        "target": args.target,
        "threshold": args.threshold,
        "rounds": args.rounds,
        "results": [v.as_dict() for v in verdicts],
    }
    if lib.errors:
        report["skipped"] = [{"file": n, "error": m} for n, m in lib.errors]
    if args.plot:
        _plot(args.plot, args.target, verdicts, args.threshold)
    if args.json:
        _emit(report)
    else:
        print(f"{'library design':<20} {'key points':>10} {'mapped':>7} {'fraction':>9}  verdict")
        for v in verdicts:
            print(f"{v.design_name:<20} {v.key_points_library:>10} {v.key_points_mapped:>7} "
                  f"{v.mapped_fraction:>9.3f}  {v.verdict}")
    return EXIT_OK if any(v.verdict == MAPPED for v in verdicts) else EXIT_NO_MATCH


# -- entry point ------------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="redact-audit", description="LUT redaction auditing: functionality counts and library matching.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("formula", help="closed-form F_I, F_K, F_R for a tree shape")
    f.add_argument("--a2", type=int, default=0, help="number of 2-input LUTs")
    f.add_argument("--a3", type=int, default=0, help="number of 3-input LUTs")
    f.add_argument("--a4", type=int, default=0, help="number of 4-input LUTs")
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_formula)

    r = sub.add_parser("redact", help="replace gates with LUTs, write LUT netlist and key")
    r.add_argument("input")
    r.add_argument("--out", help="LUT netlist path (stdout if omitted)")
    r.add_argument("--key", help="correct-key output path")
    r.add_argument("--scope", default="all", help="'all' or comma-separated gate names")
    r.add_argument("--no-absorb", action="store_true", help="keep NOT/BUF gates instead of folding them into LUTs")
    r.add_argument("--compaction", help="file of config-bit groups to share, one group per line")
    r.add_argument("--random-groups", type=int, default=0, metavar="N", help="add N seeded random compaction groups")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_redact)

    c = sub.add_parser("count", help="distinct functionalities of each PO cone")
    c.add_argument("input")
    c.add_argument("--method", choices=("dd", "oracle", "both"), default="dd")
    c.add_argument("--po", action="append", help="restrict to this output (repeatable)")
    c.add_argument("--max-key-bits", type=_positive)
    c.add_argument("--max-support", type=_positive, help="lower the support-size limit")
    c.add_argument("--list", action="store_true", help="list every truth table (hex, row 0 = LSB)")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_count)

    m = sub.add_parser("match", help="match a target netlist against a library directory")
    m.add_argument("target")
    m.add_argument("--library", required=True)
    m.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    m.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    m.add_argument("--plot", help="write a bar chart of mapped fractions to this file")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_match)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except CapExceeded as exc:
        _err(str(exc))
        return EXIT_CAP
    except (NetlistError, OSError, UnicodeDecodeError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    except MethodMismatch as exc:
        _err(f"internal consistency failure: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
