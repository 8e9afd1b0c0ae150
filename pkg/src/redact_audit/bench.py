"""Reader and writer for the bench netlist format and its LUT extension.

Gate lines::

    INPUT(a)
    OUTPUT(c)
    c = AND(a, b)
    q = DFF(c)

LUT lines carry configuration-bit identifiers after a semicolon; reusing an
identifier expresses bitstream compaction.  Literal 0/1 entries instead of
identifiers describe a fixed table (what a LUT becomes once keyed)::

    c = LUT2(a, b ; k0,k1,k2,k3)
    d = LUT2(a, b ; 0,1,1,0)
"""

from __future__ import annotations

import re
from typing import Mapping

from .netlist import GATE_KINDS, MAX_GATE_FANIN, Netlist, NetlistError, Node

NAME = r"[A-Za-z_][A-Za-z0-9_.\[\]]*"
_NAME_RE = re.compile(rf"^{NAME}$")
_IO_RE = re.compile(rf"^(INPUT|OUTPUT)\s*\(\s*({NAME})\s*\)$", re.IGNORECASE)
_GATE_RE = re.compile(rf"^({NAME})\s*=\s*([A-Za-z]+[0-9]*)\s*\((.*)\)$")
_LUT_KIND_RE = re.compile(r"^LUT([0-9]+)$", re.IGNORECASE)
_CONFIG_RE = re.compile(r"^k([0-9]+)$")
_KEY_LINE_RE = re.compile(r"^k([0-9]+)\s*=\s*([01])$")


def _col(raw: str, token: str) -> int:
    pos = raw.find(token) if token else -1
    if pos < 0:
        pos = len(raw) - len(raw.lstrip())
    return pos + 1


def parse_bench(text: str) -> Netlist:
    """Parse bench (or LUT-bench) text into a validated Netlist."""
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[tuple[str, Node]] = []
    defined: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _IO_RE.match(line)
        if m:
            keyword, name = m.group(1).upper(), m.group(2)
            if keyword == "INPUT":
                if name in defined:
                    raise NetlistError(f"duplicate definition of net {name!r}", lineno, _col(raw, name))
                defined[name] = lineno
                inputs.append(name)
            else:
                if name in outputs:
                    raise NetlistError(f"duplicate OUTPUT {name!r}", lineno, _col(raw, name))
                outputs.append(name)
            continue
        m = _GATE_RE.match(line)
        if not m:
            raise NetlistError(f"syntax error: {line!r}", lineno, _col(raw, ""))
        name, kind, args = m.group(1), m.group(2).upper(), m.group(3)
        if name in defined:
            raise NetlistError(f"duplicate definition of net {name!r}", lineno, _col(raw, name))
        defined[name] = lineno
        gates.append((name, _parse_gate(kind, args, raw, lineno)))

    try:
        return Netlist.build(inputs, outputs, gates)
    except NetlistError as exc:
        if exc.net in defined:
            raise NetlistError(str(exc), defined[exc.net], 1) from None
        raise


def _parse_names(args: str, raw: str, lineno: int) -> tuple[str, ...]:
    names = tuple(a.strip() for a in args.split(","))
    for a in names:
        if not _NAME_RE.match(a):
            raise NetlistError(f"bad net name {a!r}", lineno, _col(raw, a) if a else _col(raw, ""))
    return names


def _parse_gate(kind: str, args: str, raw: str, lineno: int) -> Node:
    lut = _LUT_KIND_RE.match(kind)
    if lut:
        k = int(lut.group(1))
        if ";" not in args:
            raise NetlistError(f"LUT{k} needs '; <config bits>'", lineno, _col(raw, args))
        ins_text, bits_text = args.split(";", 1)
        fanins = _parse_names(ins_text, raw, lineno) if ins_text.strip() else ()
        bits = [b.strip() for b in bits_text.split(",")]
        if len(fanins) != k:
            raise NetlistError(f"LUT{k} has {len(fanins)} inputs", lineno, _col(raw, ins_text))
        if len(bits) != 1 << k:
            raise NetlistError(f"LUT{k} needs {1 << k} configuration entries, got {len(bits)}", lineno, _col(raw, bits_text))
        if len(set(fanins)) != k:
            raise NetlistError("LUT inputs must be distinct", lineno, _col(raw, ins_text))
        if all(b in ("0", "1") for b in bits):
            table = sum(int(b) << r for r, b in enumerate(bits))
            return Node("TABLE", fanins, table=table)
        config = []
        for b in bits:
            cm = _CONFIG_RE.match(b)
            if not cm:
                raise NetlistError(f"bad configuration-bit identifier {b!r}", lineno, _col(raw, b))
            config.append(int(cm.group(1)))
        return Node("LUT", fanins, config=tuple(config))

    if kind not in GATE_KINDS:
        raise NetlistError(f"unknown gate kind {kind!r}", lineno, _col(raw, kind))
    fanins = _parse_names(args, raw, lineno)
    if kind in ("NOT", "BUF", "DFF") and len(fanins) != 1:
        raise NetlistError(f"{kind} must have exactly 1 fan-in, got {len(fanins)}", lineno, _col(raw, args))
    if len(fanins) > MAX_GATE_FANIN:
        name = raw.split("=", 1)[0].strip()
        raise NetlistError(f"gate {name!r} has fan-in {len(fanins)}, maximum is {MAX_GATE_FANIN}", lineno, _col(raw, args))
    return Node(kind, fanins)


def _gate_line(netlist: Netlist, nid: int) -> str:
    nm = netlist.names
    node = netlist.nodes[nid]
    ins = ", ".join(nm[f] for f in node.fanins)
    if node.kind == "LUT":
        bits = ",".join(f"k{c}" for c in node.config)
        return f"{nm[nid]} = LUT{node.arity}({ins} ; {bits})"
    if node.kind == "TABLE":
        bits = ",".join(str((node.table >> r) & 1) for r in range(1 << node.arity))
        return f"{nm[nid]} = LUT{node.arity}({ins} ; {bits})"
    return f"{nm[nid]} = {node.kind}({ins})"


def serialize_bench(netlist: Netlist) -> str:
    nm = netlist.names
    lines = []
    if netlist.floating:
        lines.append("# floating: " + ", ".join(nm[i] for i in sorted(netlist.floating)))
    lines += [f"INPUT({nm[i]})" for i in netlist.inputs]
    lines += [f"OUTPUT({nm[i]})" for i in netlist.outputs]
    lines += [_gate_line(netlist, nid) for nid in sorted(netlist.nodes)]
    return "\n".join(lines) + "\n"


def parse_key(text: str) -> dict[int, int]:
    key: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KEY_LINE_RE.match(line)
        if not m:
            raise NetlistError(f"bad key line {line!r}", lineno, 1)
        cid = int(m.group(1))
        if cid in key:
            raise NetlistError(f"duplicate key bit k{cid}", lineno, 1)
        key[cid] = int(m.group(2))
    return key


def serialize_key(key: Mapping[int, int]) -> str:
    return "".join(f"k{cid}={key[cid]}\n" for cid in sorted(key))


def read_netlist(path) -> Netlist:
    with open(path) as fh:
        return parse_bench(fh.read())
