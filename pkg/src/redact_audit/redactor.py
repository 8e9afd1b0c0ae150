"""LUT redaction: every combinational gate becomes a LUT keyed by config bits.

Single-input gates (NOT/BUF) are folded into the gates that consume them,
since a LUT here always has 2 to 4 inputs.  The correct key is returned next
to the redacted netlist; analysis code never looks at it.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .netlist import Netlist, NetlistError, Node, local_table

MIN_LUT_ARITY, MAX_LUT_ARITY = 2, 4


class RedactionError(NetlistError):
    pass


@dataclass(frozen=True)
class RedactionPolicy:
    scope: str | Sequence[str] = "all"  # "all" or a list of gate names
    absorb_single_input_gates: bool = True


@dataclass(frozen=True, eq=False)
class RedactedNetlist:
    """A netlist whose programmable nodes are LUTs over configuration-bit ids."""

    netlist: Netlist

    @cached_property
    def luts(self) -> dict[int, Node]:
        return self.netlist.luts

    @cached_property
    def occurrences(self) -> dict[int, list[tuple[int, int]]]:
        occ: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for nid in sorted(self.luts):
            for row, cid in enumerate(self.luts[nid].config):
                occ[cid].append((nid, row))
        return dict(occ)

    @property
    def key_space(self) -> frozenset[int]:
        return frozenset(self.occurrences)

    @property
    def compaction(self) -> dict[int, list[tuple[int, int]]]:
        """Shared config-bit ids and every (LUT, row) position they fill."""
        return {cid: occ for cid, occ in self.occurrences.items() if len(occ) > 1}

    def lut_histogram(self) -> dict[int, int]:
        hist = {2: 0, 3: 0, 4: 0}
        for node in self.luts.values():
            hist[node.arity] = hist.get(node.arity, 0) + 1
        return hist


# -- inverter absorption ------------------------------------------------------


def _single_input_polarity(node: Node) -> int | None:
    """0 for a buffer, 1 for an inverter, None if not a 1-input pass-through."""
    if node.arity != 1 or node.kind in ("DFF", "LUT"):
        return None
    table = local_table(node)
    if table == 0b10:
        return 0
    if table == 0b01:
        return 1
    raise RedactionError("constant single-input gate")


def _rewrite_table(table: int, pins: Sequence[tuple[int, int]]) -> tuple[tuple[int, ...], int]:
    """Fold inversions and duplicate fan-ins of one gate into its table.

    ``pins`` holds (source net, inverted) per original pin.  Returns the
    deduplicated source list and the table over it.
    """
    sources: list[int] = []
    for src, _ in pins:
        if src not in sources:
            sources.append(src)
    pos = {s: i for i, s in enumerate(sources)}
    new = 0
    for r in range(1 << len(sources)):
        row = 0
        for j, (src, inv) in enumerate(pins):
            row |= (((r >> pos[src]) & 1) ^ inv) << j
        new |= ((table >> row) & 1) << r
    return tuple(sources), new


def absorb_inverters(netlist: Netlist) -> Netlist:
    """Fold NOT/BUF gates into their combinational consumers.

    Consumers that absorb an inversion become TABLE nodes carrying their
    rewritten local table.  Pass-through gates driving a primary output or a
    flip-flop are kept (with their own input chain collapsed) and listed in
    ``meta["kept_inverters"]``.
    """
    nodes = dict(netlist.nodes)
    nm = netlist.names

    def resolve(x: int) -> tuple[int, int]:
        inv = 0
        seen = 0
        while x in nodes:
            pol = _single_input_polarity(nodes[x])
            if pol is None:
                break
            inv ^= pol
            x = nodes[x].fanins[0]
            seen += 1
            if seen > len(nodes):
                raise RedactionError("cycle of single-input gates")
        return x, inv

    changed = True
    while changed:
        changed = False
        for nid in sorted(nodes):
            node = nodes[nid]
            if node.kind == "DFF" or _single_input_polarity(node) is not None:
                continue
            pins = [resolve(f) for f in node.fanins]
            if all(src == f and inv == 0 for (src, inv), f in zip(pins, node.fanins)) and len(set(node.fanins)) == node.arity:
                continue
            if node.kind == "LUT":
                raise RedactionError(f"cannot fold inverters into LUT {nm[nid]!r}")
            sources, table = _rewrite_table(local_table(node), pins)
            if not sources:
                raise RedactionError(f"gate {nm[nid]!r} reduces to a constant")
            if len(sources) == 1 and table not in (0b01, 0b10):
                raise RedactionError(f"gate {nm[nid]!r} reduces to a constant")
            nodes[nid] = Node("TABLE", sources, table=table)
            changed = True

    # Which single-input gates are still needed: only sequential/PO sinks.
    needed: set[int] = set(netlist.outputs)
    for nid, node in nodes.items():
        if node.kind == "DFF":
            needed.update(node.fanins)
        elif _single_input_polarity(node) is None:
            needed.update(node.fanins)
    kept = []
    gates = []
    for nid in sorted(nodes):
        node = nodes[nid]
        pol = _single_input_polarity(node) if node.kind != "DFF" else None
        if pol is not None:
            if nid not in needed:
                continue
            src, inv = resolve(node.fanins[0])
            inv ^= pol
            node = Node("NOT" if inv else "BUF", (src,))
            kept.append(nm[nid])
        gates.append((nm[nid], Node(node.kind, tuple(nm[f] for f in node.fanins), node.table, node.config)))
    meta = dict(netlist.meta)
    meta["kept_inverters"] = tuple(kept)
    return Netlist.build([nm[i] for i in netlist.inputs], [nm[o] for o in netlist.outputs], gates, meta)


# -- redaction ------------------------------------------------------------------


def redact(netlist: Netlist, policy: RedactionPolicy = RedactionPolicy()) -> tuple[RedactedNetlist, dict[int, int]]:
    """Replace in-scope gates with LUTs; return the redacted netlist and correct key."""
    base = absorb_inverters(netlist) if policy.absorb_single_input_gates else netlist
    nm = base.names
    kept = set(base.meta.get("kept_inverters", ()))
    if policy.scope == "all":
        scope = [
            nid
            for nid in sorted(base.nodes)
            if base.nodes[nid].kind not in ("DFF", "LUT") and nm[nid] not in kept
        ]
    else:
        scope = []
        for name in policy.scope:
            if name not in base.ids or base.ids[name] not in base.nodes:
                raise RedactionError(f"scope node {name!r} not found")
            scope.append(base.ids[name])
        scope.sort()

    next_id = 1 + max((c for n in base.luts.values() for c in n.config), default=-1)
    nodes = dict(base.nodes)
    key: dict[int, int] = {}
    for nid in scope:
        node = nodes[nid]
        if node.kind in ("DFF", "LUT"):
            raise RedactionError(f"node {nm[nid]!r} is not a redactable gate")
        if not MIN_LUT_ARITY <= node.arity <= MAX_LUT_ARITY:
            raise RedactionError(f"gate {nm[nid]!r} has fan-in {node.arity}; LUTs take {MIN_LUT_ARITY}..{MAX_LUT_ARITY}")
        if len(set(node.fanins)) != node.arity:
            raise RedactionError(f"gate {nm[nid]!r} has repeated fan-ins")
        table = local_table(node)
        config = tuple(range(next_id, next_id + (1 << node.arity)))
        next_id += len(config)
        for row, cid in enumerate(config):
            key[cid] = (table >> row) & 1
        nodes[nid] = Node("LUT", node.fanins, config=config)
    meta = dict(base.meta)
    out = Netlist(base.names, base.inputs, base.outputs, nodes, base.floating, meta)
    return RedactedNetlist(out), key


def compact(redacted: RedactedNetlist, groups: Iterable[Iterable[int]]) -> RedactedNetlist:
    """Merge each group of config-bit ids into one shared id (the smallest)."""
    space = redacted.key_space
    rep: dict[int, int] = {}
    for group in groups:
        group = sorted(set(group))
        if len(group) < 2:
            raise RedactionError("compaction groups need at least 2 members")
        for cid in group:
            if cid not in space:
                raise RedactionError(f"unknown configuration bit k{cid}")
            if cid in rep:
                raise RedactionError(f"configuration bit k{cid} is in two groups")
            rep[cid] = group[0]
    if not rep:
        return redacted
    net = redacted.netlist
    nodes = dict(net.nodes)
    for nid, node in redacted.luts.items():
        nodes[nid] = Node("LUT", node.fanins, config=tuple(rep.get(c, c) for c in node.config))
    return RedactedNetlist(Netlist(net.names, net.inputs, net.outputs, nodes, net.floating, dict(net.meta)))


def random_groups(key_space: Iterable[int], rng: random.Random, n_groups: int, max_size: int = 3) -> list[set[int]]:
    """Seeded random disjoint compaction groups over ``key_space``."""
    pool = sorted(key_space)
    rng.shuffle(pool)
    groups = []
    for _ in range(n_groups):
        size = rng.randint(2, max_size)
        if len(pool) < size:
            break
        groups.append(set(pool[:size]))
        pool = pool[size:]
    return groups


def apply_key(redacted: RedactedNetlist, key: Mapping[int, int]) -> Netlist:
    """Fix every LUT's table from ``key``, yielding a plain evaluable netlist."""
    missing = sorted(redacted.key_space - set(key))
    if missing:
        shown = ", ".join(f"k{c}" for c in missing[:8])
        raise RedactionError(f"key is missing {len(missing)} bits ({shown}{', ...' if len(missing) > 8 else ''})")
    net = redacted.netlist
    nodes = dict(net.nodes)
    for nid, node in redacted.luts.items():
        table = sum((key[c] & 1) << r for r, c in enumerate(node.config))
        nodes[nid] = Node("TABLE", node.fanins, table=table)
    return Netlist(net.names, net.inputs, net.outputs, nodes, net.floating, dict(net.meta))
