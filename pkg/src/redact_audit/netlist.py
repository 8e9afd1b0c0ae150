"""Gate-level and LUT-level netlists: data model, simulation, cones, key points.

Every net gets a dense integer id.  Primary inputs and floating nets have no
driver entry in ``Netlist.nodes``; gates, flip-flops and LUTs do.  A DFF's id
is its output net, so DFF outputs act as pseudo-inputs for combinational
evaluation.

Truth tables use one global row convention: row ``r`` assigns
``inputs[j] = (r >> j) & 1``, i.e. ``inputs[0]`` is the least-significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce
from typing import Iterable, Mapping, Sequence

GATE_KINDS = ("AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF", "DFF")
# LUT: programmable, table given by config-bit ids.  TABLE: fixed local table.
EXTENDED_KINDS = GATE_KINDS + ("LUT", "TABLE")
MAX_GATE_FANIN = 4

PI, PO, FF, FLOATING = "PI", "PO", "FF", "FLOATING"


class NetlistError(ValueError):
    """Malformed netlist text or structure."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, net: str | None = None):
        self.net = net
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Node:
    kind: str
    fanins: tuple[int, ...]
    table: int | None = None  # TABLE only: local truth table over fanins
    config: tuple[int, ...] | None = None  # LUT only: config-bit id per row

    @property
    def arity(self) -> int:
        return len(self.fanins)

    @property
    def combinational(self) -> bool:
        return self.kind != "DFF"


@dataclass(frozen=True)
class TruthTable:
    """Functionality of a single-output cone over an ordered input list."""

    inputs: tuple[int, ...]
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (1 << len(self.inputs)):
            raise ValueError("truth table bits exceed 2^n rows")

    @property
    def n(self) -> int:
        return len(self.inputs)

    def __getitem__(self, row: int) -> int:
        return (self.bits >> row) & 1

    def bitstring(self) -> str:
        """Row values in row order r = 0, 1, ..."""
        return "".join(str(self[r]) for r in range(1 << self.n))

    def hex(self) -> str:
        """Hex of the integer whose bit r is row r."""
        width = max(1, (1 << self.n) // 4)
        return format(self.bits, f"0{width}x")


@lru_cache(maxsize=64)
def row_masks(n: int) -> tuple[int, ...]:
    """Bit-parallel projection masks: bit r of masks[j] is bit j of r."""
    rows = 1 << n
    masks = []
    for j in range(n):
        block = (1 << (1 << j)) - 1  # 2^j ones
        unit = block << (1 << j)  # 2^j zeros then 2^j ones
        period = 1 << (j + 1)
        m = 0
        for start in range(0, rows, period):
            m |= unit << start
        masks.append(m)
    return tuple(masks)


def gate_table(kind: str, k: int) -> int:
    """Local truth table of a standard gate with ``k`` inputs."""
    rows = 1 << k
    bits = 0
    for r in range(rows):
        ones = bin(r).count("1")
        if kind in ("AND", "NAND"):
            v = ones == k
        elif kind in ("OR", "NOR"):
            v = ones > 0
        elif kind in ("XOR", "XNOR"):
            v = ones % 2 == 1
        elif kind == "BUF":
            v = r == 1
        elif kind == "NOT":
            v = r == 0
        else:
            raise ValueError(f"no fixed table for {kind}")
        if kind in ("NAND", "NOR", "XNOR"):
            v = not v
        bits |= int(v) << r
    return bits


def local_table(node: Node) -> int:
    if node.kind == "TABLE":
        return node.table
    if node.kind in ("LUT", "DFF"):
        raise ValueError(f"{node.kind} node has no fixed local table")
    return gate_table(node.kind, node.arity)


@dataclass(frozen=True, eq=False)
class Netlist:
    names: tuple[str, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    nodes: Mapping[int, Node]
    floating: frozenset[int] = frozenset()
    meta: Mapping[str, object] = field(default_factory=dict)

    # -- construction -------------------------------------------------------

    @classmethod
    def build(
        cls,
        inputs: Sequence[str],
        outputs: Sequence[str],
        gates: Mapping[str, Node] | Iterable[tuple[str, Node]],
        meta: Mapping[str, object] | None = None,
    ) -> "Netlist":
        """Assemble a netlist from names.

        ``gates`` maps output name to a Node whose ``fanins`` hold *names*
        (strings) rather than ids.  Ids are assigned in order of first
        appearance: inputs, then gate outputs and their fan-ins, then outputs.
        Undriven, undeclared nets become floating.
        """
        items = list(gates.items()) if isinstance(gates, Mapping) else list(gates)
        ids: dict[str, int] = {}

        def intern(name: str) -> int:
            if name not in ids:
                ids[name] = len(ids)
            return ids[name]

        for name in inputs:
            if name in ids:
                raise NetlistError(f"duplicate definition of net {name!r}")
            intern(name)
        nodes: dict[int, Node] = {}
        for name, node in items:
            nid = intern(name)
            if nid in nodes or name in inputs:
                raise NetlistError(f"duplicate definition of net {name!r}")
            fanins = tuple(intern(f) for f in node.fanins)
            nodes[nid] = Node(node.kind, fanins, node.table, node.config)
        out_ids = tuple(intern(o) for o in outputs)
        in_ids = tuple(ids[i] for i in inputs)
        names = tuple(sorted(ids, key=ids.__getitem__))
        driven = set(in_ids) | set(nodes)
        floating = frozenset(i for i in range(len(names)) if i not in driven)
        net = cls(names, in_ids, out_ids, nodes, floating, dict(meta or {}))
        net.validate()
        return net

    def validate(self) -> None:
        for nid, node in self.nodes.items():
            name = self.names[nid]
            if node.kind not in EXTENDED_KINDS:
                raise NetlistError(f"unknown gate kind {node.kind!r} at {name!r}")
            if node.kind in ("NOT", "BUF", "DFF") and node.arity != 1:
                raise NetlistError(f"{node.kind} {name!r} must have exactly 1 fan-in, got {node.arity}")
            if node.kind in GATE_KINDS and not 1 <= node.arity <= MAX_GATE_FANIN:
                raise NetlistError(f"gate {name!r} has fan-in {node.arity}, allowed 1..{MAX_GATE_FANIN}")
            if node.kind == "LUT" and (node.config is None or len(node.config) != 1 << node.arity):
                raise NetlistError(f"LUT {name!r} needs 2^k configuration bits")
            if node.kind == "TABLE" and (node.table is None or node.table >> (1 << node.arity)):
                raise NetlistError(f"TABLE {name!r} has a malformed table")
        self.comb_order  # raises on combinational cycles

    # -- lookups ------------------------------------------------------------

    @cached_property
    def ids(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def id_of(self, name: str) -> int:
        try:
            return self.ids[name]
        except KeyError:
            raise KeyError(f"no net named {name!r}") from None

    @cached_property
    def dffs(self) -> tuple[int, ...]:
        return tuple(sorted(i for i, n in self.nodes.items() if n.kind == "DFF"))

    @cached_property
    def pseudo_inputs(self) -> frozenset[int]:
        """Nets combinational evaluation treats as free: PIs, floating, DFF outputs."""
        return frozenset(self.inputs) | self.floating | frozenset(self.dffs)

    def is_cut_point(self, nid: int) -> bool:
        return nid in self.pseudo_inputs

    @cached_property
    def fanouts(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {i: [] for i in range(len(self.names))}
        for nid in sorted(self.nodes):
            for f in self.nodes[nid].fanins:
                out[f].append(nid)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def comb_order(self) -> tuple[int, ...]:
        """Combinational nodes in a deterministic topological order."""
        order: list[int] = []
        state: dict[int, int] = {}  # 1 = on stack, 2 = done
        for start in sorted(self.nodes):
            if self.nodes[start].kind == "DFF" or state.get(start) == 2:
                continue
            stack = [(start, 0)]
            state[start] = 1
            while stack:
                nid, pos = stack[-1]
                fanins = self.nodes[nid].fanins
                if pos < len(fanins):
                    stack[-1] = (nid, pos + 1)
                    f = fanins[pos]
                    node = self.nodes.get(f)
                    if node is None or node.kind == "DFF":
                        continue
                    s = state.get(f)
                    if s == 1:
                        raise NetlistError(f"combinational cycle through {self.names[f]!r}", net=self.names[f])
                    if s is None:
                        state[f] = 1
                        stack.append((f, 0))
                else:
                    stack.pop()
                    state[nid] = 2
                    order.append(nid)
        return tuple(order)

    @property
    def luts(self) -> dict[int, Node]:
        return {i: n for i, n in self.nodes.items() if n.kind == "LUT"}

    # -- equality -----------------------------------------------------------

    def canonical(self):
        """Name-keyed structural form; two netlists are equal iff these match."""
        nm = self.names
        gates = {
            nm[i]: (n.kind, tuple(nm[f] for f in n.fanins), n.table, n.config)
            for i, n in self.nodes.items()
        }
        return (
            tuple(nm[i] for i in self.inputs),
            tuple(nm[i] for i in self.outputs),
            gates,
            frozenset(nm[i] for i in self.floating),
        )

    def __eq__(self, other):
        if not isinstance(other, Netlist):
            return NotImplemented
        return self.canonical() == other.canonical()

    __hash__ = None

    def __repr__(self):
        return (
            f"Netlist({len(self.inputs)} PI, {len(self.outputs)} PO, "
            f"{len(self.nodes)} nodes, {len(self.floating)} floating)"
        )

    def renamed(self, mapping: Mapping[str, str]) -> "Netlist":
        """Copy with nets renamed; names missing from ``mapping`` are kept."""
        names = tuple(mapping.get(n, n) for n in self.names)
        if len(set(names)) != len(names):
            raise NetlistError("renaming produces duplicate net names")
        return Netlist(names, self.inputs, self.outputs, dict(self.nodes), self.floating, dict(self.meta))


# -- simulation -------------------------------------------------------------


def _eval_gate(node: Node, vals: Sequence[int]) -> int:
    kind = node.kind
    if kind == "AND":
        return int(all(vals))
    if kind == "NAND":
        return int(not all(vals))
    if kind == "OR":
        return int(any(vals))
    if kind == "NOR":
        return int(not any(vals))
    if kind == "XOR":
        return sum(vals) & 1
    if kind == "XNOR":
        return 1 - (sum(vals) & 1)
    if kind == "BUF":
        return vals[0]
    if kind == "NOT":
        return 1 - vals[0]
    if kind == "TABLE":
        row = sum(v << j for j, v in enumerate(vals))
        return (node.table >> row) & 1
    raise NetlistError(f"cannot evaluate {kind} node without a key")


def simulate(netlist: Netlist, assignment: Mapping[int, int]) -> dict[int, int]:
    """Evaluate every net under one assignment of the pseudo-inputs."""
    missing = [netlist.names[i] for i in sorted(netlist.pseudo_inputs) if i not in assignment]
    if missing:
        raise NetlistError(f"missing assignment for {', '.join(missing)}")
    values = {i: assignment[i] & 1 for i in netlist.pseudo_inputs}
    for nid in netlist.comb_order:
        node = netlist.nodes[nid]
        values[nid] = _eval_gate(node, [values[f] for f in node.fanins])
    return values


# -- cones ------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    """Transitive combinational fan-in of ``root``, cut at pseudo-inputs."""

    netlist: Netlist
    root: int
    nodes: tuple[int, ...]  # combinational nodes, topological (fan-ins first)
    support: tuple[int, ...]  # cut points in first-visit order

    @property
    def luts(self) -> tuple[int, ...]:
        return tuple(n for n in self.nodes if self.netlist.nodes[n].kind == "LUT")

    def subnetlist(self) -> Netlist:
        nm = self.netlist.names
        gates = []
        for nid in self.nodes:
            node = self.netlist.nodes[nid]
            gates.append((nm[nid], Node(node.kind, tuple(nm[f] for f in node.fanins), node.table, node.config)))
        return Netlist.build([nm[s] for s in self.support], [nm[self.root]], gates)


def cone_of(netlist: Netlist, node: int, reverse: bool = False) -> Cone:
    """Extract the fan-in cone of ``node``.

    ``reverse`` visits fan-ins right-to-left; it only changes the support
    order, never the cone's functionality.
    """
    if node >= len(netlist.names) or node < 0:
        raise NetlistError(f"unknown node id {node}")
    if netlist.is_cut_point(node):
        return Cone(netlist, node, (), (node,))
    support: list[int] = []
    seen: set[int] = {node}
    order: list[int] = []
    stack = [(node, 0)]
    while stack:
        nid, pos = stack[-1]
        fanins = netlist.nodes[nid].fanins
        if reverse:
            fanins = fanins[::-1]
        if pos < len(fanins):
            stack[-1] = (nid, pos + 1)
            f = fanins[pos]
            if f in seen:
                continue
            seen.add(f)
            if netlist.is_cut_point(f):
                support.append(f)
            else:
                stack.append((f, 0))
        else:
            stack.pop()
            order.append(nid)
    return Cone(netlist, node, tuple(order), tuple(support))


def eval_bitparallel(node: Node, ins: Sequence[int], full: int) -> int:
    """Evaluate ``node`` on packed rows; ``full`` is the all-rows mask."""
    kind = node.kind
    if kind in ("AND", "NAND"):
        v = reduce(lambda x, y: x & y, ins)
    elif kind in ("OR", "NOR"):
        v = reduce(lambda x, y: x | y, ins)
    elif kind in ("XOR", "XNOR"):
        v = reduce(lambda x, y: x ^ y, ins)
    elif kind == "BUF":
        v = ins[0]
    elif kind == "NOT":
        v = full ^ ins[0]
    elif kind == "TABLE":
        return table_bitparallel(node.table, ins, full)
    else:
        raise NetlistError(f"cannot evaluate {kind} node without a key")
    if kind in ("NAND", "NOR", "XNOR"):
        v ^= full
    return v


def table_bitparallel(table: int, ins: Sequence[int], full: int) -> int:
    """Packed evaluation of a local table by Shannon expansion on its inputs."""
    level = [full if (table >> r) & 1 else 0 for r in range(1 << len(ins))]
    for x in ins:
        nx = full ^ x
        nxt = []
        for lo, hi in zip(level[0::2], level[1::2]):
            if lo == hi:
                nxt.append(lo)
            else:
                nxt.append((x & hi) | (nx & lo))
        level = nxt
    return level[0]


DEFAULT_MAX_SUPPORT = 20


def truth_table(cone: Cone, inputs: Sequence[int] | None = None, max_support: int = DEFAULT_MAX_SUPPORT) -> TruthTable:
    """Exhaustive functionality of ``cone`` over ``inputs`` (default: its support)."""
    inputs = tuple(cone.support if inputs is None else inputs)
    if sorted(inputs) != sorted(cone.support):
        raise ValueError("inputs must be a permutation of the cone support")
    if len(inputs) > max_support:
        raise ValueError(f"support of {len(inputs)} exceeds limit {max_support}")
    full = (1 << (1 << len(inputs))) - 1
    values = dict(zip(inputs, row_masks(len(inputs))))
    net = cone.netlist
    for nid in cone.nodes:
        node = net.nodes[nid]
        values[nid] = eval_bitparallel(node, [values[f] for f in node.fanins], full)
    return TruthTable(inputs, values[cone.root])


# -- key points ---------------------------------------------------------------


def key_points(netlist: Netlist) -> set[tuple[int, str]]:
    """Flip-flops, primary inputs, primary outputs and floating nets."""
    kps = {(i, FF) for i in netlist.dffs}
    kps |= {(i, PI) for i in netlist.inputs}
    kps |= {(i, PO) for i in netlist.outputs}
    kps |= {(i, FLOATING) for i in netlist.floating}
    return kps
