"""Builders for small redacted cones: explicit trees and seeded random DAGs."""

from __future__ import annotations

import random
from typing import Sequence, Union

from ..netlist import Netlist, Node
from ..redactor import RedactedNetlist, compact, random_groups
from .cone import LutCone

# A tree is a LUT given as the list of its children; a leaf is None.
Tree = Union[None, Sequence["Tree"]]

CHAIN2: Tree = [[None, None], None]
CHAIN3: Tree = [[[None, None], None], None]
BALANCED4: Tree = [[[None, None], [None, None]], None]
LUT2X2_LUT3: Tree = [[None, None], [None, None], None]


def tree_netlist(tree: Tree, output: str = "out") -> RedactedNetlist:
    """Redacted netlist of a LUT tree over fresh distinct leaves."""
    if tree is None:
        raise ValueError("a tree needs at least one LUT")
    inputs: list[str] = []
    gates: list[tuple[str, Node]] = []
    next_bit = [0]

    def build(t, name: str | None) -> str:
        if t is None:
            leaf = f"x{len(inputs)}"
            inputs.append(leaf)
            return leaf
        ins = tuple(build(child, None) for child in t)
        name = name or f"l{len(gates)}"
        k = len(ins)
        config = tuple(range(next_bit[0], next_bit[0] + (1 << k)))
        next_bit[0] += 1 << k
        gates.append((name, Node("LUT", ins, config=config)))
        return name

    build(tree, output)
    return RedactedNetlist(Netlist.build(inputs, [output], gates))


def tree_cone(tree: Tree) -> LutCone:
    return LutCone.from_netlist(tree_netlist(tree), "out")


def random_tree(rng: random.Random, max_luts: int = 4, max_key_bits: int = 16) -> Tree:
    """Random LUT tree with arities 2..4 within the LUT and key-bit budgets."""
    n_luts = rng.randint(1, max(1, min(max_luts, max_key_bits // 4)))
    arities = _arities_within(rng, n_luts, max_key_bits)
    # Grow by replacing a random leaf of the current tree with a new LUT.
    tree: list = [None] * arities[0]
    holes = [(tree, i) for i in range(arities[0])]
    for k in arities[1:]:
        parent, i = holes.pop(rng.randrange(len(holes)))
        child: list = [None] * k
        parent[i] = child
        holes += [(child, j) for j in range(k)]
    return tree


def _arities_within(rng: random.Random, n_luts: int, max_key_bits: int) -> list[int]:
    """Arities 2..4 for ``n_luts`` LUTs whose config bits fit the budget."""
    arities = []
    budget = max_key_bits
    for left in range(n_luts - 1, -1, -1):
        choices = [k for k in (2, 3, 4) if (1 << k) + 4 * left <= budget]
        k = rng.choice(choices)
        arities.append(k)
        budget -= 1 << k
    rng.shuffle(arities)
    return arities


def random_cone_netlist(
    rng: random.Random,
    max_luts: int = 5,
    max_key_bits: int = 20,
    compaction: bool = False,
    reuse: float = 0.35,
) -> RedactedNetlist:
    """Random single-output LUT cone; may have fanout and reconvergence.

    LUTs are generated in topological order, each preferring still-unconsumed
    earlier LUT outputs, so the last LUT (the output) usually reaches all of
    them.  LUTs it does not reach are dropped.  With ``compaction`` a few
    random groups of config bits are merged.
    """
    n_luts = rng.randint(1, max(1, min(max_luts, max_key_bits // 4)))
    arities = _arities_within(rng, n_luts, max_key_bits)
    leaves: list[str] = []
    luts: list[str] = []
    unconsumed: list[str] = []
    gates = []
    bit = 0
    for idx, k in enumerate(arities):
        ins: list[str] = []
        pending = list(unconsumed)
        rng.shuffle(pending)
        while len(ins) < k:
            if pending and rng.random() < 0.8:
                src = pending.pop()
            elif (luts or leaves) and rng.random() < reuse:
                src = rng.choice(luts + leaves)
            else:
                src = f"x{len(leaves)}"
                leaves.append(src)
            if src not in ins:
                ins.append(src)
        for s in ins:
            if s in unconsumed:
                unconsumed.remove(s)
        name = "out" if idx == n_luts - 1 else f"l{idx}"
        gates.append((name, Node("LUT", tuple(ins), config=tuple(range(bit, bit + (1 << k))))))
        bit += 1 << k
        luts.append(name)
        unconsumed.append(name)
    net = RedactedNetlist(Netlist.build(leaves, ["out"], gates))
    cone = LutCone.from_netlist(net, "out")
    keep = {net.netlist.names[c.node] for c in cone.cells}
    gates = [(g, node) for g, node in gates if g in keep]
    used = {f for _, node in gates for f in node.fanins}
    net = RedactedNetlist(Netlist.build([x for x in leaves if x in used], ["out"], gates))
    if compaction:
        net = compact(net, random_groups(net.key_space, rng, rng.randint(1, 3)))
    return net


def random_cone(rng: random.Random, **kwargs) -> LutCone:
    return LutCone.from_netlist(random_cone_netlist(rng, **kwargs), "out")
