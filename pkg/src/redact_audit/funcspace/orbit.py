"""Tree-shape detection and the equivalent-bitstream orbits of tree cones.

In a tree cone, inverting every config bit of a non-output LUT complements
its output; the consuming LUT compensates by reading that input column
complemented.  Any subset of the L-1 non-output LUTs can be flipped this way,
so each function of a valid bitstream is shared by 2^(L-1) bitstreams.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Iterator, Mapping

from .cone import LutCone
from .formulas import ConeShape, is_dont_care_free


class NotTree(ValueError):
    """The cone is outside the closed-form regime; ``reason`` says why."""

    REASONS = ("fanout", "reconvergence", "compaction", "non-lut")

    def __init__(self, reason: str, detail: str = ""):
        assert reason in self.REASONS
        self.reason = reason
        super().__init__(f"not a tree cone ({reason}){': ' + detail if detail else ''}")


def tree_shape_of(cone: LutCone) -> ConeShape:
    if not cone.cells:
        raise NotTree("non-lut", "cone has no LUTs")
    names = cone.netlist.names
    for cell in cone.cells:
        if not cell.is_lut:
            raise NotTree("non-lut", f"fixed logic at {names[cell.node]!r}")
    uses = Counter(f for cell in cone.cells for f in cell.fanins)
    for ci, cell in enumerate(cone.cells[:-1]):
        if uses[cone.n + ci] != 1:
            raise NotTree("fanout", f"LUT {names[cell.node]!r} feeds {uses[cone.n + ci]} pins")
    for s in range(cone.n):
        if uses[s] != 1:
            raise NotTree("reconvergence", f"input {names[cone.support[s]]!r} feeds {uses[s]} pins")
    bits = Counter(cid for cell in cone.cells for cid in cell.config)
    shared = sorted(cid for cid, k in bits.items() if k > 1)
    if shared:
        raise NotTree("compaction", "shared bits " + ", ".join(f"k{c}" for c in shared))
    hist = cone.lut_histogram()
    return ConeShape(hist.get(2, 0), hist.get(3, 0), hist.get(4, 0))


def _complement_column(table: int, k: int, pin: int) -> int:
    out = 0
    for r in range(1 << k):
        out |= ((table >> (r ^ (1 << pin))) & 1) << r
    return out


def demorgan_orbit(cone: LutCone, key: Mapping[int, int]) -> list[dict[int, int]]:
    """All 2^(L-1) bitstreams equivalent to ``key`` by output-flip compensation."""
    tree_shape_of(cone)
    tables = cone.local_tables(key)
    for cell, t in zip(cone.cells, tables):
        if not is_dont_care_free(t, cell.arity):
            raise ValueError(f"key gives LUT {cone.netlist.names[cell.node]!r} a don't-care input")
    consumer = {}
    for ci, cell in enumerate(cone.cells):
        for pin, f in enumerate(cell.fanins):
            if f >= cone.n:
                consumer[f - cone.n] = (ci, pin)
    inner = list(range(len(cone.cells) - 1))
    orbit = []
    for flips in product((0, 1), repeat=len(inner)):
        new = list(tables)
        for ci, flip in zip(inner, flips):
            if flip:
                cell = cone.cells[ci]
                new[ci] ^= (1 << (1 << cell.arity)) - 1
                di, pin = consumer[ci]
                new[di] = _complement_column(new[di], cone.cells[di].arity, pin)
        assignment = {}
        for cell, t in zip(cone.cells, new):
            for r, cid in enumerate(cell.config):
                assignment[cid] = (t >> r) & 1
        orbit.append(assignment)
    return orbit


def valid_bitstreams_of_tree(cone: LutCone) -> Iterator[dict[int, int]]:
    """Every valid bitstream of a tree cone (product of per-LUT valid tables)."""
    tree_shape_of(cone)
    per_lut = [
        [t for t in range(1 << (1 << c.arity)) if is_dont_care_free(t, c.arity)] for c in cone.cells
    ]
    for choice in product(*per_lut):
        assignment = {}
        for cell, t in zip(cone.cells, choice):
            for r, cid in enumerate(cell.config):
                assignment[cid] = (t >> r) & 1
        yield assignment
