"""Flat, slot-indexed view of one redacted single-output cone.

Slots ``0..n-1`` are the cone's support bits; slot ``n + c`` is the output of
cell ``c``.  Cells are in topological order (fan-ins first).  A cell is either
a programmable LUT (``config`` holds config-bit ids) or fixed logic
(``table`` holds its local truth table).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..netlist import Netlist, cone_of, local_table, row_masks, table_bitparallel
from ..redactor import RedactedNetlist


@dataclass(frozen=True)
class Cell:
    node: int
    fanins: tuple[int, ...]  # slot indices
    config: tuple[int, ...] | None = None
    table: int | None = None

    @property
    def is_lut(self) -> bool:
        return self.config is not None

    @property
    def arity(self) -> int:
        return len(self.fanins)


@dataclass(frozen=True)
class LutCone:
    netlist: Netlist
    root: int
    support: tuple[int, ...]
    cells: tuple[Cell, ...]

    @classmethod
    def from_netlist(cls, netlist: Netlist | RedactedNetlist, root: int | str) -> "LutCone":
        if isinstance(netlist, RedactedNetlist):
            netlist = netlist.netlist
        if isinstance(root, str):
            root = netlist.id_of(root)
        cone = cone_of(netlist, root)
        slot = {s: i for i, s in enumerate(cone.support)}
        cells = []
        for nid in cone.nodes:
            node = netlist.nodes[nid]
            fanins = tuple(slot[f] for f in node.fanins)
            if node.kind == "LUT":
                cells.append(Cell(nid, fanins, config=node.config))
            else:
                cells.append(Cell(nid, fanins, table=local_table(node)))
            slot[nid] = len(cone.support) + len(cells) - 1
        return cls(netlist, root, cone.support, tuple(cells))

    @property
    def n(self) -> int:
        return len(self.support)

    @property
    def root_slot(self) -> int:
        if not self.cells:
            return 0
        return self.n + len(self.cells) - 1

    @cached_property
    def key_ids(self) -> tuple[int, ...]:
        """Distinct config-bit ids: by LUT in topological order, then row."""
        seen: dict[int, None] = {}
        for cell in self.cells:
            for cid in cell.config or ():
                seen.setdefault(cid, None)
        return tuple(seen)

    @property
    def key_bits(self) -> int:
        return len(self.key_ids)

    @property
    def lut_cells(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.cells) if c.is_lut)

    def lut_histogram(self) -> dict[int, int]:
        hist = {2: 0, 3: 0, 4: 0}
        for c in self.cells:
            if c.is_lut:
                hist[c.arity] = hist.get(c.arity, 0) + 1
        return hist

    def local_tables(self, key) -> list[int | None]:
        """Per-cell local table under ``key`` (a mapping config id -> bit)."""
        out = []
        for c in self.cells:
            if c.is_lut:
                out.append(sum((key[cid] & 1) << r for r, cid in enumerate(c.config)))
            else:
                out.append(c.table)
        return out

    def evaluate(self, tables) -> int:
        """Cone truth table (bit r = row r over ``support``) from per-cell tables."""
        full = (1 << (1 << self.n)) - 1
        values = list(row_masks(self.n))
        for cell, t in zip(self.cells, tables):
            values.append(table_bitparallel(t, [values[f] for f in cell.fanins], full))
        return values[self.root_slot]
