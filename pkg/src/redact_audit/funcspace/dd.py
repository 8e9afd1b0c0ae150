"""Reduced ordered decision diagram over a cone's configuration bits.

One layer per distinct config-bit id, so a shared (compacted) id occupies a
single layer.  Terminals are the distinct cone truth tables; assignments that
give some LUT a don't-care input end in the ``BOTTOM`` terminal.

Construction runs layer by layer.  The state after deciding a prefix of
layers holds only what the remaining layers can still observe: the values of
bits some unfinished LUT still needs, and the truth tables of finished cells
that unfinished cells consume.  Equal states share one sub-diagram.  A
bottom-up pass with a unique table then merges structurally identical nodes
and drops nodes whose two children agree.
"""

from __future__ import annotations

import gc
from array import array
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from ..netlist import row_masks, table_bitparallel
from .cone import LutCone
from .formulas import is_dont_care_free
from .oracle import CapExceeded

DEFAULT_DD_MAX_KEY_BITS = 32
DD_MAX_SUPPORT = 20

BOTTOM = -1


def terminal_ref(index: int) -> int:
    return -2 - index


def is_terminal(ref: int) -> bool:
    return ref <= -2


@lru_cache(maxsize=None)
def _valid_tables(k: int) -> frozenset[int]:
    return frozenset(t for t in range(1 << (1 << k)) if is_dont_care_free(t, k))


@dataclass
class ConfigDD:
    layer_order: tuple[int, ...]
    support: tuple[int, ...]
    nodes: list[tuple[int, int, int]] = field(default_factory=list)  # (layer, lo, hi)
    terminals: list[int] = field(default_factory=list)
    root: int = BOTTOM
    reduced: bool = True

    @property
    def layers(self) -> int:
        return len(self.layer_order)

    def layer_of(self, ref: int) -> int:
        return self.nodes[ref][0] if ref >= 0 else self.layers

    def reachable_terminals(self) -> set[int]:
        seen: set[int] = set()
        out: set[int] = set()
        stack = [self.root]
        while stack:
            ref = stack.pop()
            if ref in seen:
                continue
            seen.add(ref)
            if is_terminal(ref):
                out.add(-2 - ref)
            elif ref >= 0:
                _, lo, hi = self.nodes[ref]
                stack += [lo, hi]
        return out

    def terminal_tables(self) -> set[int]:
        return {self.terminals[i] for i in self.reachable_terminals()}

    def valid_bitstreams(self) -> int:
        """Assignments (over all layers) that reach a non-bottom terminal."""
        memo: dict[int, int] = {}

        def paths(ref: int) -> int:  # counted from ref's own layer down
            if ref == BOTTOM:
                return 0
            if is_terminal(ref):
                return 1
            if ref not in memo:
                layer, lo, hi = self.nodes[ref]
                memo[ref] = sum(paths(c) << (self.layer_of(c) - layer - 1) for c in (lo, hi))
            return memo[ref]

        return paths(self.root) << self.layer_of(self.root)

    def structure(self) -> tuple:
        return (self.layer_order, tuple(self.nodes), tuple(self.terminals), self.root)


def layer_order_for(cone: LutCone, ordering: str | Sequence[int] = "topological") -> tuple[int, ...]:
    if ordering == "topological":
        return cone.key_ids
    if ordering == "reverse":
        return cone.key_ids[::-1]
    order = tuple(ordering)
    if sorted(order) != sorted(cone.key_ids):
        raise ValueError("explicit layer order must be a permutation of the cone's config bits")
    return order


def build_dd(
    cone: LutCone,
    ordering: str | Sequence[int] = "topological",
    max_key_bits: int = DEFAULT_DD_MAX_KEY_BITS,
) -> ConfigDD:
    # Construction allocates millions of small acyclic tuples; the cyclic
    # collector only slows it down.
    enabled = gc.isenabled()
    gc.disable()
    try:
        return _build_dd(cone, ordering, max_key_bits)
    finally:
        if enabled:
            gc.enable()


def _build_dd(cone: LutCone, ordering, max_key_bits: int) -> ConfigDD:
    order = layer_order_for(cone, ordering)
    K, n = len(order), cone.n
    if K > max_key_bits:
        raise CapExceeded(f"cone has {K} key bits, decision-diagram limit is {max_key_bits}")
    if n > DD_MAX_SUPPORT:
        raise CapExceeded(f"cone has {n} support bits, decision-diagram limit is {DD_MAX_SUPPORT}")

    layer_of = {cid: i for i, cid in enumerate(order)}
    cells = cone.cells
    cfg_layers = [tuple(layer_of[c] for c in cell.config) if cell.is_lut else () for cell in cells]
    cfg_done = [max(ls) + 1 if ls else 0 for ls in cfg_layers]
    comp: list[int] = []
    for ci, cell in enumerate(cells):
        deps = [comp[f - n] for f in cell.fanins if f >= n]
        comp.append(max([cfg_done[ci]] + deps))
    root_cell = len(cells) - 1

    consumers: dict[int, list[int]] = {ci: [] for ci in range(len(cells))}
    for ci, cell in enumerate(cells):
        for f in cell.fanins:
            if f >= n:
                consumers[f - n].append(ci)
    bit_users: dict[int, list[int]] = {i: [] for i in range(K)}
    for ci, ls in enumerate(cfg_layers):
        for l in set(ls):
            bit_users[l].append(ci)

    # live_bits[i] / live_cells[i]: what the state carries before deciding layer i.
    live_bits = [
        tuple(l for l in range(i) if any(comp[c] > i for c in bit_users[l])) for i in range(K + 1)
    ]
    live_cells = [
        tuple(
            c
            for c in range(len(cells))
            if comp[c] <= i and (c == root_cell or any(comp[u] > i for u in consumers[c]))
        )
        for i in range(K + 1)
    ]
    check_at = [[c for c in range(len(cells)) if cells[c].is_lut and cfg_done[c] == i] for i in range(K + 1)]
    compute_at = [[c for c in range(len(cells)) if comp[c] == i] for i in range(K + 1)]

    full = (1 << (1 << n)) - 1
    proj = row_masks(n)

    # A state is (packed bits, tables): bit p of the packed int is the value of
    # layer live_bits[i][p]; tables follow live_cells[i].  Each transition
    # i -> i+1 is compiled into a plan over the extended bit list
    # live_bits[i] + (i,) and the value list proj + tables + newly computed.
    plans = [_compile_step(i, n, cells, cfg_layers, live_bits, live_cells, check_at, compute_at) for i in range(K)]

    def step(i: int, state: tuple, b: int):
        bv, tv = state
        width, checks, computes, keep_runs, keep_tables = plans[i]
        bv |= b << width
        for arity, runs in checks:
            if _gather(bv, runs) not in _valid_tables(arity):
                return None
        if computes:
            vals = list(proj)
            vals += tv
            for runs, fixed, srcs, cache in computes:
                local = fixed if runs is None else _gather(bv, runs)
                ins = tuple([vals[s] for s in srcs])
                terms = cache.get(ins)
                if terms is None:
                    terms = cache[ins] = _minterms(ins, full)
                out = 0
                r = 0
                while local:
                    if local & 1:
                        out |= terms[r]
                    local >>= 1
                    r += 1
                vals.append(out)
            tv = tuple(vals[j] for j in keep_tables)
        elif keep_tables is not None:
            tv = tuple(tv[j - n] for j in keep_tables)
        return (_gather(bv, keep_runs), tv)

    def terminal(table: int) -> int:
        idx = term_index.get(table)
        if idx is None:
            idx = term_index[table] = len(dd.terminals)
            dd.terminals.append(table)
        return terminal_ref(idx)

    dd = ConfigDD(order, cone.support)
    unique: dict[tuple[int, int, int], int] = {}
    term_index: dict[int, int] = {}

    def mk(layer: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (layer, lo, hi)
        ref = unique.get(key)
        if ref is None:
            ref = unique[key] = len(dd.nodes)
            dd.nodes.append(key)
        return ref

    vals0 = list(proj)
    for ci in compute_at[0]:
        ins = [vals0[f] if f < n else vals0[n + compute_at[0].index(f - n)] for f in cells[ci].fanins]
        vals0.append(table_bitparallel(cells[ci].table, ins, full))
    tables0 = {ci: vals0[n + k] for k, ci in enumerate(compute_at[0])}
    level: dict[tuple, int] = {(0, tuple(tables0[c] for c in live_cells[0])): 0}

    # Top-down: distinct states per layer, children as state indices (-1 = bottom).
    edges: list[tuple[array, array]] = []
    for i in range(K):
        nxt: dict[tuple, int] = {}
        lo_idx, hi_idx = array("l"), array("l")
        fast = (
            not check_at[i + 1]
            and not compute_at[i + 1]
            and live_bits[i + 1] == live_bits[i] + (i,)
            and live_cells[i + 1] == live_cells[i]
        )
        top = 1 << len(live_bits[i])
        for state in level:
            if fast:
                bv, tv = state
                lo_idx.append(nxt.setdefault(state, len(nxt)))
                hi_idx.append(nxt.setdefault((bv | top, tv), len(nxt)))
                continue
            for b, out in ((0, lo_idx), (1, hi_idx)):
                child = step(i, state, b)
                out.append(-1 if child is None else nxt.setdefault(child, len(nxt)))
        edges.append((lo_idx, hi_idx))
        level = nxt

    # Bottom-up: terminals, then reduced nodes layer by layer.
    if cells:
        pos = live_cells[K].index(root_cell)
        refs = [terminal(state[1][pos]) for state in level]
    else:
        refs = [terminal(proj[0]) for _ in level]
    for i in range(K - 1, -1, -1):
        lo_idx, hi_idx = edges[i]
        refs = [
            mk(i, refs[a] if a >= 0 else BOTTOM, refs[b] if b >= 0 else BOTTOM)
            for a, b in zip(lo_idx, hi_idx)
        ]
    dd.root = refs[0]
    return dd


def _runs(positions: Sequence[int]) -> tuple[tuple[int, int, int], ...]:
    """Compress a gather (dest bit d <- source bit positions[d]) into shifted runs."""
    runs: list[list[int]] = []
    for d, p in enumerate(positions):
        if runs and runs[-1][0] + runs[-1][1] == p and runs[-1][2] + runs[-1][1] == d:
            runs[-1][1] += 1
        else:
            runs.append([p, 1, d])
    return tuple((p, (1 << length) - 1, d) for p, length, d in runs)


def _minterms(ins: Sequence[int], full: int) -> list[int]:
    """Packed row masks of every minterm over ``ins``, indexed by local row."""
    terms = [full]
    for x in ins:
        nx = full ^ x
        terms = [t & nx for t in terms] + [t & x for t in terms]
    return terms


def _gather(bv: int, runs) -> int:
    out = 0
    for src, mask, dst in runs:
        out |= ((bv >> src) & mask) << dst
    return out


def _compile_step(i, n, cells, cfg_layers, live_bits, live_cells, check_at, compute_at):
    ext = live_bits[i] + (i,)
    where = {l: p for p, l in enumerate(ext)}
    checks = tuple((cells[c].arity, _runs([where[l] for l in cfg_layers[c]])) for c in check_at[i + 1])
    # value index of each cell output: n + position among tables, then computed
    vidx = {c: n + k for k, c in enumerate(live_cells[i])}
    computes = []
    for c in compute_at[i + 1]:
        cell = cells[c]
        runs = _runs([where[l] for l in cfg_layers[c]]) if cell.is_lut else None
        srcs = tuple(f if f < n else vidx[f - n] for f in cell.fanins)
        computes.append((runs, cell.table, srcs, {}))
        vidx[c] = n + len(live_cells[i]) + len(computes) - 1
    if computes or live_cells[i + 1] != live_cells[i]:
        keep_tables = tuple(vidx[c] for c in live_cells[i + 1])
    else:
        keep_tables = None
    keep_runs = _runs([where[l] for l in live_bits[i + 1]])
    return len(live_bits[i]), checks, tuple(computes), keep_runs, keep_tables


def count_functionalities(dd: ConfigDD) -> int:
    """Number of distinct non-bottom terminals reachable from the root."""
    return len(dd.reachable_terminals())
