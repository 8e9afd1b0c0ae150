"""Brute-force functionality enumeration over every config-bit assignment.

Assignments are processed in numpy chunks: assignment ``a`` gives key id
``cone.key_ids[i]`` the value ``(a >> i) & 1``.  Each chunk is filtered by the
per-LUT dependence requirement, then the surviving cone truth tables are
computed row-parallel in 64-bit words.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cone import LutCone

DEFAULT_MAX_KEY_BITS = 24
MAX_ORACLE_SUPPORT = 16


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FunctionalitySet:
    support: tuple[int, ...]
    members: frozenset[int]
    valid_bitstreams: int

    @property
    def count(self) -> int:
        return len(self.members)


@lru_cache(maxsize=None)
def _dependence_lookup(k: int) -> np.ndarray:
    """Boolean array over all 2^(2^k) tables: True where no input is a don't-care."""
    t = np.arange(1 << (1 << k), dtype=np.uint32)
    bits = [(t >> r) & 1 for r in range(1 << k)]
    ok = np.ones(t.shape, dtype=bool)
    for j in range(k):
        depends = np.zeros(t.shape, dtype=bool)
        for r in range(1 << k):
            if not (r >> j) & 1:
                depends |= bits[r] != bits[r | (1 << j)]
        ok &= depends
    return ok


def _support_words(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-packed projection words per support bit, and the valid-row mask."""
    rows = 1 << n
    words = max(1, rows // 64)
    r = np.arange(words * 64, dtype=np.uint64).reshape(words, 64)
    weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
    proj = np.empty((n, words), dtype=np.uint64)
    for j in range(n):
        bit = (r >> np.uint64(j)) & np.uint64(1)
        proj[j] = (bit * weights).sum(axis=1, dtype=np.uint64)
    valid = np.where(r < rows, weights, np.uint64(0)).sum(axis=1, dtype=np.uint64)
    return proj, valid


def enumerate_oracle(
    cone: LutCone,
    limit: int = DEFAULT_MAX_KEY_BITS,
    max_support: int = MAX_ORACLE_SUPPORT,
    chunk: int = 1 << 16,
) -> FunctionalitySet:
    """Every distinct cone truth table reachable by a valid assignment."""
    K, n = cone.key_bits, cone.n
    if K > limit:
        raise CapExceeded(f"cone has {K} key bits, oracle limit is {limit}")
    if n > max_support:
        raise CapExceeded(f"cone has {n} support bits, oracle limit is {max_support}")

    pos = {cid: i for i, cid in enumerate(cone.key_ids)}
    proj, full = _support_words(n)
    words = proj.shape[1]
    found: set[bytes] = set()
    valid_total = 0

    for start in range(0, 1 << K, chunk):
        a = np.arange(start, min(start + chunk, 1 << K), dtype=np.uint64)
        tables = []
        keep = np.ones(a.shape, dtype=bool)
        for cell in cone.cells:
            if cell.is_lut:
                t = np.zeros(a.shape, dtype=np.uint32)
                for r, cid in enumerate(cell.config):
                    t |= ((a >> np.uint64(pos[cid])) & np.uint64(1)).astype(np.uint32) << np.uint32(r)
                keep &= _dependence_lookup(cell.arity)[t]
                tables.append(t)
            else:
                tables.append(np.full(a.shape, cell.table, dtype=np.uint32))
        if not keep.any():
            continue
        valid_total += int(keep.sum())
        tables = [t[keep] for t in tables]
        m = int(keep.sum())

        values = [np.broadcast_to(proj[j], (m, words)) for j in range(n)]
        for cell, t in zip(cone.cells, tables):
            ins = [values[f] for f in cell.fanins]
            out = np.zeros((m, words), dtype=np.uint64)
            for r in range(1 << cell.arity):
                sel = (np.uint64(0) - ((t >> np.uint32(r)) & np.uint32(1)).astype(np.uint64))[:, None]
                term = np.broadcast_to(full, (m, words)).copy()
                for j, x in enumerate(ins):
                    term &= x if (r >> j) & 1 else ~x
                out |= term & sel
            values.append(out & full)
        root = values[cone.root_slot] if cone.cells else np.broadcast_to(proj[0], (m, words))
        root = np.ascontiguousarray(root, dtype="<u8")
        for row in np.unique(root, axis=0):
            found.add(row.tobytes())

    members = frozenset(int.from_bytes(b, "little") for b in found)
    return FunctionalitySet(cone.support, members, valid_total)
