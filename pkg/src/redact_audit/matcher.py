"""Library matching of obfuscated netlists by name-independent key-point mapping.

Key points (flip-flops, primary I/O, floating nets) are described by the
shape of their fan-in cone with every combinational node reduced to its
arity.  Single-input pass-through gates (NOT/BUF) are treated as wires, so a
gate netlist and its LUT redaction look the same.  Signatures are refined by
hashing in the signatures of adjacent key points, and two key points are
paired when their signature is unique on both sides.  Ambiguous signatures
are left unmatched.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

from .bench import read_netlist
from .netlist import FF, FLOATING, PI, Netlist, NetlistError, key_points
from .redactor import RedactedNetlist

DEFAULT_ROUNDS = 5
DEFAULT_THRESHOLD = 0.9
MAPPED, UNMAPPED = "Mapped", "Unmapped"

KeyPoint = tuple[int, str]


def _digest(obj) -> str:
    return hashlib.blake2b(repr(obj).encode(), digest_size=8).hexdigest()


def _as_netlist(design) -> Netlist:
    return design.netlist if isinstance(design, RedactedNetlist) else design


@dataclass(frozen=True)
class Signature:
    digest: str
    features: tuple  # (class, support_size, cone_depth, cone_node_count, arity_histogram)


class KeyPointGraph:
    """Type-erased key-point view of one design, with per-round signatures."""

    def __init__(self, design: Netlist | RedactedNetlist):
        self.netlist = net = _as_netlist(design)
        self.key_points: list[KeyPoint] = sorted(key_points(net), key=lambda kp: (kp[1], kp[0]))
        self._dffs = set(net.dffs)
        self._inputs = set(net.inputs)
        self.cones: dict[KeyPoint, tuple[tuple[KeyPoint, ...], tuple, str]] = {}
        for kp in self.key_points:
            self.cones[kp] = self._cone(kp)

    # -- erased structure ------------------------------------------------------

    def _passthrough(self, x: int) -> bool:
        node = self.netlist.nodes.get(x)
        return node is not None and node.arity == 1 and node.kind not in ("DFF", "LUT")

    def resolve(self, x: int) -> int:
        while self._passthrough(x):
            x = self.netlist.nodes[x].fanins[0]
        return x

    def _leaf_kp(self, x: int) -> KeyPoint:
        if x in self._dffs:
            return (x, FF)
        if x in self._inputs:
            return (x, PI)
        return (x, FLOATING)

    def _cone(self, kp: KeyPoint):
        """(support key points, features, shape hash) of a key point's fan-in."""
        nid, cls = kp
        if cls in (PI, FLOATING):
            return (), (cls, 0, 0, 0, ()), _digest("source")
        net = self.netlist
        root = self.resolve(net.nodes[nid].fanins[0] if cls == FF else nid)
        support: list[int] = []
        depth: dict[int, int] = {}
        shape: dict[int, str] = {}
        hist: dict[int, int] = {}

        def is_leaf(x: int) -> bool:
            return x not in net.nodes or net.nodes[x].kind == "DFF"

        # Iterative post-order over the erased DAG, fan-ins in pin order.
        stack = [(root, False)]
        while stack:
            x, expanded = stack.pop()
            if x in shape:
                continue
            if is_leaf(x):
                if x not in support:
                    support.append(x)
                depth[x] = 0
                shape[x] = _digest(("leaf", self._leaf_kp(x)[1], support.index(x)))
                continue
            fanins = [self.resolve(f) for f in net.nodes[x].fanins]
            if not expanded:
                stack.append((x, True))
                for f in reversed(fanins):
                    if f not in shape:
                        stack.append((f, False))
                continue
            depth[x] = 1 + max(depth[f] for f in fanins)
            shape[x] = _digest(("cell", len(fanins), tuple(shape[f] for f in fanins)))
            hist[len(fanins)] = hist.get(len(fanins), 0) + 1
        node_count = sum(hist.values())
        features = (cls, len(support), depth[root], node_count, tuple(sorted(hist.items())))
        return tuple(self._leaf_kp(x) for x in support), features, shape[root]

    @cached_property
    def adjacency(self) -> dict[KeyPoint, tuple[list, list]]:
        """Per key point: (fan-in neighbours, fan-out neighbours) with support positions."""
        adj: dict[KeyPoint, tuple[list, list]] = {kp: ([], []) for kp in self.key_points}
        for kp in self.key_points:
            for pos, leaf in enumerate(self.cones[kp][0]):
                adj[kp][0].append((leaf, pos))
                adj[leaf][1].append((kp, pos))
        return adj

    # -- signatures --------------------------------------------------------------

    def signature_rounds(self, rounds: int) -> list[dict[KeyPoint, str]]:
        """Signatures for rounds 0..rounds (inclusive)."""
        sig = {kp: _digest((self.cones[kp][1], self.cones[kp][2])) for kp in self.key_points}
        out = [sig]
        adj = self.adjacency
        for _ in range(rounds):
            prev = out[-1]
            nxt = {}
            for kp in self.key_points:
                ins, outs = adj[kp]
                nxt[kp] = _digest((
                    prev[kp],
                    tuple(sorted((prev[y], p) for y, p in ins)),
                    tuple(sorted((prev[z], p) for z, p in outs)),
                ))
            out.append(nxt)
        return out

    def signature(self, kp: KeyPoint, rounds: int = 0) -> Signature:
        if kp not in self.cones:
            raise KeyError(f"unknown key point {kp!r}")
        return Signature(self.signature_rounds(rounds)[rounds][kp], self.cones[kp][1])


def structural_signature(design, kp: KeyPoint, rounds: int = 0) -> Signature:
    return KeyPointGraph(design).signature(kp, rounds)


# -- mapping -------------------------------------------------------------------


@dataclass(frozen=True)
class KeyPointMapping:
    pairs: dict[KeyPoint, KeyPoint]  # a -> b
    confidence: dict[KeyPoint, str]  # per a-side key point
    rounds_used: int
    key_points_a: int
    key_points_b: int

    @property
    def mapped_fraction_b(self) -> float:
        return len(self.pairs) / self.key_points_b if self.key_points_b else 0.0


def _partition_size(sig: dict) -> int:
    return len(set(sig.values()))


def _unique(sig: dict[KeyPoint, str]) -> dict[str, KeyPoint]:
    seen: dict[str, KeyPoint | None] = {}
    for kp, s in sig.items():
        seen[s] = None if s in seen else kp
    return {s: kp for s, kp in seen.items() if kp is not None}


def map_rounds(sa: list[dict], sb: list[dict]) -> tuple[dict, dict, int, list[int]]:
    """Pair unique-and-equal signatures round by round; stop at a joint fixpoint."""
    pairs: dict[KeyPoint, KeyPoint] = {}
    used_b: set[KeyPoint] = set()
    confidence: dict[KeyPoint, str] = {}
    history = []
    rounds_used = 0
    for t in range(min(len(sa), len(sb))):
        ua, ub = _unique(sa[t]), _unique(sb[t])
        for s in sorted(ua.keys() & ub.keys()):
            a, b = ua[s], ub[s]
            if a in pairs or b in used_b:
                continue
            pairs[a] = b
            used_b.add(b)
            confidence[a] = "unique-signature" if t == 0 else "refined"
        history.append(len(pairs))
        rounds_used = t
        if t > 0 and _partition_size(sa[t]) == _partition_size(sa[t - 1]) and _partition_size(sb[t]) == _partition_size(sb[t - 1]):
            break
    for kp in sa[0]:
        confidence.setdefault(kp, "unmatched")
    return pairs, confidence, rounds_used, history


def map_key_points(a, b, rounds: int = DEFAULT_ROUNDS) -> KeyPointMapping:
    ga = a if isinstance(a, KeyPointGraph) else KeyPointGraph(a)
    gb = b if isinstance(b, KeyPointGraph) else KeyPointGraph(b)
    pairs, confidence, used, _ = map_rounds(ga.signature_rounds(rounds), gb.signature_rounds(rounds))
    return KeyPointMapping(pairs, confidence, used, len(ga.key_points), len(gb.key_points))


# -- library -------------------------------------------------------------------


@dataclass(frozen=True)
class MatchVerdict:
    design_name: str
    key_points_library: int
    key_points_mapped: int
    mapped_fraction: float
    verdict: str

    def as_dict(self) -> dict:
        return {
            "name": self.design_name,
            "key_points_library": self.key_points_library,
            "key_points_mapped": self.key_points_mapped,
            "mapped_fraction": round(self.mapped_fraction, 6),
            "verdict": self.verdict,
        }


@dataclass
class LibraryEntry:
    name: str
    netlist: Netlist
    signatures: list[dict[KeyPoint, str]]

    @property
    def key_points(self) -> int:
        return len(self.signatures[0])


class LibraryIndex:
    """Known designs with signatures precomputed for every refinement round."""

    def __init__(self, designs: Iterable[tuple[str, Netlist | RedactedNetlist]], rounds: int = DEFAULT_ROUNDS):
        self.rounds = rounds
        self.errors: list[tuple[str, str]] = []
        self.entries: list[LibraryEntry] = []
        for name, design in sorted(designs, key=lambda nd: nd[0]):
            g = KeyPointGraph(design)
            self.entries.append(LibraryEntry(name, g.netlist, g.signature_rounds(rounds)))

    @classmethod
    def from_dir(cls, path: str | os.PathLike, rounds: int = DEFAULT_ROUNDS) -> "LibraryIndex":
        designs = []
        errors = []
        for p in sorted(Path(path).iterdir()):
            if not p.is_file() or p.suffix not in (".bench", ".lut"):
                continue
            try:
                designs.append((p.stem, read_netlist(p)))
            except (OSError, NetlistError, UnicodeDecodeError) as exc:
                errors.append((p.name, str(exc)))
        index = cls(designs, rounds)
        index.errors = errors
        return index

    def __len__(self) -> int:
        return len(self.entries)


def match_against_library(
    target,
    library: LibraryIndex,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[MatchVerdict]:
    """One verdict per library entry, best mapped fraction first, ties by name."""
    if not len(library):
        raise ValueError("library is empty")
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    st = KeyPointGraph(target).signature_rounds(library.rounds)
    verdicts = []
    for entry in library.entries:
        pairs, _, _, _ = map_rounds(st, entry.signatures)
        total = entry.key_points
        frac = len(pairs) / total if total else 0.0
        verdicts.append(MatchVerdict(entry.name, total, len(pairs), frac, MAPPED if frac >= threshold else UNMAPPED))
    verdicts.sort(key=lambda v: (-v.mapped_fraction, v.design_name))
    return verdicts
