"""Desk-scale design corpus for library matching experiments.

Three structurally unrelated designs, written out as bench text:

* ``addcmp`` - 8-bit ripple adder with an equality/less-than comparator
* ``crc16`` - byte-parallel CRC-16/CCITT register with load enable (sequential)
* ``mixer`` - one hash-style mixing round (ch, maj, rotations, adder)

plus helpers to rename nets and to append an unrelated logic block.
"""

from __future__ import annotations

import random

from .bench import parse_bench, serialize_bench
from .netlist import Netlist


class _Writer:
    def __init__(self):
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.lines: list[str] = []
        self._n = 0

    def inp(self, name: str) -> str:
        self.inputs.append(name)
        return name

    def out(self, name: str) -> str:
        self.outputs.append(name)
        return name

    def g(self, kind: str, *ins: str, name: str | None = None) -> str:
        if name is None:
            name = f"n{self._n}"
            self._n += 1
        self.lines.append(f"{name} = {kind}({', '.join(ins)})")
        return name

    def xor_tree(self, terms: list[str], name: str | None = None) -> str:
        # fan-in <= 3 XORs, left-leaning so operand order stays fixed
        terms = list(terms)
        while len(terms) > 3:
            terms = [self.g("XOR", *terms[:3])] + terms[3:]
        if len(terms) == 1:
            return self.g("BUF", terms[0], name=name)
        return self.g("XOR", *terms, name=name)

    def text(self, title: str) -> str:
        head = [f"# {title}"]
        head += [f"INPUT({x})" for x in self.inputs]
        head += [f"OUTPUT({x})" for x in self.outputs]
        return "\n".join(head + self.lines) + "\n"


def _full_adder(w: _Writer, a: str, b: str, c: str, s_name=None) -> tuple[str, str]:
    p = w.g("XOR", a, b)
    s = w.g("XOR", p, c, name=s_name)
    g = w.g("AND", a, b)
    t = w.g("AND", p, c)
    return s, w.g("OR", g, t)


def addcmp_bench(width: int = 8) -> str:
    w = _Writer()
    a = [w.inp(f"a{i}") for i in range(width)]
    b = [w.inp(f"b{i}") for i in range(width)]
    carry = w.inp("cin")
    for i in range(width):
        s, carry = _full_adder(w, a[i], b[i], carry, s_name=w.out(f"s{i}"))
    w.g("BUF", carry, name=w.out("cout"))
    # equality and a < b, scanned from the MSB
    eqs = [w.g("XNOR", a[i], b[i]) for i in range(width)]
    lts = [w.g("AND", w.g("NOT", a[i]), b[i]) for i in range(width)]
    eq_acc = eqs[width - 1]
    lt_acc = lts[width - 1]
    for i in range(width - 2, -1, -1):
        lt_acc = w.g("OR", lt_acc, w.g("AND", eq_acc, lts[i]))
        eq_acc = w.g("AND", eq_acc, eqs[i])
    w.g("BUF", eq_acc, name=w.out("eq"))
    w.g("BUF", lt_acc, name=w.out("lt"))
    return w.text("addcmp: ripple adder and magnitude comparator")


def _crc_equations(width: int = 16, poly: int = 0x1021, data_bits: int = 8):
    """Next-state XOR sets of a byte-parallel MSB-first CRC, as ('r', i)/('d', j) terms."""
    state = [frozenset({("r", i)}) for i in range(width)]
    for j in range(data_bits - 1, -1, -1):
        fb = state[width - 1] ^ {("d", j)}
        new = [fb if poly & 1 else frozenset()]
        for i in range(1, width):
            new.append(state[i - 1] ^ fb if (poly >> i) & 1 else state[i - 1])
        state = new
    return [sorted(s) for s in state]


def crc16_bench() -> str:
    w = _Writer()
    d = [w.inp(f"d{j}") for j in range(8)]
    en = w.inp("en")
    clr = w.inp("clr")
    nen = w.g("NOT", en)
    nclr = w.g("NOT", clr)
    regs = [f"r{i}" for i in range(16)]
    for i, terms in enumerate(_crc_equations()):
        ops = [regs[k] if t == "r" else d[k] for t, k in terms]
        upd = w.xor_tree(ops)
        hold = w.g("AND", nen, regs[i])
        load = w.g("AND", en, upd)
        w.g("AND", w.g("OR", load, hold), nclr, name=f"nx{i}")
        w.g("DFF", f"nx{i}", name=regs[i])
    for i in range(0, 16, 2):
        w.g("BUF", regs[i], name=w.out(f"q{i // 2}"))
    w.g("NOR", *[w.g("OR", *regs[i:i + 4]) for i in range(0, 16, 4)], name=w.out("zero"))
    return w.text("crc16: byte-parallel CRC register")


def mixer_bench(width: int = 8) -> str:
    w = _Writer()
    x = [w.inp(f"x{i}") for i in range(width)]
    y = [w.inp(f"y{i}") for i in range(width)]
    z = [w.inp(f"z{i}") for i in range(width)]
    ch, sig = [], []
    for i in range(width):
        ch.append(w.g("OR", w.g("AND", x[i], y[i]), w.g("AND", w.g("NOT", x[i]), z[i])))
        w.g("OR", w.g("AND", x[i], y[i]), w.g("AND", x[i], z[i]), w.g("AND", y[i], z[i]), name=w.out(f"m{i}"))
        sig.append(w.g("XOR", x[(i + 2) % width], x[(i + 3) % width], x[(i + 5) % width]))
    carry = None
    for i in range(width):
        if carry is None:
            w.g("XOR", ch[i], sig[i], name=w.out(f"h{i}"))
            carry = w.g("AND", ch[i], sig[i])
        else:
            _, carry = _full_adder(w, ch[i], sig[i], carry, s_name=w.out(f"h{i}"))
    w.g("BUF", carry, name=w.out("hc"))
    return w.text("mixer: choose/majority/rotate mixing round")


CORPUS_BUILDERS = {"addcmp": addcmp_bench, "crc16": crc16_bench, "mixer": mixer_bench}


def corpus() -> dict[str, Netlist]:
    return {name: parse_bench(build()) for name, build in CORPUS_BUILDERS.items()}


def renamed_randomly(net: Netlist, rng: random.Random) -> Netlist:
    """Every net gets a fresh random name (same ids, same structure)."""
    names = set()
    while len(names) < len(net.names):
        names.add("w" + "".join(rng.choice("abcdefghijklmnopqrstuvwxyz0123456789") for _ in range(8)))
    fresh = sorted(names)
    rng.shuffle(fresh)
    return net.renamed(dict(zip(net.names, fresh)))


def extra_block_bench(n_gates: int = 20, seed: int = 0, prefix: str = "xb_") -> str:
    """A seeded random combinational block with its own inputs and outputs."""
    rng = random.Random(seed)
    w = _Writer()
    pool = [w.inp(f"{prefix}i{j}") for j in range(6)]
    kinds = ["AND", "OR", "NAND", "NOR", "XOR", "XNOR"]
    made = []
    for g in range(n_gates):
        k = rng.choice((2, 2, 2, 3))
        ins = rng.sample(pool[-10:], k)
        made.append(w.g(rng.choice(kinds), *ins, name=f"{prefix}g{g}"))
        pool.append(made[-1])
    for g in made[-3:]:
        w.out(g)
    return w.text("extra block")


def with_extra_block(net: Netlist, n_gates: int = 20, seed: int = 0) -> Netlist:
    """The design plus an unrelated block sharing no nets with it."""
    extra = extra_block_bench(n_gates, seed)
    lines = [ln for ln in serialize_bench(net).splitlines() if not ln.startswith("#")]
    return parse_bench("\n".join(lines) + "\n" + extra)
