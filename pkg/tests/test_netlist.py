import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netgen import random_gate_netlist
from redact_audit import parse_bench
from redact_audit.netlist import (
    FF, FLOATING, PI, PO, Netlist, NetlistError, Node, TruthTable,
    cone_of, gate_table, key_points, row_masks, simulate, truth_table,
)


def test_two_input_gate_tables():
    # bit r = output on row r, with a = r & 1, b = r >> 1
    assert gate_table("AND", 2) == 0b1000
    assert gate_table("OR", 2) == 0b1110
    assert gate_table("NAND", 2) == 0b0111
    assert gate_table("NOR", 2) == 0b0001
    assert gate_table("XOR", 2) == 0b0110
    assert gate_table("XNOR", 2) == 0b1001
    assert gate_table("NOT", 1) == 0b01
    assert gate_table("BUF", 1) == 0b10


def test_row_convention_input0_is_lsb():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nnb = NOT(b)\nc = AND(a, nb)\n")
    tt = truth_table(cone_of(net, net.id_of("c")))
    assert tt.inputs == (net.id_of("a"), net.id_of("b"))
    assert tt.bitstring() == "0100"
    assert tt.hex() == "2"


def test_row_masks():
    assert row_masks(1) == (0b10,)
    assert row_masks(2) == (0b1010, 0b1100)
    assert row_masks(3)[2] == 0b11110000


def test_truth_table_rejects_oversized():
    with pytest.raises(ValueError):
        TruthTable((0,), 0b100)


def test_cycle_is_rejected():
    with pytest.raises(NetlistError, match="cycle"):
        Netlist.build(["a"], ["x"], [("x", Node("AND", ("a", "y"))), ("y", Node("OR", ("a", "x")))])


def test_cycle_through_dff_is_fine():
    net = Netlist.build(["a"], ["x"], [("x", Node("AND", ("a", "q"))), ("q", Node("DFF", ("x",)))])
    assert net.dffs == (net.id_of("q"),)
    assert net.is_cut_point(net.id_of("q"))


def test_floating_nets_are_pseudo_inputs_and_key_points():
    net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = XOR(a, dangling)\n")
    fl = net.id_of("dangling")
    assert net.floating == {fl}
    assert (fl, FLOATING) in key_points(net)
    assert simulate(net, {net.id_of("a"): 1, fl: 1})[net.id_of("y")] == 0


def test_key_point_classes():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\nn = NAND(a, q)\nq = DFF(n)\no = OR(n, b)\n")
    kinds = sorted(k for _, k in key_points(net))
    assert kinds == sorted([PI, PI, PO, FF])


def test_degenerate_cone_of_input():
    net = parse_bench("INPUT(a)\nOUTPUT(a)\n")
    cone = cone_of(net, 0)
    assert cone.nodes == () and cone.support == (0,)
    assert truth_table(cone).bits == 0b10


def test_simulate_requires_all_pseudo_inputs():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = OR(a, b)\n")
    with pytest.raises(NetlistError, match="missing"):
        simulate(net, {0: 1})


def test_rename_keeps_structure():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = OR(a, b)\n")
    ren = net.renamed({"a": "x", "c": "z"})
    assert ren.names == ("x", "b", "z")
    assert ren.nodes == net.nodes
    with pytest.raises(NetlistError):
        net.renamed({"a": "b"})


def _table_by_simulation(net, root, support):
    bits = 0
    others = {i: 0 for i in net.pseudo_inputs}
    for r in range(1 << len(support)):
        assign = dict(others)
        assign.update({s: (r >> j) & 1 for j, s in enumerate(support)})
        bits |= simulate(net, assign)[root] << r
    return bits


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n_gates=st.integers(1, 14), n_dffs=st.integers(0, 2))
def test_bitparallel_matches_scalar_simulation(seed, n_gates, n_dffs):
    net = random_gate_netlist(seed, n_inputs=4, n_gates=n_gates, n_dffs=n_dffs)
    for po in net.outputs:
        cone = cone_of(net, po)
        assert truth_table(cone).bits == _table_by_simulation(net, po, cone.support)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_support_order_does_not_change_function(seed):
    net = random_gate_netlist(seed, n_inputs=5, n_gates=12)
    po = net.outputs[-1]
    fwd, rev = cone_of(net, po), cone_of(net, po, reverse=True)
    assert set(fwd.support) == set(rev.support)
    assert set(fwd.nodes) == set(rev.nodes)
    tt_rev = truth_table(rev)
    # re-evaluating the reverse cone over the forward order gives the forward table
    assert truth_table(rev, inputs=fwd.support).bits == truth_table(fwd).bits
    perm = [fwd.support.index(s) for s in rev.support]
    for r in range(1 << len(perm)):
        r_fwd = sum(((r >> j) & 1) << perm[j] for j in range(len(perm)))
        assert tt_rev[r] == truth_table(fwd)[r_fwd]


def test_multi_input_gates_up_to_four():
    net = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(y)\ny = XNOR(a, b, c, d)\n")
    tt = truth_table(cone_of(net, net.id_of("y")))
    expect = sum((1 - (bin(r).count("1") & 1)) << r for r in range(16))
    assert tt.bits == expect


def test_comb_order_is_topological():
    net = random_gate_netlist(7, n_gates=20, n_dffs=1)
    pos = {n: i for i, n in enumerate(net.comb_order)}
    for nid in net.comb_order:
        for f in net.nodes[nid].fanins:
            if f in pos:
                assert pos[f] < pos[nid]
    assert all(net.nodes[n].kind != "DFF" for n in net.comb_order)
    assert len(pos) == sum(1 for n in net.nodes.values() if n.kind != "DFF")


@pytest.mark.parametrize("kind,k", list(itertools.product(["AND", "OR", "XOR"], [2, 3, 4])))
def test_gate_table_matches_scalar_eval(kind, k):
    names = [f"x{j}" for j in range(k)]
    net = Netlist.build(names, ["y"], [("y", Node(kind, tuple(names)))])
    assert truth_table(cone_of(net, net.id_of("y"))).bits == gate_table(kind, k)
