import random

import networkx as nx
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from netgen import random_gate_netlist
from redact_audit import parse_bench, serialize_bench, serialize_key
from redact_audit.funcspace.formulas import is_dont_care_free
from redact_audit.netlist import cone_of, gate_table, truth_table
from redact_audit.redactor import (
    RedactedNetlist, RedactionError, RedactionPolicy,
    absorb_inverters, apply_key, compact, random_groups, redact,
)

TREE4 = "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\nOUTPUT(o)\n" \
        "g1 = AND(a, b)\ng2 = OR(c, d)\ng3 = XOR(g1, g2)\no = NAND(g3, e)\n"


def test_single_and_becomes_lut2():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a, b)\n")
    red, key = redact(net)
    text = serialize_bench(red.netlist)
    assert "c = LUT2(a, b ; k0,k1,k2,k3)" in text
    assert serialize_key(key) == "k0=0\nk1=0\nk2=0\nk3=1\n"


def test_four_gate_tree_key_space():
    red, key = redact(parse_bench(TREE4))
    assert len(red.key_space) == 16 == len(key)
    assert red.lut_histogram() == {2: 4, 3: 0, 4: 0}
    assert red.compaction == {}


def test_inverter_folded_into_consumer():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nnb = NOT(b)\nc = AND(a, nb)\n")
    absorbed = absorb_inverters(net)
    c = absorbed.nodes[absorbed.id_of("c")]
    assert c.kind == "TABLE" and c.table == 0b0010  # rows: a=1, b=0 only
    assert "nb" not in absorbed.ids
    red, key = redact(net)
    assert len(red.luts) == 1 and [key[i] for i in range(4)] == [0, 1, 0, 0]


def test_inverter_chain_driving_output_is_kept():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\nx = OR(a, b)\nn1 = NOT(x)\ny = NOT(n1)\nz = AND(n1, a)\n")
    red, key = redact(net)
    out = red.netlist
    assert out.meta["kept_inverters"] == ("y",)
    y = out.nodes[out.id_of("y")]
    assert y.kind == "BUF" and y.fanins == (out.id_of("x"),)
    keyed = apply_key(red, key)
    for po in ("y", "z"):
        c0, c1 = cone_of(net, net.id_of(po)), cone_of(keyed, keyed.id_of(po))
        assert truth_table(c1, inputs=c0.support).bits == truth_table(c0).bits


def test_constant_after_absorption_is_an_error():
    net = parse_bench("INPUT(a)\nOUTPUT(y)\nna = NOT(a)\ny = XOR(a, na)\n")
    with pytest.raises(RedactionError, match="constant"):
        redact(net)


def test_no_absorb_rejects_single_input_gates():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nnb = NOT(b)\nc = AND(a, nb)\n")
    with pytest.raises(RedactionError, match="'nb' has fan-in 1"):
        redact(net, RedactionPolicy(absorb_single_input_gates=False))
    red, _ = redact(net, RedactionPolicy(scope=["c"], absorb_single_input_gates=False))
    assert list(red.netlist.names[i] for i in red.luts) == ["c"]


def test_partial_scope():
    red, key = redact(parse_bench(TREE4), RedactionPolicy(scope=["g3", "o"]))
    assert sorted(red.netlist.names[i] for i in red.luts) == ["g3", "o"]
    assert len(key) == 8
    with pytest.raises(RedactionError, match="not found"):
        redact(parse_bench(TREE4), RedactionPolicy(scope=["nope"]))


def test_dffs_are_never_redacted():
    net = parse_bench("INPUT(a)\nOUTPUT(o)\nq = DFF(n)\nn = XOR(a, q)\no = AND(n, q)\n")
    red, _ = redact(net)
    assert red.netlist.nodes[red.netlist.id_of("q")].kind == "DFF"
    assert len(red.luts) == 2


def test_apply_key_needs_every_bit():
    red, key = redact(parse_bench(TREE4))
    del key[5]
    with pytest.raises(RedactionError, match="k5"):
        apply_key(red, key)


@pytest.mark.parametrize("kind", ["AND", "OR", "NAND", "NOR", "XOR", "XNOR"])
def test_standard_gates_have_no_dont_care(kind):
    for k in (2, 3, 4):
        assert is_dont_care_free(gate_table(kind, k), k)


def _po_tables_equal(orig, keyed):
    for po in orig.outputs:
        name = orig.names[po]
        c0 = cone_of(orig, po)
        c1 = cone_of(keyed, keyed.id_of(name))
        assert set(c1.support) == set(keyed.id_of(orig.names[s]) for s in c0.support)
        inputs = [keyed.id_of(orig.names[s]) for s in c0.support]
        assert truth_table(c1, inputs=inputs).bits == truth_table(c0).bits


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), n_gates=st.integers(1, 16), n_dffs=st.integers(0, 2), n_floating=st.integers(0, 1))
def test_correct_key_fidelity_random(seed, n_gates, n_dffs, n_floating):
    net = random_gate_netlist(seed, n_inputs=4, n_gates=n_gates, n_dffs=n_dffs, n_floating=n_floating, inverters=0.3)
    try:
        red, key = redact(net)
    except RedactionError:
        assume(False)
    assert set(key) == set(red.key_space)
    _po_tables_equal(net, apply_key(red, key))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n_groups=st.integers(0, 6))
def test_compaction_accounting(seed, n_groups):
    net = random_gate_netlist(seed, n_inputs=4, n_gates=10, inverters=0.0)
    red, _ = redact(net)
    before = len(red.key_space)
    assert before == sum(1 << n.arity for n in red.luts.values())
    groups = random_groups(red.key_space, random.Random(seed), n_groups)
    after = compact(red, groups)
    assert len(after.key_space) == before - sum(len(g) - 1 for g in groups)
    for g in groups:
        rep = min(g)
        assert len(after.occurrences[rep]) == len(g)


def test_compaction_errors():
    red, _ = redact(parse_bench(TREE4))
    with pytest.raises(RedactionError, match="two groups"):
        compact(red, [{0, 1}, {1, 2}])
    with pytest.raises(RedactionError, match="unknown"):
        compact(red, [{0, 99}])
    with pytest.raises(RedactionError, match="at least 2"):
        compact(red, [{3}])


def _graph(net, luts_as_gates=True):
    g = nx.DiGraph()
    for i in range(len(net.names)):
        node = net.nodes.get(i)
        if node is None:
            kind = "source"
        elif node.kind == "DFF":
            kind = "ff"
        elif node.arity == 1:
            kind = "wire"
        else:
            kind = f"cell{node.arity}"
        g.add_node(i, kind=kind, po=i in net.outputs)
        for f in node.fanins if node else ():
            g.add_edge(f, i)
    return g


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n_dffs=st.integers(0, 2))
def test_redaction_preserves_topology(seed, n_dffs):
    net = random_gate_netlist(seed, n_inputs=4, n_gates=14, n_dffs=n_dffs, inverters=0.3)
    try:
        red, _ = redact(net)
    except RedactionError:
        assume(False)
    absorbed = absorb_inverters(net)
    same = lambda a, b: a == b  # noqa: E731
    assert nx.is_isomorphic(_graph(absorbed), _graph(red.netlist), node_match=same)


def test_redacted_view_of_parsed_lut_file():
    red, _ = redact(parse_bench(TREE4))
    again = RedactedNetlist(parse_bench(serialize_bench(red.netlist)))
    assert again.key_space == red.key_space
    assert again.occurrences == red.occurrences
