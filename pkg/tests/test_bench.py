import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netgen import random_gate_netlist
from redact_audit import parse_bench, parse_key, serialize_bench, serialize_key
from redact_audit.netlist import NetlistError

S27ISH = """\
# small sequential design
INPUT(G0)
INPUT(G1)
input(G2)
OUTPUT(G17)
G5 = DFF(G10)
G6 = DFF(G11)
G14 = NOT(G0)
G8 = and(G14, G6)
G10 = NOR(G14, G5)   # trailing comment
G11 = NAND(G1, G8, G2)
G17 = OR(G11, G10, G5, G6)
"""


def test_parse_mixed_case_and_comments():
    net = parse_bench(S27ISH)
    assert [net.names[i] for i in net.inputs] == ["G0", "G1", "G2"]
    assert len(net.dffs) == 2
    assert net.nodes[net.id_of("G8")].kind == "AND"
    assert net.nodes[net.id_of("G17")].arity == 4


def test_round_trip():
    net = parse_bench(S27ISH)
    again = parse_bench(serialize_bench(net))
    assert again == net


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n_floating=st.integers(0, 2), n_dffs=st.integers(0, 2))
def test_round_trip_random(seed, n_floating, n_dffs):
    net = random_gate_netlist(seed, n_gates=12, n_dffs=n_dffs, n_floating=n_floating)
    assert parse_bench(serialize_bench(net)) == net


def test_floating_header_and_round_trip():
    net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, f)\n")
    text = serialize_bench(net)
    assert text.startswith("# floating: f\n")
    assert parse_bench(text).floating == net.floating


def test_lut_lines():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nOUTPUT(d)\nc = LUT2(a, b ; k0,k1,k2,k3)\nd = LUT2(a,b;0,1,1,0)\n")
    c, d = net.nodes[net.id_of("c")], net.nodes[net.id_of("d")]
    assert c.kind == "LUT" and c.config == (0, 1, 2, 3)
    assert d.kind == "TABLE" and d.table == 0b0110
    assert parse_bench(serialize_bench(net)) == net


def test_shared_config_ids_parse():
    net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = LUT2(a, b ; k0,k1,k1,k3)\n")
    assert net.nodes[net.id_of("c")].config == (0, 1, 1, 3)


@pytest.mark.parametrize(
    "text,line,msg",
    [
        ("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\ny = OR(a, b)\n", 4, "duplicate"),
        ("INPUT(a)\nINPUT(a)\n", 2, "duplicate"),
        ("INPUT(a)\nOUTPUT(y)\ny = NOT(a, a)\n", 3, "exactly 1"),
        ("INPUT(a)\nOUTPUT(q)\nq = DFF(a, a)\n", 3, "exactly 1"),
        ("INPUT(a)\nOUTPUT(y)\ny = AND(a, b, c, d, e)\n", 3, "'y' has fan-in 5"),
        ("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n", 3, "unknown gate"),
        ("INPUT(a)\n\nOUTPUT(y)\ny = AND(a, 9x)\n", 4, "bad net name"),
        ("INPUT(a)\nOUTPUT(y)\ny AND a\n", 3, "syntax"),
        ("INPUT(a)\nOUTPUT(x)\nx = AND(a, y)\ny = OR(a, x)\n", 3, "cycle"),
        ("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = LUT2(a, b ; k0,k1,k2)\n", 4, "4 configuration"),
        ("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = LUT2(a, b ; k0,k1,k2,x3)\n", 4, "identifier"),
        ("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = LUT2(a, a ; k0,k1,k2,k3)\n", 4, "distinct"),
    ],
)
def test_parse_errors_carry_location(text, line, msg):
    with pytest.raises(NetlistError, match=msg) as info:
        parse_bench(text)
    assert info.value.line == line
    assert info.value.column >= 1
    assert str(info.value).startswith(f"line {line}, column ")


def test_key_file_round_trip():
    key = {3: 1, 0: 0, 12: 1}
    text = serialize_key(key)
    assert text == "k0=0\nk3=1\nk12=1\n"
    assert parse_key(text) == key


@pytest.mark.parametrize("text", ["k0=2\n", "x0=1\n", "k0=1\nk0=0\n"])
def test_bad_key_files(text):
    with pytest.raises(NetlistError):
        parse_key(text)
