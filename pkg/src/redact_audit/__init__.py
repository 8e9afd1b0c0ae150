"""Auditing LUT-based design redaction: functionality-space counts and library matching."""

from .bench import parse_bench, parse_key, read_netlist, serialize_bench, serialize_key
from .netlist import Netlist, NetlistError, Node, TruthTable, cone_of, key_points, simulate, truth_table
from .redactor import RedactedNetlist, RedactionError, RedactionPolicy, absorb_inverters, apply_key, compact, redact

__version__ = "0.1.0"

__all__ = [
    "parse_bench", "parse_key", "read_netlist", "serialize_bench", "serialize_key",
    "Netlist", "NetlistError", "Node", "TruthTable", "cone_of", "key_points", "simulate", "truth_table",
    "RedactedNetlist", "RedactionError", "RedactionPolicy", "absorb_inverters", "apply_key", "compact", "redact",
]
