"""Functionality-space metric: how many distinct functions a redacted cone can take."""

from __future__ import annotations

import time
from fractions import Fraction

from .cone import Cell, LutCone
from .dd import ConfigDD, build_dd, count_functionalities
from .formulas import (
    PRINTED_B,
    ConeShape,
    dependent_function_count,
    dependent_function_count_bruteforce,
    formula_FI,
    formula_FK,
    formula_FR,
    is_dont_care_free,
    log2_exact,
    valid_bitstreams,
)
from .oracle import CapExceeded, FunctionalitySet, enumerate_oracle
from .orbit import NotTree, demorgan_orbit, tree_shape_of

__all__ = [
    "CapExceeded", "Cell", "ConeShape", "ConfigDD", "FunctionalitySet", "LutCone", "NotTree",
    "MethodMismatch", "PRINTED_B", "analyze_cone", "b_constants", "build_dd", "count_functionalities",
    "demorgan_orbit", "dependent_function_count", "dependent_function_count_bruteforce",
    "enumerate_oracle", "formula_FI", "formula_FK", "formula_FR", "formula_report",
    "is_dont_care_free", "tree_shape_of",
]

# Exact integers wider than this are rendered as "2^<exp>" strings in reports.
MAX_EXACT_BITS = 1024


class MethodMismatch(AssertionError):
    pass


def exact(x: int):
    if x.bit_length() - 1 > MAX_EXACT_BITS and x & (x - 1) == 0:
        return f"2^{x.bit_length() - 1}"
    return x


def b_constants() -> dict[str, dict]:
    """Per-arity dependent-function counts by both routes, next to the printed values."""
    out = {}
    for i in (2, 3, 4):
        ie = dependent_function_count(i)
        bf = dependent_function_count_bruteforce(i)
        out[str(i)] = {
            "inclusion_exclusion": ie,
            "brute_force": bf,
            "printed": PRINTED_B[i],
            "delta_vs_printed": ie - PRINTED_B[i],
        }
    return out


def formula_report(shape: ConeShape) -> dict:
    fi, fk, fr = formula_FI(shape), formula_FK(shape), formula_FR(shape)
    report = {
        "shape": {"a2": shape.a2, "a3": shape.a3, "a4": shape.a4},
        "support_bits": shape.support_bits,
        "key_bits": shape.key_bits,
        "F_I": exact(fi),
        "F_K": exact(fk),
        "F_R": fr,
        "log2": {"F_I": 2**shape.support_bits, "F_K": shape.key_bits, "F_R": log2_exact(fr)},
    }
    if shape.a4:
        # The printed b_4 is odd, so this quotient need not be an integer.
        printed = Fraction(valid_bitstreams(shape, PRINTED_B), 2 ** (shape.luts - 1))
        report["F_R_with_printed_b"] = int(printed) if printed.denominator == 1 else str(printed)
    return report


def _tree_block(cone: LutCone):
    if not cone.lut_cells:
        return None
    try:
        shape = tree_shape_of(cone)
    except NotTree as exc:
        return {"is_tree": False, "reason": exc.reason}
    return {
        "is_tree": True,
        "shape": {"a2": shape.a2, "a3": shape.a3, "a4": shape.a4},
        "F_I": exact(formula_FI(shape)),
        "F_K": exact(formula_FK(shape)),
        "F_R": formula_FR(shape),
    }


def analyze_cone(
    cone: LutCone,
    method: str = "dd",
    max_key_bits: int | None = None,
    list_functions: bool = False,
) -> dict:
    """Count distinct functionalities of one cone and build its report record."""
    if method not in ("dd", "oracle", "both"):
        raise ValueError(f"unknown method {method!r}")
    start = time.perf_counter()
    kw = {} if max_key_bits is None else {"max_key_bits": max_key_bits}
    members = valid = None
    if method in ("dd", "both"):
        dd = build_dd(cone, **kw)
        members, valid = dd.terminal_tables(), dd.valid_bitstreams()
    if method in ("oracle", "both"):
        fs = enumerate_oracle(cone, **({} if max_key_bits is None else {"limit": max_key_bits}))
        if members is not None and (set(fs.members) != members or fs.valid_bitstreams != valid):
            raise MethodMismatch(
                f"decision diagram ({len(members)} functions, {valid} bitstreams) disagrees with "
                f"enumeration ({fs.count} functions, {fs.valid_bitstreams} bitstreams)"
            )
        members, valid = set(fs.members), fs.valid_bitstreams
    names = cone.netlist.names
    report = {
        "cone": names[cone.root],
        "support": [names[s] for s in cone.support],
        "support_bits": cone.n,
        "key_bits": cone.key_bits,
        "lut_histogram": {str(k): v for k, v in cone.lut_histogram().items()},
        "tree": _tree_block(cone),
        "valid_bitstreams": valid,
        "distinct_functionalities": len(members),
        "method": method,
        "elapsed_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    if list_functions:
        width = max(1, (1 << cone.n) // 4)
        report["functionalities"] = [format(t, f"0{width}x") for t in sorted(members)]
    return report
