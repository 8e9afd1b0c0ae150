"""Closed-form functionality counts for tree-shaped LUT cones.

All results are exact Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, log2

from ..netlist import row_masks

# Commonly printed constants.  b_4 is usually quoted as 64,595 while
# both counting routes below give 64,594; reports show the two side by side.
PRINTED_B = {2: 10, 3: 218, 4: 64595}


def is_dont_care_free(bits: int, n: int) -> bool:
    """True iff the n-input table ``bits`` depends on every one of its inputs."""
    if bits < 0 or bits >> (1 << n):
        raise ValueError("table wider than 2^n rows")
    for j, hi in enumerate(row_masks(n)):
        shift = 1 << j
        if ((bits & hi) >> shift) == (bits & (hi >> shift)):
            return False
    return True


def dependent_function_count(i: int) -> int:
    """Number of i-input Boolean functions depending on all i inputs (inclusion-exclusion)."""
    if i < 1:
        raise ValueError("arity must be >= 1")
    return sum((-1) ** k * comb(i, k) * 2 ** (2 ** (i - k)) for k in range(i + 1))


def dependent_function_count_bruteforce(i: int) -> int:
    """Same count by testing every one of the 2^(2^i) tables."""
    if not 1 <= i <= 4:
        raise ValueError("brute force is limited to arity 1..4")
    return sum(1 for t in range(1 << (1 << i)) if is_dont_care_free(t, i))


@dataclass(frozen=True)
class ConeShape:
    """LUT counts by arity in a tree-shaped single-output cone."""

    a2: int = 0
    a3: int = 0
    a4: int = 0

    def __post_init__(self):
        if min(self.a2, self.a3, self.a4) < 0:
            raise ValueError("LUT counts must be non-negative")
        if self.a2 + self.a3 + self.a4 < 1:
            raise ValueError("a cone needs at least one LUT")

    @property
    def counts(self) -> dict[int, int]:
        return {2: self.a2, 3: self.a3, 4: self.a4}

    @property
    def luts(self) -> int:
        return self.a2 + self.a3 + self.a4

    @property
    def support_bits(self) -> int:
        return sum((i - 1) * a for i, a in self.counts.items()) + 1

    @property
    def key_bits(self) -> int:
        return sum(2**i * a for i, a in self.counts.items())


def formula_FI(shape: ConeShape) -> int:
    """Functions of the cone's inputs: 2^(2^support)."""
    return 2 ** (2 ** shape.support_bits)


def formula_FK(shape: ConeShape) -> int:
    """Distinct bitstreams: 2^K."""
    return 2**shape.key_bits


def valid_bitstreams(shape: ConeShape, b: dict[int, int] | None = None) -> int:
    b = b or {i: dependent_function_count(i) for i in (2, 3, 4)}
    out = 1
    for i, a in shape.counts.items():
        out *= b[i] ** a
    return out


def formula_FR(shape: ConeShape, b: dict[int, int] | None = None) -> int:
    """Distinct functions of a tree cone with no don't-care LUT inputs.

    Each function is reached by exactly 2^(L-1) valid bitstreams, so the
    count is the valid-bitstream count divided by that orbit size.
    """
    num = valid_bitstreams(shape, b)
    den = 2 ** (shape.luts - 1)
    q, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"{num} is not divisible by {den}")
    return q


def log2_exact(x: int) -> float:
    """log2 of a big integer, rounded to 4 places, safe beyond float range."""
    if x <= 0:
        raise ValueError("log2 of a non-positive count")
    shift = max(0, x.bit_length() - 60)
    return round(log2(x >> shift) + shift, 4)
