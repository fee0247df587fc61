"""
Arithmetic in GF(2^m) for m <= 8.

Goal:
- Elements are small ints (bit patterns of polynomials over GF(2)); addition is XOR.
- Products come from a q x q table built once per field by carry-less multiply
  and reduction modulo the field polynomial.
- Symbol blocks are byte strings carrying 8/m elements per byte, most
  significant group first. Multiplying a block by a scalar is a single
  256-entry lookup per byte (numpy fancy indexing).

GF(4) (poly w^2 + w + 1) is the field the code is built on:
0, 1, w, w+1 are encoded as 0, 1, 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from mds53.errors import FieldError, FieldMismatchError, FieldZeroDivisionError

GF4_POLY = 0b111

# x * y in GF(4), rows/cols ordered 0, 1, w, w+1
GF4_PRODUCTS = (
    (0, 0, 0, 0),
    (0, 1, 2, 3),
    (0, 2, 3, 1),
    (0, 3, 1, 2),
)

# One irreducible (primitive) polynomial per supported order
STANDARD_POLYS = {
    2: 0b11,
    4: 0b111,
    8: 0b1011,
    16: 0b10011,
    32: 0b100101,
    64: 0b1000011,
    128: 0b10001001,
    256: 0b100011101,
}


# Polynomial helpers over GF(2)
def _clmul(a: int, b: int) -> int:
    """Carry-less product of two bit polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod(a: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= mod << (a.bit_length() - 1 - deg)
    return a


def _is_irreducible(poly: int) -> bool:
    deg = poly.bit_length() - 1
    if deg == 1:
        return True
    # Any factor has degree <= deg // 2
    for divisor in range(2, 1 << (deg // 2 + 1)):
        if _poly_mod(poly, divisor) == 0:
            return False
    return True


def _product_table(order: int, poly: int) -> np.ndarray:
    table = np.zeros((order, order), dtype=np.uint8)
    for a in range(order):
        for b in range(a, order):
            table[a, b] = table[b, a] = _poly_mod(_clmul(a, b), poly)
    return table


@dataclass(frozen=True)
class FieldSpec:
    """GF(order) defined by prim_poly (bit i = coefficient of x^i)."""

    order: int
    prim_poly: int

    def __post_init__(self) -> None:
        if self.order < 2 or self.order > 256 or self.order & (self.order - 1):
            raise FieldError(f"field order must be a power of two in [2, 256], got {self.order}")
        if self.prim_poly.bit_length() - 1 != self.degree:
            raise FieldError(
                f"polynomial {self.prim_poly:#x} has degree {self.prim_poly.bit_length() - 1}, "
                f"GF({self.order}) needs degree {self.degree}"
            )
        if not _is_irreducible(self.prim_poly):
            raise FieldError(f"polynomial {self.prim_poly:#x} is reducible over GF(2)")

    @property
    def degree(self) -> int:
        return self.order.bit_length() - 1

    def __str__(self) -> str:
        return f"GF({self.order})"

    # Tables
    @cached_property
    def mul_table(self) -> np.ndarray:
        """q x q uint8 product table (read-only). GF(4) uses the published table."""
        if (self.order, self.prim_poly) == (4, GF4_POLY):
            table = np.array(GF4_PRODUCTS, dtype=np.uint8)
        else:
            table = _product_table(self.order, self.prim_poly)
        table.flags.writeable = False
        return table

    @cached_property
    def product_rows(self) -> tuple[tuple[int, ...], ...]:
        # plain-int copy of mul_table for scalar hot loops
        return tuple(tuple(row) for row in self.mul_table.tolist())

    @cached_property
    def inv_table(self) -> tuple[int, ...]:
        inverses = [0] * self.order
        for a in range(1, self.order):
            row = self.product_rows[a]
            inverses[a] = row.index(1)
        return tuple(inverses)

    @cached_property
    def block_luts(self) -> np.ndarray:
        """
        q x 256 table: block_luts[s][byte] is the byte holding s * e for every
        element e packed in `byte`. Only defined when m divides 8.
        """
        m = self.degree
        if 8 % m:
            raise FieldError(f"{self} elements do not pack evenly into bytes")
        mask = self.order - 1
        byte_values = np.arange(256, dtype=np.uint16)
        luts = np.zeros((self.order, 256), dtype=np.uint16)
        for slot in range(8 // m):
            shift = 8 - m * (slot + 1)
            elems = (byte_values >> shift) & mask
            luts |= self.mul_table[:, elems].astype(np.uint16) << shift
        out = luts.astype(np.uint8)
        out.flags.writeable = False
        return out

    # Scalar arithmetic on encoded ints
    def check(self, value: int) -> int:
        if not 0 <= value < self.order:
            raise FieldError(f"{value} is not an element of {self}")
        return value

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def neg(self, a: int) -> int:
        return a

    def mul(self, a: int, b: int) -> int:
        return self.product_rows[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldZeroDivisionError(f"0 has no inverse in {self}")
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.order)

    def element(self, value: int) -> FieldElement:
        return FieldElement(self, value)

    def render(self, value: int) -> str:
        """Human form: 0, 1, w, w+1 in GF(4); hex elsewhere."""
        if self.order == 4:
            return ("0", "1", "w", "w+1")[value]
        return f"{value:#04x}"


GF4 = FieldSpec(4, GF4_POLY)


def field_by_name(name: str) -> FieldSpec:
    """'gf4' -> GF(4) with the standard polynomial."""
    key = name.strip().lower()
    if not key.startswith("gf") or not key[2:].isdigit():
        raise FieldError(f"unknown field {name!r}; expected gf2, gf4, gf8, ... gf256")
    order = int(key[2:])
    if order not in STANDARD_POLYS:
        raise FieldError(f"unsupported field {name!r}; order must be a power of two up to 256")
    return FieldSpec(order, STANDARD_POLYS[order])


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def __post_init__(self) -> None:
        self.field.check(self.value)

    def __add__(self, other: FieldElement) -> FieldElement:
        return gf_add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return gf_sub(self, other)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return gf_mul(self, other)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return gf_div(self, other)

    def __neg__(self) -> FieldElement:
        return gf_neg(self)

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return self.field.render(self.value)


def _same_field(a: FieldElement, b: FieldElement) -> FieldSpec:
    if a.field != b.field:
        raise FieldMismatchError(f"cannot combine elements of {a.field} and {b.field}")
    return a.field


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same_field(a, b), a.value ^ b.value)


def gf_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    # characteristic 2: subtraction is addition
    return gf_add(a, b)


def gf_neg(a: FieldElement) -> FieldElement:
    return a


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    field = _same_field(a, b)
    return FieldElement(field, field.mul(a.value, b.value))


def gf_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, a.field.inv(a.value))


def gf_div(a: FieldElement, b: FieldElement) -> FieldElement:
    field = _same_field(a, b)
    return FieldElement(field, field.div(a.value, b.value))


# Blocks
def _as_block_array(block: bytes | bytearray | memoryview | np.ndarray) -> np.ndarray:
    if isinstance(block, np.ndarray):
        if block.dtype != np.uint8:
            raise FieldError(f"symbol blocks must be uint8 arrays, got {block.dtype}")
        return block
    return np.frombuffer(bytes(block), dtype=np.uint8)


def scalar_block_mul(s: FieldElement, block: bytes | np.ndarray) -> bytes | np.ndarray:
    """
    Multiply every packed element of `block` by s.

    bytes in, bytes out; a uint8 array in, a new uint8 array out.
    """
    arr = _as_block_array(block)
    out = s.field.block_luts[s.value][arr]
    if isinstance(block, np.ndarray):
        return out
    return out.tobytes()


def combine(field: FieldSpec, coeffs: Sequence[int], symbols: Sequence) -> int | np.ndarray:
    """
    sum(c_i * s_i) over the field.

    Symbols are either all encoded scalars (ints) or all packed uint8 blocks of
    one shape; blocks may have any shape (a whole column of stripes at once).
    """
    if len(coeffs) != len(symbols):
        raise FieldError(f"{len(coeffs)} coefficients for {len(symbols)} symbols")
    if not symbols:
        raise FieldError("combine needs at least one symbol")
    if isinstance(symbols[0], np.ndarray):
        acc = np.zeros_like(symbols[0])
        luts = field.block_luts
        for c, s in zip(coeffs, symbols):
            if c == 1:
                acc ^= s
            elif c:
                acc ^= luts[c][s]
        return acc
    rows = field.product_rows
    total = 0
    for c, s in zip(coeffs, symbols):
        total ^= rows[c][s]
    return total


def symbols_equal(a, b) -> bool:
    """Equality that works for scalar and block symbols alike."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b
