from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mds53.errors import FieldError, FieldMismatchError, FieldZeroDivisionError
from mds53.galois import (
    GF4,
    GF4_POLY,
    GF4_PRODUCTS,
    STANDARD_POLYS,
    FieldElement,
    FieldSpec,
    combine,
    field_by_name,
    gf_add,
    gf_div,
    gf_inv,
    gf_mul,
    gf_sub,
    scalar_block_mul,
    _product_table,
)

from conftest import W, W1


def el(v):
    return FieldElement(GF4, v)


def test_gf4_table_matches_reference():
    assert GF4.mul_table.tolist() == [list(row) for row in GF4_PRODUCTS]
    # the carry-less construction agrees with the published table
    assert _product_table(4, GF4_POLY).tolist() == [list(row) for row in GF4_PRODUCTS]


def test_gf4_products_and_inverses():
    assert gf_mul(el(W), el(W)) == el(W1)
    assert gf_mul(el(W), el(W1)) == el(1)
    assert gf_mul(el(W1), el(W1)) == el(W)
    assert gf_inv(el(W)) == el(W1)
    assert gf_inv(el(W1)) == el(W)
    assert gf_inv(el(1)) == el(1)
    assert gf_div(el(1), el(W)) == el(W1)


def test_addition_is_xor_and_subtraction_matches():
    assert gf_add(el(W), el(W1)) == el(1)
    assert gf_add(el(W), el(0)) == el(W)
    for a, b in product(range(4), repeat=2):
        assert gf_sub(el(a), el(b)) == gf_add(el(a), el(b))
        assert -el(a) == el(a)


def test_inverse_of_zero_raises():
    with pytest.raises(FieldZeroDivisionError):
        gf_inv(el(0))
    # still a ZeroDivisionError for callers that only know the built-in
    with pytest.raises(ZeroDivisionError):
        GF4.inv(0)


def test_mixed_fields_raise():
    gf8 = field_by_name("gf8")
    with pytest.raises(FieldMismatchError):
        gf_add(el(1), FieldElement(gf8, 1))
    with pytest.raises(FieldMismatchError):
        el(1) * FieldElement(gf8, 1)


@pytest.mark.parametrize("order", [4, 8, 16])
def test_field_axioms_exhaustive(order):
    f = field_by_name(f"gf{order}")
    elems = range(order)
    for a, b, c in product(elems, repeat=3):
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    for a in range(1, order):
        assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("order", [4, 16, 256])
def test_tables_agree_with_galois_package(order):
    galois = pytest.importorskip("galois")
    gf = galois.GF(order, irreducible_poly=STANDARD_POLYS[order])
    x = gf(np.arange(order))
    expected = np.asarray(x[:, None] * x[None, :])
    assert np.array_equal(field_by_name(f"gf{order}").mul_table, expected)


def test_bad_field_descriptions():
    with pytest.raises(FieldError):
        FieldSpec(6, 0b111)
    with pytest.raises(FieldError):
        FieldSpec(4, 0b101)  # x^2 + 1 = (x + 1)^2
    with pytest.raises(FieldError):
        FieldSpec(4, 0b1011)
    with pytest.raises(FieldError):
        field_by_name("gf3")
    with pytest.raises(FieldError):
        el(4)


def test_field_by_name():
    assert field_by_name("gf4") == GF4
    assert field_by_name("GF16").prim_poly == 0b10011


def test_block_mul_example():
    # 0x1B packs 0, 1, w, w+1; times w gives 0, w, w+1, 1
    assert scalar_block_mul(el(W), b"\x1b") == b"\x2d"


def test_block_mul_identity_and_zero():
    block = bytes(range(256))
    assert scalar_block_mul(el(1), block) == block
    assert scalar_block_mul(el(0), block) == bytes(256)
    assert scalar_block_mul(el(W), b"") == b""


def test_block_mul_keeps_arrays():
    arr = np.frombuffer(b"\x1b\xff", dtype=np.uint8)
    out = scalar_block_mul(el(W), arr)
    assert isinstance(out, np.ndarray)
    assert out.tobytes() == scalar_block_mul(el(W), b"\x1b\xff")


def test_blocks_need_byte_aligned_elements():
    with pytest.raises(FieldError):
        field_by_name("gf8").block_luts


@given(st.binary(max_size=64), st.integers(0, 3), st.integers(0, 3))
def test_block_mul_composes(block, s1, s2):
    once = scalar_block_mul(el(s1), scalar_block_mul(el(s2), block))
    assert once == scalar_block_mul(gf_mul(el(s1), el(s2)), block)


@given(st.binary(min_size=8, max_size=8), st.binary(min_size=8, max_size=8), st.integers(0, 3))
def test_block_mul_is_linear(b1, b2, s):
    summed = bytes(x ^ y for x, y in zip(b1, b2))
    lhs = scalar_block_mul(el(s), summed)
    rhs = bytes(x ^ y for x, y in zip(scalar_block_mul(el(s), b1), scalar_block_mul(el(s), b2)))
    assert lhs == rhs


@given(st.binary(min_size=16, max_size=16))
def test_gf16_blocks_match_scalar_products(block):
    f = field_by_name("gf16")
    s = FieldElement(f, 7)
    out = scalar_block_mul(s, block)
    for byte_in, byte_out in zip(block, out):
        assert byte_out >> 4 == f.mul(7, byte_in >> 4)
        assert byte_out & 0xF == f.mul(7, byte_in & 0xF)


def test_combine_scalars_and_blocks():
    assert combine(GF4, [W, W1], [1, 1]) == 1
    assert combine(GF4, [0, 0], [3, 3]) == 0
    a = np.frombuffer(b"\x1b", dtype=np.uint8)
    b = np.frombuffer(b"\xff", dtype=np.uint8)
    out = combine(GF4, [W, 1], [a, b])
    assert out.tobytes() == bytes([0x2D ^ 0xFF])
    with pytest.raises(FieldError):
        combine(GF4, [1], [1, 2])


def test_element_rendering():
    assert [str(el(v)) for v in range(4)] == ["0", "1", "w", "w+1"]
