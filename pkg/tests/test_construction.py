from fractions import Fraction

import pytest

from mds53.construction import (
    CONDITION_LABELS,
    CONDITION_NAMES,
    STORAGE_OVERHEAD,
    CodeParams,
    build_code_matrices,
    build_generator,
    canonical_params,
    check_conditions,
    make_instance,
    rank_profile,
    structural_identity,
    with_matrices,
)
from mds53.errors import InvalidParamsError
from mds53.galois import GF4, field_by_name
from mds53.linalg import Mat
from mds53.oracle import enumerate_valid_params

from conftest import CONJUGATE, W, W1


def m(rows):
    return Mat.from_rows(GF4, rows)


def test_canonical_matrices(inst):
    assert inst.a1 == m([[W1, 0], [W, 1]])
    assert inst.a2 == m([[1, 0], [1, W1]])
    assert inst.a3 == m([[1, W], [W1, W]])


def test_canonical_params_pass_every_condition():
    assert check_conditions(canonical_params()) == []
    assert check_conditions(CONJUGATE) == []


def test_generator_layout(inst):
    p = inst.generator
    assert p.shape == (10, 6)
    assert p[0:6, :] == Mat.identity(GF4, 6)
    assert p.tolist()[6] == [1, 0, 1, 0, 1, 0]
    assert p.tolist()[7] == [0, 1, 0, 1, 0, 1]
    assert p.tolist()[8] == [W1, W, 1, 1, 1, W1]
    assert p.tolist()[9] == [0, 1, 0, W1, W, W]


def test_build_generator_accepts_any_matrices():
    zero = Mat.zeros(GF4, 2, 2)
    p = build_generator((zero, zero, zero))
    assert p[8:10, :] == Mat.zeros(GF4, 2, 6)


def test_structural_identity(inst, conjugate_inst):
    assert structural_identity(inst)
    assert structural_identity(conjugate_inst)
    broken = with_matrices(inst, inst.a1, inst.a2, Mat.identity(GF4, 2))
    assert not structural_identity(broken)


def test_rank_profile(inst):
    assert set(rank_profile(inst).values()) == {2}


@pytest.fixture(scope="module")
def gf4_valid():
    return enumerate_valid_params(GF4).valid


def test_every_valid_gf4_tuple_has_invertible_matrices(gf4_valid):
    assert gf4_valid
    for params in gf4_valid:
        profile = rank_profile(make_instance(params))
        assert profile == {"A1": 2, "A2": 2, "A3": 2, "A1-A2": 2, "A1-A3": 2, "A2-A3": 2}


def test_every_valid_gf4_tuple_keeps_the_identity(gf4_valid):
    for params in gf4_valid:
        assert structural_identity(make_instance(params))


def test_canonical_inequalities():
    # lambda = eta = w, theta = mu = w + 1
    f = GF4
    lam, mu, th, eta = W, W1, W1, W
    add, sub, mul = f.add, f.sub, f.mul

    assert add(th, eta) == 1

    assert mul(th, sub(1, lam)) == W
    assert mul(th, sub(1, lam)) != 1

    assert mul(th, sub(mu, 1)) == 1
    assert mul(th, sub(mu, 1)) != eta

    assert mul(th, sub(mu, lam)) == W1
    assert add(mul(eta, lam), mu) == 0

    assert sub(mu, 1) == W
    assert mul(eta, sub(1, lam)) == 1

    ratio = f.div(mul(mul(eta, sub(th, 1)), sub(mu, lam)), mul(mul(th, lam), sub(mu, 1)))
    assert add(eta, 1) == W1
    assert ratio == W


def test_lambda_one_breaks_6a():
    violated = check_conditions(CodeParams(1, W1, W1, W))
    assert violated[0] == "6a"
    assert all(label in CONDITION_LABELS for label in violated)
    assert violated == sorted(violated, key=CONDITION_LABELS.index)


def test_mu_equal_to_lambda_breaks_6b():
    violated = check_conditions(CodeParams(W, W, W1, W))
    assert "6b" in violated
    assert "6a" not in violated


def test_condition_labels():
    assert CONDITION_LABELS == tuple(f"6{c}" for c in "abcdefghij")
    assert set(CONDITION_NAMES) == set(CONDITION_LABELS)


def test_pairwise_rank_violation():
    # theta = w, eta = w + 1 with the canonical lambda, mu: A1 - A2 and A2 - A3 are singular
    params = CodeParams(W, W1, W, W1)
    violated = check_conditions(params)
    assert "6f" in violated
    assert "6h" in violated
    inst = make_instance(params, validate=False)
    profile = rank_profile(inst)
    assert profile["A1-A2"] == 1
    assert profile["A2-A3"] == 1


def test_make_instance_refuses_invalid_params():
    with pytest.raises(InvalidParamsError) as err:
        make_instance(CodeParams(W, W1, W, W1))
    assert "6f" in err.value.violations
    assert "A1 - A2 invertible" in str(err.value)


def test_zero_lambda_or_mu():
    with pytest.raises(InvalidParamsError):
        build_code_matrices(CodeParams(0, W1, W1, W))
    with pytest.raises(InvalidParamsError):
        build_code_matrices(CodeParams(W, 0, W1, W))


def test_params_text_form():
    text = canonical_params().serialize()
    assert text == "q=4;poly=0x7;lambda=2;mu=3;theta=3;eta=2"
    assert CodeParams.parse(text) == canonical_params()
    gf8 = CodeParams(2, 3, 4, 5, field=field_by_name("gf8"))
    assert CodeParams.parse(gf8.serialize()) == gf8


@pytest.mark.parametrize("text", ["", "q=4;poly=0x7", "q=4;poly=0x7;lambda=x;mu=3;theta=3;eta=2", "q=4;poly=0x7;lambda=9;mu=3;theta=3;eta=2"])
def test_bad_params_text(text):
    with pytest.raises(InvalidParamsError):
        CodeParams.parse(text)


def test_canonical_params_only_over_gf4():
    with pytest.raises(InvalidParamsError):
        canonical_params(field_by_name("gf8"))


def test_code_properties(inst):
    assert inst.stripe_size == 2
    assert inst.field_size == 4
    assert STORAGE_OVERHEAD == Fraction(5, 3)
    assert inst.node_rows(5) == inst.generator[8:10, :]
