from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbo_kit.gamma import ScaledOp
from sbo_kit.indices import OperatorSignature, index_sets
from sbo_kit.operators import (
    FormOperator,
    basic_form_operator,
    branson_lemma_entry,
    branson_operator,
    d_op,
    dstar_op,
    form_laplacian,
    iota_op,
    juhl_closed_form,
    juhl_closed_form_corrected,
    juhl_kernel,
    juhl_symbol,
    knapp_stein_lemma_entry,
    knapp_stein_lhs_entry,
    knapp_stein_residue_check,
    knapp_stein_vanishes,
    knapp_stein_vanishes_bruteforce,
    pochhammer_factor_text,
    sbo_components,
    sbo_differential,
    sbo_from_components,
)
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, rf
from sbo_kit.weyl import ConstCoeffOp

D = ConstCoeffOp.partial


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_d_squared_and_codifferential_squared_vanish(n):
    for i in range(n - 1):
        assert (d_op(n, i + 1) @ d_op(n, i)).is_zero()
        assert (dstar_op(n, i + 1) @ dstar_op(n, i + 2)).is_zero()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_form_laplacian_is_scalar(n):
    for i in range(n + 1):
        assert form_laplacian(n, i) == FormOperator.identity(n, i, ConstCoeffOp.laplacian(n))


def test_interior_product_on_basis():
    iota = basic_form_operator("iota_n", 2, 1)
    assert iota.entry((2,), ()) == ConstCoeffOp.constant(2, 1)
    assert not iota.entry((1,), ())
    assert iota_op(2, 0).is_zero()


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        basic_form_operator("wedge", 3, 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_juhl_symbol_low_orders(n):
    assert juhl_symbol(n, 0) == ConstCoeffOp.constant(n, 1)
    assert juhl_symbol(n, 1) == D(n, n).scale(2)
    lap_t = ConstCoeffOp.laplacian(n, n - 1)
    assert juhl_symbol(n, 2) == (D(n, n) ** 2).scale(2 * LAMBDA - n + 3) + lap_t


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("l", range(7))
def test_juhl_order_and_leading_coefficient(n, l):
    op = juhl_symbol(n, l)
    assert op.degree == l and op.is_homogeneous()
    # leading ∂_n^l coefficient 2^l (α+1)_{⌊l/2⌋}-type product is nonzero
    assert op.coefficient((0,) * (n - 1) + (l,))


def test_juhl_kernel_negative_gap_is_zero():
    assert not juhl_kernel(3, -1)
    assert juhl_kernel(3, 2, LAMBDA) == juhl_symbol(3, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("l", range(9))
def test_corrected_product_form_matches(n, l):
    assert juhl_closed_form_corrected(n, l) == juhl_symbol(n, l)


@pytest.mark.parametrize("l", [0, 1, 2])
def test_quoted_product_form_differs(l):
    # the commonly quoted product has one factor too many
    assert juhl_closed_form(3, l) != juhl_symbol(3, l)
    assert "m − 1 + j" in pochhammer_factor_text()


def test_quoted_product_form_low_orders():
    n = 3
    nu = lambda l: LAMBDA + l  # noqa: E731
    lap_t = ConstCoeffOp.laplacian(n, n - 1)
    assert juhl_closed_form(n, 0) == ConstCoeffOp.constant(n, nu(0) - Fraction(n - 3, 2))
    assert juhl_closed_form(n, 1) == D(n, n).scale(2 * (nu(1) - Fraction(n - 3, 2)))
    v = nu(2)
    want = (D(n, n) ** 2).scale(2 * (v - Fraction(n - 1, 2)) * (v - Fraction(n - 3, 2))) + lap_t.scale(
        v - Fraction(n - 1, 2)
    )
    assert juhl_closed_form(n, 2) == want


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_scalar_sbo_is_half_nu_juhl(n):
    for l in range(5):
        op = sbo_differential(OperatorSignature(n, 0, 0, l % 2), l)
        expected = (juhl_symbol(n, l) if n > 1 else juhl_kernel(n, l)).scale((LAMBDA + l) / 2)
        assert op.entry((), ()) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("l", range(5))
def test_composition_matches_component_formulas(n, l):
    for i in range(n + 1):
        for j in (i, i - 1):
            if 0 <= j <= n - 1:
                sig = OperatorSignature(n, i, j, l % 2)
                assert sbo_differential(sig, l) == sbo_from_components(sig, l)


def test_component_case_one_example():
    n, l = 3, 2
    sig = OperatorSignature(n, 1, 1, 0)
    got = sbo_components(sig, l, (1,), (1,))
    want = (juhl_kernel(n, l - 2, LAMBDA + 1) * D(n, 1) ** 2).scale(-1) + juhl_kernel(n, l).scale(
        (LAMBDA + l - 1) / 2
    )
    assert got == want


def test_branson_examples():
    assert branson_operator(4, 1, 0) == FormOperator.identity(4, 1).scale(-1)
    b = branson_operator(2, 1, 1)
    assert b.entry((1,), (1,)) == D(2, 1) ** 2 - D(2, 2) ** 2
    assert b.entry((1,), (2,)) == (D(2, 1) * D(2, 2)).scale(2)
    for n in (2, 3, 5):
        assert branson_operator(n, 0, 1) == FormOperator.identity(n, 0, ConstCoeffOp.laplacian(n)).scale(
            -(rf(Fraction(n, 2)) + 1)
        )


@pytest.mark.parametrize("n", range(1, 7))
def test_branson_vanishes_only_at_middle_degree_l0(n):
    for i in range(n + 1):
        for l in range(3):
            assert branson_operator(n, i, l).is_zero() == (2 * i == n and l == 0)


@pytest.mark.parametrize("n,i,l", [(2, 1, 1), (3, 0, 1), (4, 2, 0), (4, 1, 0), (3, 2, 2)])
def test_knapp_stein_examples(n, i, l):
    assert knapp_stein_residue_check(n, i, l).passed


@pytest.mark.parametrize("n", [2, 3, 4])
def test_closed_form_reading_resolution(n):
    l = 2
    full = literal = 0
    for i in range(n + 1):
        for I in index_sets(n, i):
            for J in index_sets(n, i):
                lhs = knapp_stein_lhs_entry(n, l, I, J)
                full += knapp_stein_lemma_entry(n, i, l, I, J, "full") != lhs
                literal += knapp_stein_lemma_entry(n, i, l, I, J, "literal") != lhs
                assert branson_lemma_entry(n, i, l, I, J, "full") == branson_operator(n, i, l).entry(I, J)
    assert full == 0 and literal > 0


@given(st.integers(2, 6), st.fractions(-3, 8, max_denominator=2))
def test_knapp_stein_vanishing_rule(n, lam):
    for i in range(n + 1):
        assert knapp_stein_vanishes(n, i, lam) == knapp_stein_vanishes_bruteforce(n, i, lam)


def test_apply_to_polynomial():
    n = 2
    f = MultiPolynomial.variable(n, 1) ** 2
    out = d_op(n, 0).apply(f, ())
    assert out[(1,)] == MultiPolynomial.variable(n, 1) * 2


def test_scaled_op_equality_is_canonical():
    op = ConstCoeffOp.laplacian(2)
    from sbo_kit.gamma import GammaProduct

    assert ScaledOp(GammaProduct(2), op) == ScaledOp(GammaProduct(1), op.scale(2))
