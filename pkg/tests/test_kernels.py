import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbo_kit.gamma import Affine, GammaProduct, a_normalizer, gamma_normalize, riesz_constant, scalar_residue_constant
from sbo_kit.indices import OperatorSignature, all_signatures
from sbo_kit.kernels import (
    KernelExpression,
    component_identity_check,
    derived_kappa1_numerator,
    g_polynomial,
    g_polynomial_from_minors,
    kernel_entry,
    kernel_matrix,
    reflection_minor,
    scalar_kernel,
)
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, NU, rf
from sbo_kit.residue import entry_pairs

x = MultiPolynomial.variable


def test_gamma_functional_equation():
    z = Affine(1, 0, 0)
    g = GammaProduct(1, 0, {z + 2: 1, z: -1})
    assert gamma_normalize(g) == GammaProduct(LAMBDA * (LAMBDA + 1))


def test_normalizer_quotient_kappa0():
    q = a_normalizer(0, LAMBDA, NU, 3) / a_normalizer(0, LAMBDA - 1, NU + 1, 3)
    assert q == GammaProduct(rf(2) / (LAMBDA - NU - 2))


def test_riesz_constant_value():
    c = riesz_constant(1, 2)
    assert c(0, 0) == pytest.approx(-3.141592653589793 / 4)


def test_scalar_residue_constants():
    import math

    for n in (2, 3):
        c0 = scalar_residue_constant(0, n)
        c1 = scalar_residue_constant(1, n)
        assert c0(0, 2.5) == pytest.approx(math.pi ** ((n - 1) / 2) / math.gamma(2.5))
        assert c1(0, 2.5) == pytest.approx(-(math.pi ** ((n - 1) / 2)) / (4 * math.gamma(2.5)))


def test_reflection_minor_examples():
    x1, x2 = x(2, 1), x(2, 2)
    assert reflection_minor(2, (), ()) == MultiPolynomial.square_norm(2)
    assert reflection_minor(2, (1,), (1,)) == -(x1 * x1 - x2 * x2)
    assert reflection_minor(2, (1,), (2,)) == x1 * x2 * -2


def test_g_polynomial_examples():
    x1, x2 = x(2, 1), x(2, 2)
    for n in (1, 2, 3):
        assert g_polynomial(OperatorSignature(n, 0, 0), (), ()) == MultiPolynomial.square_norm(n)
    assert g_polynomial(OperatorSignature(2, 1, 1), (1,), (1,)) == -(x1 * x1 - x2 * x2)
    assert g_polynomial(OperatorSignature(2, 1, 0), (2,), ()) == -(x2 * x2 - x1 * x1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_g_polynomial_agrees_with_minor_route(n):
    for sig in all_signatures(n, (0,)):
        for I, J in entry_pairs(sig):
            assert g_polynomial(sig, I, J) == g_polynomial_from_minors(sig, I, J)


def test_scalar_kernel_shape():
    assert kernel_entry(OperatorSignature(3, 0, 0), (), ()) == scalar_kernel(3)
    k = kernel_matrix(OperatorSignature(2, 1, 1))
    assert set(k) == {((1,), (1,)), ((2,), (1,))}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_homogeneity_degree(n):
    for sig in all_signatures(n):
        for I, J in entry_pairs(sig):
            e = kernel_entry(sig, I, J)
            if e:
                assert e.homogeneity_degree() == Affine.of(LAMBDA - NU - n)


def test_kernel_canonical_form_absorbs_xn_powers():
    n = 2
    base = scalar_kernel(n)
    # |x_n|^{b}·x_n² is the same function as |x_n|^{b+2}
    moved = KernelExpression.monomial(n, a_normalizer(0, LAMBDA, NU, n), -NU, LAMBDA + NU - n - 2, 0, x(n, 2) ** 2)
    assert moved == base
    assert base - base == KernelExpression(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kappa0_component_identities(n):
    for sig in all_signatures(n, (0,)):
        for I, J in entry_pairs(sig):
            assert component_identity_check(sig, I, J).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kappa1_component_identities_with_derived_constant(n):
    for sig in all_signatures(n, (1,)):
        for I, J in entry_pairs(sig):
            assert component_identity_check(sig, I, J, derived_kappa1_numerator()).passed


def test_derived_kappa1_numerator():
    assert derived_kappa1_numerator() == 8


def test_kappa1_with_quoted_numerator_fails_wherever_g_is_nonzero():
    for sig in all_signatures(3, (1,)):
        for I, J in entry_pairs(sig):
            ok = component_identity_check(sig, I, J).passed
            assert ok == (not g_polynomial(sig, I, J))


@given(st.integers(1, 4), st.integers(0, 1), st.data())
def test_entry_value_matches_float_evaluation(n, kappa, data):
    from sbo_kit.numeric import evaluate_kernel

    sigs = all_signatures(n, (kappa,))
    sig = data.draw(st.sampled_from(sigs))
    I, J = data.draw(st.sampled_from(entry_pairs(sig)))
    pt = [data.draw(st.floats(0.3, 2.0)) * data.draw(st.sampled_from([-1, 1])) for _ in range(n)]
    e = kernel_entry(sig, I, J)
    lam, nu = 9.5, 0.3
    assert e(pt, lam, nu) == pytest.approx(evaluate_kernel(e, pt, lam, nu), rel=1e-10, abs=1e-14)
