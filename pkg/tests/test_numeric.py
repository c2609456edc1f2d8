import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from sbo_kit.indices import OperatorSignature
from sbo_kit.kernels import kernel_entry, reflection_minor, scalar_kernel
from sbo_kit.numeric import (
    ConvergenceError,
    TestForm,
    apply_at_origin_exact,
    apply_at_origin_numeric,
    direct_component_rhs,
    direct_entry,
    evaluate_kernel,
    homogeneity_ratio,
    integrate_pairing,
    reflection_minor_numeric,
    relative_difference,
    scalar_gaussian_closed_form,
)
from sbo_kit.operators import juhl_symbol
from sbo_kit.polynomial import MultiPolynomial


def test_scalar_kernel_value():
    want = 1 / (gamma(5 / 2) * gamma(3))
    assert evaluate_kernel(scalar_kernel(2), [1, 1], 6, 0) == pytest.approx(want, rel=1e-13)


def test_singular_points_rejected():
    with pytest.raises(ValueError):
        evaluate_kernel(scalar_kernel(2), [1, 0], 6, 0)
    with pytest.raises(ValueError):
        evaluate_kernel(scalar_kernel(2), [0, 0], 6, 0)


def test_normalized_kernel_is_finite_at_gamma_poles():
    # 1/Γ((λ−ν)/2) is entire and vanishes at λ − ν = 0
    assert evaluate_kernel(scalar_kernel(2), [1, 1], 3, 3) == 0


def test_gamma_pole_in_numerator_reported():
    from sbo_kit.gamma import Affine, GammaProduct
    from sbo_kit.kernels import KernelExpression

    e = KernelExpression.monomial(2, GammaProduct(1, 0, {Affine(1, 0, 0): 1}), 0, 2)
    with pytest.raises(ValueError, match="pole"):
        evaluate_kernel(e, [1, 1], -1, 0)


def test_convergence_guard():
    with pytest.raises(ConvergenceError):
        integrate_pairing(scalar_kernel(2), TestForm.gaussian(2), 4, 0.5)


def test_off_hyperplane_point_rejected():
    with pytest.raises(ValueError):
        integrate_pairing(scalar_kernel(2), TestForm.gaussian(2), 9, 0.5, x0=[0, 1])


@pytest.mark.parametrize("n,lam,nu", [(1, 7.0, 0.5), (2, 9.0, 0.5), (3, 11.0, -0.4)])
def test_scalar_gaussian_closed_form(n, lam, nu):
    got = integrate_pairing(scalar_kernel(n), TestForm.gaussian(n), lam, nu, 1e-10)
    assert got.status == "converged"
    assert relative_difference(got.value, scalar_gaussian_closed_form(n, lam, nu)) <= 1e-8


def test_halving_tolerance_is_consistent():
    f = TestForm(2, {(0, 0): 1.0, (1, 1): 0.5})
    entry = kernel_entry(OperatorSignature(2, 1, 1), (1,), (1,))
    a = integrate_pairing(entry, f, 10.0, 0.3, 1e-6, x0=[0.2, 0])
    b = integrate_pairing(entry, f, 10.0, 0.3, 5e-7, x0=[0.2, 0])
    assert abs(a.value - b.value) <= 10 * (a.error + b.error) + 1e-14


def test_kappa0_component_pairing():
    sig = OperatorSignature(2, 1, 1, 0)
    f, x0 = TestForm.gaussian(2), (0.35, 0.0)
    lhs = integrate_pairing(direct_entry(sig, (1,), (1,), 12.3, 0.7), f, 12.3, 0.7, 1e-9, x0)
    rhs = integrate_pairing(direct_component_rhs(sig, (1,), (1,), 12.3, 0.7), f, 12.3, 0.7, 1e-9, x0)
    assert relative_difference(lhs.value, rhs.value) <= 1e-6


def test_kappa1_component_pairing_with_derived_constant():
    sig = OperatorSignature(2, 1, 0, 1)
    f, x0 = TestForm.gaussian(2), (0.35, 0.0)
    lhs = integrate_pairing(direct_entry(sig, (2,), (), 11.5, 0.25), f, 11.5, 0.25, 1e-9, x0)
    rhs = integrate_pairing(direct_component_rhs(sig, (2,), (), 11.5, 0.25, 8.0), f, 11.5, 0.25, 1e-9, x0)
    assert relative_difference(lhs.value, rhs.value) <= 1e-6
    printed = integrate_pairing(direct_component_rhs(sig, (2,), (), 11.5, 0.25, 2.0), f, 11.5, 0.25, 1e-9, x0)
    assert lhs.value / printed.value == pytest.approx(4.0, rel=1e-6)


def test_direct_entry_agrees_with_symbolic_entry():
    sig = OperatorSignature(3, 2, 1, 1)
    pts = np.array([[0.3, -0.7, 0.9], [1.1, 0.2, -0.4]])
    f = direct_entry(sig, (1, 3), (2,), 10.2, 0.4)
    e = kernel_entry(sig, (1, 3), (2,))
    for p, v in zip(pts, f(pts)):
        assert v == pytest.approx(evaluate_kernel(e, p, 10.2, 0.4).real, rel=1e-11)


@given(st.floats(0.2, 1.5), st.floats(0.2, 1.5), st.floats(6, 14), st.floats(-1, 1))
def test_homogeneity(x1, x2, lam, nu):
    e = kernel_entry(OperatorSignature(2, 1, 1), (2,), (1,))
    r = homogeneity_ratio(e, [x1, -x2], lam, nu)
    assert r.real == pytest.approx(2 ** (lam - nu - 2), rel=1e-12)


@given(st.lists(st.floats(-2, 2).filter(lambda v: abs(v) > 0.1), min_size=3, max_size=3))
def test_reflection_minors_numeric(x):
    for I, J in [((1,), (2,)), ((1, 2), (2, 3)), ((1, 3), (1, 3))]:
        exact = reflection_minor(3, I, J)(x)
        assert complex(exact).real == pytest.approx(reflection_minor_numeric(x, I, J), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("l", range(5))
def test_operator_semantics_against_numeric_differentiation(l):
    n = 2
    D = juhl_symbol(n, l)
    P = MultiPolynomial.monomial(n, (2, 0), 3) + MultiPolynomial.monomial(n, (0, 1), -1) + MultiPolynomial.constant(n, 2)
    lam = Fraction(7, 3)
    exact = float(apply_at_origin_exact(D, P, lam=lam).to_fraction())
    approx = apply_at_origin_numeric(D, P, lam=lam)
    assert approx == pytest.approx(exact, rel=1e-6, abs=1e-9)


def test_test_form_values():
    f = TestForm(2, {(1, 0): 2.0})
    assert f([[1.0, 0.0]])[0] == pytest.approx(2 * math.exp(-1))
    assert f.degree == 1
