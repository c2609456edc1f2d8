from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbo_kit.indices import OperatorSignature, all_signatures
from sbo_kit.vanishing import (
    L_EVEN,
    L_ODD,
    admissible,
    isolated_zero_check,
    vanish_branch,
    vanish_bruteforce,
    vanish_classifier,
    vanish_grid_check,
    zero_locus,
)


def test_lattices():
    assert (0, 0) in L_EVEN and (-2, 0) in L_EVEN and (-3, -1) in L_EVEN
    assert (-1, 0) in L_ODD and (-1, 0) not in L_EVEN
    assert (2, 2) not in L_EVEN and (Fraction(1, 2), 0) not in L_EVEN
    assert (-1, -2) not in L_EVEN


def test_classifier_examples():
    for n in (3, 4):
        for i in range(1, n):
            assert vanish_branch(i, i, OperatorSignature(n, i, i)) == "point (i,i)"
    assert vanish_branch(0, 0, OperatorSignature(3, 0, 0)) == "L_even"
    assert not vanish_classifier(2, 2, OperatorSignature(3, 0, 0))
    assert vanish_branch(1, 1, OperatorSignature(3, 2, 1)) == "point (n−i,n−i)"


def test_bruteforce_examples():
    for n in (2, 3, 4):
        for i in range(1, n + 1):
            if i <= n - 1:
                assert vanish_bruteforce(i, i, OperatorSignature(n, i, i))
    assert vanish_bruteforce(-1, -1, OperatorSignature(3, 0, 0))
    assert not vanish_bruteforce(2, 2, OperatorSignature(3, 0, 0))


def test_admissible():
    assert admissible(0, 2, 0) and admissible(0, 3, 1)
    assert not admissible(0, 1, 0) and not admissible(2, 0, 0) and not admissible(0, Fraction(1, 2), 0)


@pytest.mark.parametrize("n", [2, 3])
def test_grid(n):
    assert all(r.passed for r in vanish_grid_check(n, -4, 4))


@given(st.integers(2, 4), st.integers(-6, 6), st.integers(0, 6), st.data())
def test_classifier_equals_bruteforce_random(n, lam, gap, data):
    sig = data.draw(st.sampled_from(all_signatures(n, (gap % 2,))))
    assert vanish_classifier(lam, lam + gap, sig) == vanish_bruteforce(lam, lam + gap, sig)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_isolated_zeros_in_interior_degrees(n):
    assert all(r.passed for r in isolated_zero_check(n))


def test_boundary_degrees_carry_a_factor_nu():
    # at i = 0 the operator is ν/2 times Juhl's, so λ = −l kills it for every l
    for l in range(4):
        assert zero_locus(OperatorSignature(3, 0, 0, l % 2), l) == [Fraction(-l)]
