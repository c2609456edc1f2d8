"""Renormalized Gegenbauer polynomials, the inflation map and their relations."""

from __future__ import annotations

from math import factorial

from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, ONE, RationalFunction, rf


class ParamPolynomial(MultiPolynomial):
    """Polynomial in one variable z over QQ(λ, ν)."""

    __slots__ = ()

    @classmethod
    def from_coeffs(cls, coeffs: dict[int, RationalFunction] | None = None):
        """Build from {exponent of z: coefficient}."""
        return cls(1, {(e,): c for e, c in (coeffs or {}).items()})

    def _symbol(self, k):
        return "z"

    def coeff(self, e: int) -> RationalFunction:
        return self.coefficient((e,))

    def theta(self) -> "ParamPolynomial":
        """θ = z d/dz."""
        return type(self)._from_clean(1, {e: c * e[0] for e, c in self.terms.items() if e[0]})

    def dz(self) -> "ParamPolynomial":
        return self.derivative(1)

    def parity_degree(self) -> int | None:
        """l such that only z^{l−2j} occur; None if parities mix."""
        if not self.terms:
            return None
        degs = {e[0] for e in self.terms}
        top = max(degs)
        return top if all((top - d) % 2 == 0 for d in degs) else None

    def in_even_space(self, l: int) -> bool:
        return all(e[0] <= l and (l - e[0]) % 2 == 0 for e in self.terms)


class BiPolynomial(MultiPolynomial):
    """Polynomial in (s, t) over QQ(λ, ν)."""

    __slots__ = ()

    @classmethod
    def from_coeffs(cls, coeffs: dict[tuple[int, int], RationalFunction] | None = None):
        return cls(2, coeffs)

    def _symbol(self, k):
        return "st"[k - 1]

    def weighted_homogeneous(self, l: int) -> bool:
        """(I_l g)(s², t) is homogeneous of degree l: 2·deg_s + deg_t = l."""
        return all(2 * a + b == l for a, b in self.terms)


def pochhammer(x, k: int) -> RationalFunction:
    """(x)_k = x(x+1)…(x+k−1)."""
    out = ONE
    for u in range(k):
        out = out * (x + u)
    return out


def gegenbauer_renormalized(l: int, alpha=LAMBDA) -> ParamPolynomial:
    """C̃_l^α with the Gamma quotients written as Pochhammer symbols.

    Γ(l−k+α)/Γ(α+⌈l/2⌉) = (α+⌈l/2⌉)_{l−k−⌈l/2⌉}, a polynomial since k ≤ ⌊l/2⌋.
    """
    if l < 0:
        return ParamPolynomial.zero(1)
    alpha = rf(alpha)
    c = (l + 1) // 2
    terms = {}
    for k in range(l // 2 + 1):
        e = l - 2 * k
        w = RationalFunction((-1) ** k * 2**e) / (factorial(k) * factorial(e))
        terms[e] = w * pochhammer(alpha + c, l - k - c)
    return ParamPolynomial.from_coeffs(terms)


def parity_gamma(mu, a: int) -> RationalFunction:
    """γ(μ, a): 1 for odd a, μ + a/2 for even a."""
    if a < 0:
        raise ValueError("a must be non-negative")
    return ONE if a % 2 else rf(mu) + RationalFunction(a) / 2


def inflate(l: int, g: ParamPolynomial) -> BiPolynomial:
    """I_l: Σ a_j z^{l−2j} ↦ Σ a_j s^j t^{l−2j}."""
    if not g.in_even_space(l):
        raise ValueError(f"polynomial {g} is not in Pol_{l}[z]_even")
    return BiPolynomial.from_coeffs({((l - e[0]) // 2, e[0]): c for e, c in g.terms.items()})


def deflate(l: int, h: BiPolynomial) -> ParamPolynomial:
    """Inverse of ``inflate`` on weighted-homogeneous input."""
    if not h.weighted_homogeneous(l):
        raise ValueError("not weighted homogeneous of the requested degree")
    return ParamPolynomial.from_coeffs({b: c for (a, b), c in h.terms.items()})


# -- relation checks ------------------------------------------------------
# Each returns (lhs, rhs) so callers can report both canonical forms.


def lowering_relation(l: int, alpha=LAMBDA):
    """(l − θ)C̃_l^α = −2 C̃_{l−2}^{α+1}."""
    c = gegenbauer_renormalized(l, alpha)
    return c.scale(l) - c.theta(), gegenbauer_renormalized(l - 2, rf(alpha) + 1).scale(-2)


def raising_relation(l: int, alpha=LAMBDA):
    """d/dz C̃_l^α = 2γ(α, l) C̃_{l−1}^{α+1}."""
    lhs = gegenbauer_renormalized(l, alpha).dz()
    rhs = gegenbauer_renormalized(l - 1, rf(alpha) + 1).scale(2 * parity_gamma(alpha, l))
    return lhs, rhs


def three_term_relation(a: int, mu=LAMBDA, shift: int = 2):
    """(μ+a)C̃_a^μ + C̃_{a−shift}^{μ+1} = (μ+⌈a/2⌉)C̃_a^{μ+1}.

    The identity holds with ``shift=2``; ``shift=1`` is the other index
    that circulates for it and is kept to demonstrate that it fails.
    """
    mu = rf(mu)
    lhs = gegenbauer_renormalized(a, mu).scale(mu + a) + gegenbauer_renormalized(a - shift, mu + 1)
    rhs = gegenbauer_renormalized(a, mu + 1).scale(mu + (a + 1) // 2)
    return lhs, rhs


def inflation_s_relation(l: int, g: ParamPolynomial):
    """∂_s(I_l g) = ½ I_{l−2}((l − θ)g)."""
    lhs = inflate(l, g).derivative(1)
    lowered = g.scale(l) - g.theta()
    if l < 2:
        return lhs, BiPolynomial.zero(2)
    return lhs, inflate(l - 2, lowered).scale(RationalFunction(1) / 2)


def inflation_t_relation(l: int, g: ParamPolynomial):
    """∂_t(I_l g) = I_{l−1}(g′)."""
    lhs = inflate(l, g).derivative(2)
    if l < 1:
        return lhs, BiPolynomial.zero(2)
    return lhs, inflate(l - 1, g.dz())
