"""The Weyl algebra ℂ[x, ∂] in n variables and distributions supported at 0.

Elements are stored in normal order, x-factors left of ∂-factors.  A
distribution ``P·δ`` is represented by the x-free operator ``D`` with
``P·δ = D·δ``; we get it by anti-normal ordering (pushing every x to the
right, where it hits δ and dies).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, factorial, perm
from typing import Iterable

from sbo_kit._text import MINUS, superscript
from sbo_kit.polynomial import Exps, MultiPolynomial
from sbo_kit.rational import ZERO, RationalFunction, rf

WKey = tuple[Exps, Exps]


@lru_cache(maxsize=None)
def _commute_1d(b: int, c: int) -> tuple[tuple[int, int], ...]:
    """∂^b x^c = Σ_k C(b,k)·c!/(c−k)!·x^{c−k}∂^{b−k}; returns (k, coefficient)."""
    return tuple((k, comb(b, k) * perm(c, k)) for k in range(min(b, c) + 1))


@lru_cache(maxsize=None)
def _anti_1d(a: int, b: int) -> tuple[tuple[int, int], ...]:
    """x^a∂^b = Σ_k (−1)^k k!·C(a,k)·C(b,k)·∂^{b−k}x^{a−k}."""
    return tuple(
        (k, (-1) ** k * factorial(k) * comb(a, k) * comb(b, k)) for k in range(min(a, b) + 1)
    )


def _accumulate(out: dict, key, c):
    s = out.get(key, ZERO) + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


class WeylElement:
    """Finite sum of c·x^α∂^β."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[WKey, RationalFunction] | None = None):
        self.n = n
        clean = {}
        for (a, b), c in (terms or {}).items():
            if len(a) != n or len(b) != n:
                raise ValueError(f"multi-index length does not match dimension {n}")
            c = rf(c)
            if c:
                clean[(tuple(a), tuple(b))] = c
        self.terms = clean

    @classmethod
    def _from_clean(cls, n, terms):
        obj = object.__new__(cls)
        obj.n, obj.terms = n, terms
        return obj

    @classmethod
    def zero(cls, n):
        return cls._from_clean(n, {})

    @classmethod
    def constant(cls, n, c=1):
        z = (0,) * n
        return cls(n, {(z, z): c})

    @classmethod
    def x(cls, n, p):
        e = [0] * n
        e[p - 1] = 1
        return cls(n, {(tuple(e), (0,) * n): 1})

    @classmethod
    def d(cls, n, p):
        e = [0] * n
        e[p - 1] = 1
        return cls(n, {((0,) * n, tuple(e)): 1})

    @classmethod
    def from_polynomial(cls, poly: MultiPolynomial):
        z = (0,) * poly.n
        return cls._from_clean(poly.n, {(e, z): c for e, c in poly.terms.items()})

    def _coerce(self, other):
        if isinstance(other, WeylElement):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, ConstCoeffOp):
            return other.to_weyl()
        if isinstance(other, MultiPolynomial):
            return WeylElement.from_polynomial(other)
        return WeylElement.constant(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return WeylElement._from_clean(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement._from_clean(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (WeylElement, ConstCoeffOp, MultiPolynomial)):
            return weyl_multiply(self, self._coerce(other))
        c = rf(other)
        return WeylElement(self.n, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, (ConstCoeffOp, MultiPolynomial)):
            return weyl_multiply(self._coerce(other), self)
        return self * other

    def __pow__(self, k: int):
        out = WeylElement.constant(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (WeylElement, ConstCoeffOp, MultiPolynomial)) or isinstance(
            other, (int, RationalFunction)
        ):
            o = self._coerce(other)
            return self.n == o.n and self.terms == o.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_x_free(self) -> bool:
        return all(not any(a) for a, _ in self.terms)

    def to_const_coeff(self) -> "ConstCoeffOp":
        if not self.is_x_free():
            raise ValueError("element has x-dependent coefficients")
        return ConstCoeffOp._from_clean(self.n, {b: c for (_, b), c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        order = sorted(self.terms, key=lambda t: (sum(t[0]) + sum(t[1]), t), reverse=True)
        for key in order:
            a, b = key
            c = self.terms[key]
            mon = "".join(
                [f"x_{k + 1}" + superscript(e) for k, e in enumerate(a) if e]
                + [f"∂_{k + 1}" + superscript(e) for k, e in enumerate(b) if e]
            )
            cs = str(c)
            neg = cs.startswith(MINUS) and not c.needs_parens
            mag = cs[1:] if neg else (f"({cs})" if c.needs_parens else cs)
            body = mon if (mag == "1" and mon) else f"{mag} {mon}".strip()
            if not out:
                out = (MINUS if neg else "") + body
            else:
                out += (f" {MINUS} " if neg else " + ") + body
        return out

    __repr__ = __str__


def weyl_multiply(P: WeylElement, Q: WeylElement) -> WeylElement:
    """Normal-ordered product using ∂_p x_p = x_p ∂_p + 1."""
    if P.n != Q.n:
        raise ValueError(f"dimension mismatch: {P.n} vs {Q.n}")
    n = P.n
    out: dict[WKey, RationalFunction] = {}
    for (a1, b1), c1 in P.terms.items():
        for (a2, b2), c2 in Q.terms.items():
            c = c1 * c2
            per_var = [_commute_1d(b1[p], a2[p]) for p in range(n)]
            for choice in product(*per_var):
                coeff = 1
                for _, w in choice:
                    coeff *= w
                alpha = tuple(a1[p] + a2[p] - choice[p][0] for p in range(n))
                beta = tuple(b1[p] - choice[p][0] + b2[p] for p in range(n))
                _accumulate(out, (alpha, beta), c * coeff)
    return WeylElement._from_clean(n, out)


def commutator(P, Q) -> WeylElement:
    return P * Q - Q * P


def anti_normal_order(P: WeylElement) -> dict[WKey, RationalFunction]:
    """Rewrite P as Σ c·∂^β x^α; keys are (β, α), ∂-part first."""
    out: dict[WKey, RationalFunction] = {}
    n = P.n
    for (a, b), c in P.terms.items():
        for choice in product(*[_anti_1d(a[p], b[p]) for p in range(n)]):
            coeff = 1
            for _, w in choice:
                coeff *= w
            beta = tuple(b[p] - choice[p][0] for p in range(n))
            alpha = tuple(a[p] - choice[p][0] for p in range(n))
            _accumulate(out, (beta, alpha), c * coeff)
    return out


def reduce_mod_annihilator(P: WeylElement) -> "ConstCoeffOp":
    """The x-free D with P·δ = D·δ."""
    n = P.n
    zero = (0,) * n
    return ConstCoeffOp._from_clean(
        n, {beta: c for (beta, alpha), c in anti_normal_order(P).items() if alpha == zero}
    )


def reduce_product(poly: MultiPolynomial, D: "ConstCoeffOp") -> "ConstCoeffOp":
    """reduce_mod_annihilator(poly · D) without forming the full product.

    Only the fully contracted term of each anti-normal expansion survives:
    x^a∂^b·δ = (−1)^a·b!/(b−a)!·∂^{b−a}·δ per variable (zero if a > b).
    """
    if poly.n != D.n:
        raise ValueError(f"dimension mismatch: {poly.n} vs {D.n}")
    n = D.n
    out: dict[Exps, RationalFunction] = {}
    for a, c1 in poly.terms.items():
        for b, c2 in D.terms.items():
            if any(x > y for x, y in zip(a, b)):
                continue
            w = 1
            for x, y in zip(a, b):
                if x:
                    w *= (-1) ** x * perm(y, x)
            _accumulate(out, tuple(y - x for x, y in zip(a, b)), c1 * c2 * w)
    return ConstCoeffOp._from_clean(n, out)


class ConstCoeffOp(MultiPolynomial):
    """Constant-coefficient operator Σ c_β ∂^β, stored as its symbol in ∂.

    Read as a distribution it is D·δ.  Products are compositions, so the
    polynomial arithmetic of the base class applies unchanged.
    """

    __slots__ = ()
    var = "∂"

    @classmethod
    def partial(cls, n: int, p: int):
        return cls.variable(n, p)

    @classmethod
    def laplacian(cls, n: int, upto: int | None = None):
        """Δ over the first ``upto`` coordinates (all by default)."""
        return cls.square_norm(n, upto)

    def to_weyl(self) -> WeylElement:
        z = (0,) * self.n
        return WeylElement._from_clean(self.n, {(z, b): c for b, c in self.terms.items()})

    def apply(self, f: MultiPolynomial) -> MultiPolynomial:
        """D f for a polynomial f."""
        if f.n != self.n:
            raise ValueError("dimension mismatch")
        out = MultiPolynomial.zero(self.n)
        for beta, c in self.terms.items():
            g = f
            for p, e in enumerate(beta):
                for _ in range(e):
                    g = g.derivative(p + 1)
            out = out + g.scale(c)
        return out

    def order(self) -> int:
        return self.degree

    def embed(self, n: int) -> "ConstCoeffOp":
        """Same operator, viewed in n ≥ self.n variables."""
        pad = (0,) * (n - self.n)
        return ConstCoeffOp._from_clean(n, {e + pad: c for e, c in self.terms.items()})

    def drop_last(self) -> "ConstCoeffOp":
        """Reinterpret in n−1 variables; the last variable must not occur."""
        if any(e[-1] for e in self.terms):
            raise ValueError("operator involves the last variable")
        return ConstCoeffOp._from_clean(self.n - 1, {e[:-1]: c for e, c in self.terms.items()})


@lru_cache(maxsize=256)
def laplacian_power(n: int, k: int, upto: int | None = None) -> ConstCoeffOp:
    """Δ^k (over the first ``upto`` coordinates); cached, treat as read-only."""
    if k < 0:
        raise ValueError("negative power of the Laplacian")
    if k == 0:
        return ConstCoeffOp.constant(n, 1)
    return laplacian_power(n, k - 1, upto) * ConstCoeffOp.laplacian(n, upto)


@lru_cache(maxsize=64)
def _laplacian_weyl(n: int, k: int, upto: int | None) -> WeylElement:
    return laplacian_power(n, k, upto).to_weyl()


def laplacian(n: int, upto: int | None = None, k: int = 1) -> WeylElement:
    return _laplacian_weyl(n, k, upto)


def pair_delta_monomial(D: ConstCoeffOp, gamma: Iterable[int]) -> RationalFunction:
    """⟨D·δ, x^γ⟩ by integration by parts: (−1)^{|γ|}·γ!·[∂^γ]D."""
    gamma = tuple(gamma)
    c = D.coefficient(gamma)
    if not c:
        return ZERO
    w = (-1) ** sum(gamma)
    for g in gamma:
        w *= factorial(g)
    return c * w


def pair_delta_direct(P: WeylElement, gamma: Iterable[int]) -> RationalFunction:
    """⟨P·δ, x^γ⟩ computed from the normal-ordered P without any reduction.

    ⟨x^α∂^βδ, x^γ⟩ = (−1)^{|β|}·∂^β(x^{α+γ})(0) = (−1)^{|β|}·β!·[β = α+γ].
    """
    gamma = tuple(gamma)
    total = ZERO
    for (a, b), c in P.terms.items():
        if all(bb == aa + gg for aa, bb, gg in zip(a, b, gamma)):
            w = (-1) ** sum(b)
            for bb in b:
                w *= factorial(bb)
            total = total + c * w
    return total


def convolve_polynomial(D: ConstCoeffOp, f: MultiPolynomial) -> MultiPolynomial:
    """(D·δ) ∗ f, evaluated as x ↦ ⟨D·δ_y, f(x − y)⟩ monomial by monomial."""
    n = D.n
    out = MultiPolynomial.zero(n)
    for e, c in f.terms.items():
        # f-monomial x^e at x − y: Π_k Σ_j C(e_k, j) x^{e_k − j} (−y)^j
        for js in product(*[range(k + 1) for k in e]):
            w = 1
            for ek, j in zip(e, js):
                w *= comb(ek, j) * (-1) ** j
            pairing = pair_delta_monomial(D, js)
            if pairing:
                xe = tuple(ek - j for ek, j in zip(e, js))
                out = out + MultiPolynomial.monomial(n, xe, c * pairing * w)
    return out


# -- identity grids ------------------------------------------------------


def _lap_power(n: int, k: int, coeff) -> ConstCoeffOp:
    """coeff·Δ^k with the convention that a vanishing coefficient kills k < 0."""
    coeff = rf(coeff)
    if not coeff:
        return ConstCoeffOp.zero(n)
    if k < 0:
        raise ValueError(f"nonzero coefficient {coeff} on Δ^{k}")
    return laplacian_power(n, k) * coeff


def reduction_identities(n: int, k: int):
    """Yield (name, lhs, rhs) for the three mod-𝒥 reductions of x_p Δ^k etc."""
    lap_k = laplacian(n, k=k)
    d = ConstCoeffOp.partial
    for p in range(1, n + 1):
        xp = WeylElement.x(n, p)
        yield (
            f"x_{p}Δ^{k}",
            reduce_mod_annihilator(xp * lap_k),
            d(n, p) * _lap_power(n, k - 1, -2 * k) if k else ConstCoeffOp.zero(n),
        )
        yield (
            f"x_{p}²Δ^{k}",
            reduce_mod_annihilator(xp * xp * lap_k),
            d(n, p) ** 2 * _lap_power(n, k - 2, 4 * k * (k - 1)) + _lap_power(n, k - 1, 2 * k),
        )
        for q in range(1, n + 1):
            if q == p:
                continue
            yield (
                f"x_{p}x_{q}Δ^{k}",
                reduce_mod_annihilator(xp * WeylElement.x(n, q) * lap_k),
                d(n, p) * d(n, q) * _lap_power(n, k - 2, 4 * k * (k - 1)),
            )


def commutation_identities(n: int, k: int):
    """Yield (name, lhs, rhs) for [x_p, Δ^k], [x_p x_q, Δ^k], [x_p², Δ^k]."""
    lap_k = laplacian(n, k=k)

    def lap(j, c):
        return _lap_power(n, j, c).to_weyl()

    for p in range(1, n + 1):
        xp, dp = WeylElement.x(n, p), WeylElement.d(n, p)
        yield (f"[x_{p},Δ^{k}]", commutator(xp, lap_k), dp * lap(k - 1, -2 * k) if k else 0 * xp)
        yield (
            f"[x_{p}²,Δ^{k}]",
            commutator(xp * xp, lap_k),
            dp * dp * lap(k - 2, 4 * k * (k - 1))
            + lap(k - 1, 2 * k)
            + (dp * lap(k - 1, -4 * k) * xp if k else 0 * xp),
        )
        for q in range(1, n + 1):
            if q == p:
                continue
            xq, dq = WeylElement.x(n, q), WeylElement.d(n, q)
            rhs = dp * dq * lap(k - 2, 4 * k * (k - 1))
            if k:
                rhs = rhs + (dp * lap(k - 1, -2 * k) * xq + dq * lap(k - 1, -2 * k) * xp)
            yield (f"[x_{p}x_{q},Δ^{k}]", commutator(xp * xq, lap_k), rhs)
