"""Kernels off the origin: reflection minors, g_{IJ}, normalized matrix kernels.

A kernel is a finite sum of terms

    prefactor · |x|^{2a} · |x_n|^{b} · sgn(x_n)^κ · P(x)

with a, b affine in (λ, ν), a Gamma-product prefactor and a polynomial P.
``KernelExpression`` keeps such sums in a canonical form so identities reduce
to a term-by-term comparison.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from sbo_kit.gamma import Affine, GammaProduct, a_normalizer
from sbo_kit.indices import IndexSet, OperatorSignature, index_sets, project_basis, s_polynomial
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, NU, RationalFunction, rf
from sbo_kit.report import VerificationReport

# -- reflection and its minors --------------------------------------------


def psi_matrix(n: int) -> list[list[MultiPolynomial]]:
    """|x|²·ψ(x) = |x|²I − 2xxᵀ."""
    r2 = MultiPolynomial.square_norm(n)
    xs = [MultiPolynomial.variable(n, k) for k in range(1, n + 1)]
    return [
        [(r2 if p == q else MultiPolynomial.zero(n)) - (xs[p] * xs[q]).scale(2) for q in range(n)]
        for p in range(n)
    ]


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        k, length = start, 0
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def determinant(rows: list[list]):
    """Leibniz expansion; entries need +, * and scale(int)."""
    size = len(rows)
    if size == 0:
        return None
    total = None
    for perm in permutations(range(size)):
        term = rows[0][perm[0]]
        for r in range(1, size):
            term = term * rows[r][perm[r]]
        term = term.scale(_perm_sign(perm)) if hasattr(term, "scale") else term * _perm_sign(perm)
        total = term if total is None else total + term
    return total


def compound_matrix(A: list[list], i: int) -> dict[tuple[IndexSet, IndexSet], object]:
    """σ^{(i)}(A) as {(rows, cols): minor}, over any ring with + and *."""
    n = len(A)
    out = {}
    for R in index_sets(n, i):
        for C in index_sets(n, i):
            sub = [[A[r - 1][c - 1] for c in C] for r in R]
            out[(R, C)] = _det_numeric(sub)
    return out


def _det_numeric(rows):
    if not rows:
        return Fraction(1)
    total = 0
    for perm in permutations(range(len(rows))):
        term = Fraction(_perm_sign(perm))
        for r, c in enumerate(perm):
            term *= rows[r][c]
        total += term
    return total


def reflection_minor(n: int, I: IndexSet, J: IndexSet) -> MultiPolynomial:
    """|x|²·(minor of ψ(x) with rows I, columns J).

    The minor of |x|²ψ is divisible by |x|^{2(i−1)}; division is exact.
    """
    I, J = tuple(I), tuple(J)
    if len(I) != len(J):
        raise ValueError("minor needs #I = #J")
    r2 = MultiPolynomial.square_norm(n)
    if not I:
        return r2
    M = psi_matrix(n)
    det = determinant([[M[p - 1][q - 1] for q in J] for p in I])
    out = det
    for _ in range(len(I) - 1):
        out = out.divide_exact(r2)
    return out


def g_polynomial(sig: OperatorSignature, I: IndexSet, J: IndexSet) -> MultiPolynomial:
    """g_{IJ}: −S_{JI} for j = i, (−1)^i S_{J∪{n}, I} for j = i − 1."""
    I, J = tuple(I), tuple(J)
    n = sig.n
    if len(I) != sig.i or len(J) != sig.j or (I and I[-1] > n) or (J and J[-1] > n - 1):
        raise ValueError(f"invalid index sets {I}, {J} for {sig}")
    if sig.j == sig.i:
        return -s_polynomial(J, I, n)
    return s_polynomial(tuple(sorted(J + (n,))), I, n).scale((-1) ** sig.i)


def g_polynomial_from_minors(sig: OperatorSignature, I: IndexSet, J: IndexSet) -> MultiPolynomial:
    """|x|²⟨pr∘σ^{(i)}(ψ(x)) e_I, e_J^∨⟩ assembled from reflection minors."""
    out = MultiPolynomial.zero(sig.n)
    for K in index_sets(sig.n, sig.i):
        image = project_basis(sig, K)
        if image is not None and image[1] == tuple(J):
            out = out + reflection_minor(sig.n, K, tuple(I)).scale(image[0])
    return out


# -- kernel expressions ---------------------------------------------------


@dataclass(frozen=True)
class KernelTerm:
    prefactor: GammaProduct
    a: Affine  # exponent of |x|²
    b: Affine  # exponent of |x_n|
    kappa: int
    poly: MultiPolynomial

    def __str__(self):
        parts = []
        if self.prefactor != 1:
            parts.append(str(self.prefactor))
        if self.a != Affine():
            parts.append(f"|x|^({self.a * 2})")
        if self.b != Affine():
            parts.append(f"|x_n|^({self.b})")
        if self.kappa:
            parts.append("sgn(x_n)")
        p = str(self.poly)
        parts.append(p if len(self.poly.terms) == 1 else f"({p})")
        return " · ".join(parts)


def _affine_class(f: Affine):
    return (f.lam, f.nu, f.const - (f.const.numerator // f.const.denominator))


def _xn_power(n: int, k: int) -> MultiPolynomial:
    return MultiPolynomial.monomial(n, [0] * (n - 1) + [k])


def _shift_xn(poly: MultiPolynomial, k: int) -> MultiPolynomial:
    return MultiPolynomial(poly.n, {e[:-1] + (e[-1] - k,): c for e, c in poly.terms.items()})


def _canonical_terms(n: int, terms) -> tuple[KernelTerm, ...]:
    groups: dict = defaultdict(list)
    for t in terms:
        if not t.poly or not t.prefactor:
            continue
        trans = t.prefactor.transcendental_part()
        poly = t.poly.scale(t.prefactor.multiplier)
        a, b = t.a, t.b
        if n == 1:
            a, b = Affine(), b + a * 2
        groups[(trans, _affine_class(a), _affine_class(b))].append((a, b, t.kappa % 2, poly))
    r2 = MultiPolynomial.square_norm(n)
    out = []
    for (trans, _, _), items in groups.items():
        a0 = min((a for a, *_ in items), key=lambda f: f.const)
        b0 = min((b for _, b, *_ in items), key=lambda f: f.const)
        acc = {0: MultiPolynomial.zero(n), 1: MultiPolynomial.zero(n)}
        for a, b, k, p in items:
            da, db = int(a.const - a0.const), int(b.const - b0.const)
            acc[(k + db) % 2] = acc[(k + db) % 2] + p * r2**da * _xn_power(n, db)
        # |x_n|^{b0}(A_0 + sgn·A_1): odd parts in x_n trade one x_n for |x_n|·sgn
        pieces = defaultdict(lambda: MultiPolynomial.zero(n))
        for k, p in acc.items():
            even = MultiPolynomial(n, {e: c for e, c in p.terms.items() if e[-1] % 2 == 0})
            odd = MultiPolynomial(n, {e: c for e, c in p.terms.items() if e[-1] % 2})
            pieces[(0, k)] = pieces[(0, k)] + even
            pieces[(1, 1 - k)] = pieces[(1, 1 - k)] + _shift_xn(odd, 1)
        for (eps, k), F in pieces.items():
            if not F:
                continue
            f = min(e[-1] for e in F.terms)
            F = _shift_xn(F, f)
            extra = 0
            if n >= 2:
                extra, F = F.max_power_dividing(r2)
            out.append(KernelTerm(trans, a0 + extra, b0 + eps + f, k, F))
    out.sort(key=lambda t: (str(t.prefactor), t.a, t.b, t.kappa))
    return tuple(out)


class KernelExpression:
    """Canonical sum of kernel terms in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=()):
        self.n = n
        self.terms = _canonical_terms(n, list(terms))

    @classmethod
    def monomial(cls, n, prefactor, a, b, kappa=0, poly=None):
        poly = MultiPolynomial.constant(n, 1) if poly is None else poly
        return cls(n, [KernelTerm(_as_gamma(prefactor), Affine.of(a), Affine.of(b), kappa, poly)])

    def __add__(self, other: "KernelExpression"):
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return KernelExpression(self.n, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "KernelExpression":
        g = _as_gamma(c)
        return KernelExpression(self.n, [_replace(t, prefactor=t.prefactor * g) for t in self.terms])

    def times_polynomial(self, p: MultiPolynomial) -> "KernelExpression":
        return KernelExpression(self.n, [_replace(t, poly=t.poly * p) for t in self.terms])

    def __eq__(self, other):
        if not isinstance(other, KernelExpression):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def __bool__(self):
        return bool(self.terms)

    def homogeneity_degree(self) -> Affine:
        """Common degree 2a + b + deg P of all terms."""
        degs = set()
        for t in self.terms:
            if not t.poly.is_homogeneous():
                raise ValueError("polynomial part is not homogeneous")
            degs.add(t.a * 2 + t.b + t.poly.degree)
        if len(degs) != 1:
            raise ValueError(f"terms have different degrees {degs}")
        return degs.pop()

    def __call__(self, x, lam, nu) -> complex:
        """Numeric value at x (x ≠ 0, x_n ≠ 0)."""
        x = [complex(v).real for v in x]
        r2 = sum(v * v for v in x)
        xn = x[-1]
        if r2 == 0 or xn == 0:
            raise ZeroDivisionError("kernel evaluated on x = 0 or x_n = 0")
        total = 0j
        for t in self.terms:
            pre = t.prefactor(lam, nu)
            val = pre * complex(r2) ** t.a(lam, nu) * complex(abs(xn)) ** t.b(lam, nu)
            if t.kappa:
                val *= 1 if xn > 0 else -1
            total += val * complex(t.poly(x, lam, nu))
        return total

    def __str__(self):
        return " + ".join(map(str, self.terms)) if self.terms else "0"

    def __repr__(self):
        return f"KernelExpression(n={self.n}, {self})"


def _replace(t: KernelTerm, **kw) -> KernelTerm:
    d = dict(prefactor=t.prefactor, a=t.a, b=t.b, kappa=t.kappa, poly=t.poly)
    d.update(kw)
    return KernelTerm(**d)


def _as_gamma(c) -> GammaProduct:
    return c if isinstance(c, GammaProduct) else GammaProduct(c)


# -- the kernels ----------------------------------------------------------


def scalar_kernel(n: int, lam=LAMBDA, nu=NU) -> KernelExpression:
    """Ã⁺_{λ,ν} = a₊(λ,ν)|x|^{−2ν}|x_n|^{λ+ν−n}."""
    lam, nu = rf(lam), rf(nu)
    return KernelExpression.monomial(n, a_normalizer(0, lam, nu, n), -nu, lam + nu - n)


def kernel_entry(sig: OperatorSignature, I: IndexSet, J: IndexSet, lam=LAMBDA, nu=NU) -> KernelExpression:
    lam, nu = rf(lam), rf(nu)
    return KernelExpression.monomial(
        sig.n,
        a_normalizer(sig.kappa, lam, nu, sig.n),
        -nu - 1,
        lam + nu - sig.n,
        sig.kappa,
        g_polynomial(sig, I, J),
    )


def kernel_matrix(sig: OperatorSignature, lam=LAMBDA, nu=NU) -> dict[tuple[IndexSet, IndexSet], KernelExpression]:
    """Normalized kernel Ã^{i,j}_{λ,ν,±} entrywise."""
    return {(I, J): kernel_entry(sig, I, J, lam, nu) for I in sig.sources for J in sig.targets}


PRINTED_KAPPA1_NUMERATOR = Fraction(2)


def reduction_constant(kappa: int, n: int, kappa1_numerator=PRINTED_KAPPA1_NUMERATOR) -> RationalFunction:
    """Scalar in front of the shifted scalar kernel in the component identities.

    κ=0: 2/(λ−ν−2).  κ=1: c/((λ+ν−n)(λ−ν−1)(λ−ν−3)) with c = ``kappa1_numerator``.
    The default c = 2 is the value usually quoted; ``derived_kappa1_numerator``
    recomputes it from the Gamma factors and gets 8.
    """
    lam, nu = LAMBDA, NU
    if kappa == 0:
        return rf(2) / (lam - nu - 2)
    return rf(kappa1_numerator) / ((lam + nu - n) * (lam - nu - 1) * (lam - nu - 3))


def component_identity_rhs(sig: OperatorSignature, I, J, kappa1_numerator=PRINTED_KAPPA1_NUMERATOR) -> KernelExpression:
    n = sig.n
    g = g_polynomial(sig, I, J)
    c = reduction_constant(sig.kappa, n, kappa1_numerator)
    if sig.kappa == 0:
        return scalar_kernel(n, LAMBDA - 1, NU + 1).times_polynomial(g).scale(c)
    shifted = scalar_kernel(n, LAMBDA - 2, NU + 1)
    return shifted.times_polynomial(g * MultiPolynomial.variable(n, n)).scale(c)


def component_identity_check(
    sig: OperatorSignature, I, J, kappa1_numerator=PRINTED_KAPPA1_NUMERATOR
) -> VerificationReport:
    """Entry (I, J) of Ã^{i,j}_{±} against the constant times g_{IJ} times the shifted scalar kernel."""
    start = time.perf_counter()
    lhs = kernel_entry(sig, I, J)
    rhs = component_identity_rhs(sig, I, J, kappa1_numerator)
    ok = lhs == rhs
    return VerificationReport(
        "components",
        f"{sig} I={_fmt(I)} J={_fmt(J)}",
        ok,
        "" if ok else str(lhs),
        "" if ok else str(rhs),
        (time.perf_counter() - start) * 1000,
    )


def _fmt(I) -> str:
    return "{" + ",".join(map(str, I)) + "}"


def derived_kappa1_numerator() -> Fraction:
    """Numerator forced by Γ(z+1) = zΓ(z) for the κ=1 identity."""
    ratio = a_normalizer(1, LAMBDA, NU, 2) / a_normalizer(0, LAMBDA - 2, NU + 1, 2)
    if not ratio.is_rational:
        raise ArithmeticError("ratio is not rational")
    target = (LAMBDA + NU - 2) * (LAMBDA - NU - 1) * (LAMBDA - NU - 3)
    return (ratio.multiplier * target).to_fraction()
