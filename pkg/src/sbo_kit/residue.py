"""Residues of the normalized kernels: Weyl identities for Juhl kernels,
the reduction of g_{IJ}·𝒞 to C^{i,j}, and the closed residue formula."""

from __future__ import annotations

import time
from fractions import Fraction
from math import factorial

from sbo_kit.gamma import Affine, GammaProduct, ScaledOp, scalar_residue_constant
from sbo_kit.gegenbauer import parity_gamma
from sbo_kit.indices import IndexSet, OperatorSignature, index_sets
from sbo_kit.kernels import g_polynomial
from sbo_kit.operators import juhl_kernel, sbo_components, sbo_differential
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, RationalFunction
from sbo_kit.report import VerificationReport
from sbo_kit.weyl import ConstCoeffOp, reduce_product


def _fmt(I) -> str:
    return "{" + ",".join(map(str, I)) + "}"


def _report(suite, case, lhs, rhs, start, detail="") -> VerificationReport:
    ok = lhs == rhs
    return VerificationReport(
        suite, case, ok, "" if ok else str(lhs), "" if ok else str(rhs),
        (time.perf_counter() - start) * 1000, detail,
    )


def aggregate(suite: str, case: str, reports: list[VerificationReport]) -> VerificationReport:
    """One report for many: passes iff all pass, otherwise carries the first failure."""
    millis = sum(r.millis for r in reports)
    bad = [r for r in reports if not r.passed]
    if not bad:
        return VerificationReport(suite, case, True, millis=millis, detail=f"{len(reports)} checks")
    first = bad[0]
    return VerificationReport(
        suite, case, False, first.lhs, first.rhs, millis,
        f"{len(bad)}/{len(reports)} failed, first: {first.case}",
    )


# -- Juhl kernels in the Weyl algebra -------------------------------------


def _x(n, *ks) -> MultiPolynomial:
    out = MultiPolynomial.constant(n, 1)
    for k in ks:
        out = out * MultiPolynomial.variable(n, k)
    return out


def juhl_weyl_cases(n: int, l: int):
    """Yield (name, lhs, rhs) for the Juhl-kernel identities at ν − λ = l.

    K(g, μ) denotes 𝒞_{μ, μ+g}; every left side is reduced modulo the
    annihilator of δ.
    """
    lam = LAMBDA
    nu = lam + l
    d = ConstCoeffOp.partial
    K = lambda gap, base: juhl_kernel(n, gap, base)  # noqa: E731
    shift = lam - Fraction(n - 1, 2) + (l + 1) // 2
    gam = parity_gamma(lam - Fraction(n - 1, 2), l)
    big = K(l + 2, lam - 1)
    for p in range(1, n):
        yield f"x_{p}·C l={l}", reduce_product(_x(n, p), K(l, lam)), (d(n, p) * K(l - 2, lam + 1)).scale(-2)
    yield f"x_n·C l={l}", reduce_product(_x(n, n), K(l, lam)), K(l - 1, lam + 1).scale(-2 * gam)
    for p in range(1, n):
        yield (
            f"x_{p}x_n·C l={l}",
            reduce_product(_x(n, p, n), big),
            (d(n, p) * K(l - 1, lam + 1)).scale(4 * gam),
        )
        yield (
            f"x_{p}²·C l={l}",
            reduce_product(_x(n, p, p), big),
            (d(n, p) ** 2 * K(l - 2, lam + 1)).scale(4) + K(l, lam).scale(2),
        )
        for q in range(p + 1, n):
            yield (
                f"x_{p}x_{q}·C l={l}",
                reduce_product(_x(n, p, q), big),
                (d(n, p) * d(n, q) * K(l - 2, lam + 1)).scale(4),
            )
    xn2 = reduce_product(_x(n, n, n), big)
    yield f"x_n²·C (first form) l={l}", xn2, K(l, lam + 1).scale(4 * shift)
    lap_t = ConstCoeffOp.laplacian(n, n - 1)
    yield (
        f"x_n²·C (second form) l={l}",
        xn2,
        K(l, lam).scale(2 * (2 * nu - n + 1)) - (lap_t * K(l - 2, lam + 1)).scale(4),
    )
    q_tan = MultiPolynomial.square_norm(n, n - 1)
    yield (
        f"Q·C l={l}",
        reduce_product(q_tan, big),
        K(l, lam).scale(4 * nu) - K(l, lam + 1).scale(4 * shift),
    )


def juhl_weyl_reports(n: int, lmax: int) -> list[VerificationReport]:
    out = []
    for l in range(lmax + 1):
        for name, lhs, rhs in juhl_weyl_cases(n, l):
            start = time.perf_counter()
            out.append(_report("weyl", f"n={n} {name}", lhs, rhs, start))
    return out


def juhl_weyl_identities(n: int, lmax: int) -> VerificationReport:
    if n < 2:
        raise ValueError("n ≥ 2 required")
    return aggregate("weyl", f"juhl n={n} l≤{lmax}", juhl_weyl_reports(n, lmax))


# -- residue constants ----------------------------------------------------


def _nu(m: int, kappa: int) -> RationalFunction:
    return LAMBDA + (2 * m + kappa)


def reduce_constant(n: int, m: int, kappa: int) -> GammaProduct:
    """Constant in front of the reduced g·𝒞 term of the residue, ν = λ + 2m + κ."""
    nu = _nu(m, kappa)
    gamma_nu1 = {Affine.of(nu + 1): -1}
    head = RationalFunction((-1) ** m * factorial(m))
    if kappa == 0:
        return GammaProduct(head / 2 ** (2 * m + 2), n - 1, gamma_nu1)
    return GammaProduct(head / (2 ** (2 * m + 5) * (LAMBDA + nu - n)), n - 1, gamma_nu1)


def theorem_constant(sig: OperatorSignature, m: int) -> GammaProduct:
    """(−1)^{i−j+m+κ} π^{(n−1)/2} m! / (2^{2m−1+3κ} Γ(ν+1))."""
    k = sig.kappa
    sign = (-1) ** (sig.i - sig.j + m + k)
    return GammaProduct(
        RationalFunction(sign * factorial(m)) / Fraction(2) ** (2 * m - 1 + 3 * k),
        sig.n - 1,
        {Affine.of(_nu(m, k) + 1): -1},
    )


def residue_reduce(sig: OperatorSignature, m: int, I: IndexSet, J: IndexSet) -> ScaledOp:
    """Residue of (Ã^{i,j}_±)_{IJ} at ν − λ = 2m + κ as constant × operator."""
    if m < 0:
        raise ValueError("m must be non-negative")
    n = sig.n
    g = g_polynomial(sig, I, J)
    if sig.kappa == 0:
        op = reduce_product(g, juhl_kernel(n, 2 * m + 2, LAMBDA - 1))
    else:
        op = reduce_product(g * MultiPolynomial.variable(n, n), juhl_kernel(n, 2 * m + 4, LAMBDA - 2))
    return ScaledOp(reduce_constant(n, m, sig.kappa), op)


def proposition_gC_check(sig: OperatorSignature, l: int, I: IndexSet, J: IndexSet) -> VerificationReport:
    """g_{IJ}·𝒞_{λ−1,ν+1} ≡ 8(−1)^{i−j}·(C^{i,j}_{λ,ν})_{IJ}, ν = λ + l."""
    start = time.perf_counter()
    lhs = reduce_product(g_polynomial(sig, I, J), juhl_kernel(sig.n, l + 2, LAMBDA - 1))
    rhs = sbo_components(sig, l, I, J).scale(8 * (-1) ** (sig.i - sig.j))
    return _report("prop-gc", f"n={sig.n} i={sig.i} j={sig.j} l={l} I={_fmt(I)} J={_fmt(J)}", lhs, rhs, start)


def main_theorem_check(sig: OperatorSignature, m: int) -> VerificationReport:
    """Residue of every entry against theorem_constant × (C^{i,j}_{λ,ν})_{IJ}."""
    start = time.perf_counter()
    c_op = sbo_differential(sig, 2 * m + sig.kappa)
    const = theorem_constant(sig, m)
    bad = []
    count = 0
    for I in sig.sources:
        for J in sig.targets:
            count += 1
            lhs = residue_reduce(sig, m, I, J)
            rhs = ScaledOp(const, c_op.entry(I, J))
            if lhs != rhs:
                bad.append((I, J, lhs, rhs))
    case = f"n={sig.n} i={sig.i} j={sig.j} κ={sig.kappa} m={m}"
    millis = (time.perf_counter() - start) * 1000
    if not bad:
        return VerificationReport("main-theorem", case, True, millis=millis, detail=f"{count} entries")
    I, J, lhs, rhs = bad[0]
    return VerificationReport(
        "main-theorem", case, False, str(lhs), str(rhs), millis,
        f"{len(bad)}/{count} entries differ, first I={_fmt(I)} J={_fmt(J)}",
    )


def kappa_chain_check(sig: OperatorSignature, m: int, I: IndexSet, J: IndexSet) -> VerificationReport:
    """x_n·g·𝒞_{λ−2,ν+1} ≡ (n − λ − ν)·g·𝒞_{λ−1,ν+1} with ν = λ + 2m + 1."""
    start = time.perf_counter()
    n = sig.n
    g = g_polynomial(sig, I, J)
    nu = _nu(m, 1)
    lhs = reduce_product(g * MultiPolynomial.variable(n, n), juhl_kernel(n, 2 * m + 4, LAMBDA - 2))
    rhs = reduce_product(g, juhl_kernel(n, 2 * m + 3, LAMBDA - 1)).scale(n - LAMBDA - nu)
    return _report("main-theorem", f"chain n={n} i={sig.i} j={sig.j} m={m} I={_fmt(I)} J={_fmt(J)}", lhs, rhs, start)


def scalar_collapse_check(n: int, m: int) -> VerificationReport:
    """i = j = 0: the residue is q(λ,ν)·𝒞_{λ,ν} and the constants chain through Γ(ν+1) = νΓ(ν)."""
    start = time.perf_counter()
    sig = OperatorSignature(n, 0, 0, 0)
    nu = _nu(m, 0)
    q = scalar_residue_constant(m, n, nu)
    lhs = residue_reduce(sig, m, (), ())
    rhs = ScaledOp(q, juhl_kernel(n, 2 * m, LAMBDA))
    chained = theorem_constant(sig, m) * GammaProduct(nu / 2)
    ok = lhs == rhs and chained == q
    return VerificationReport(
        "main-theorem", f"scalar n={n} m={m}", ok,
        "" if ok else f"{lhs} | constant {chained}", "" if ok else f"{rhs} | constant {q}",
        (time.perf_counter() - start) * 1000,
    )


def gamma_derived_theorem_constant(sig: OperatorSignature, m: int) -> GammaProduct:
    """Residue-formula constant with the κ=1 factor recomputed from the Gamma normalizers.

    The κ=1 reduction constant carries a numerator 8 instead of 2, so the
    derived constant is four times the closed form for κ=1.
    """
    const = theorem_constant(sig, m)
    return const * 4 if sig.kappa else const


def main_theorem_signatures(n: int) -> list[OperatorSignature]:
    out = []
    for kappa in (0, 1):
        for i in range(n + 1):
            for j in (i, i - 1):
                if 0 <= j <= n - 1:
                    out.append(OperatorSignature(n, i, j, kappa))
    return out


def entry_pairs(sig: OperatorSignature) -> list[tuple[IndexSet, IndexSet]]:
    return [(I, J) for I in index_sets(sig.n, sig.i) for J in index_sets(sig.n - 1, sig.j)]
