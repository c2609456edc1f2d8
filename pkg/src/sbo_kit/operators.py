"""Differential operators on forms: Juhl, the C^{i,j} family, Branson, d, d*, ι.

A ``FormOperator`` sends f·dx_I to Σ_J (entry_{IJ} f)·dx_J.  Entries are
constant-coefficient operators in the n source variables.  When the target
lives on ℝ^{n−1}, the restriction to x_n = 0 is applied after the entry.
"""

from __future__ import annotations

import time
from fractions import Fraction
from functools import lru_cache

from sbo_kit.gamma import GammaProduct, ScaledOp, knapp_stein_constant, riesz_constant
from sbo_kit.gegenbauer import gegenbauer_renormalized, parity_gamma
from sbo_kit.indices import (
    IndexSet,
    OperatorSignature,
    epsilon_weight,
    index_sets,
    position_sign,
    s_polynomial,
    sign_between,
    sign_pair,
)
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import LAMBDA, NU, ONE, RationalFunction, rf
from sbo_kit.report import VerificationReport
from sbo_kit.weyl import ConstCoeffOp, laplacian_power, reduce_product

HALF = RationalFunction(Fraction(1, 2))


class FormOperator:
    """Matrix of ConstCoeffOp entries, keyed by (source I, target J)."""

    __slots__ = ("n", "i", "target_n", "j", "entries")

    def __init__(self, n: int, i: int, j: int, entries=None, target_n: int | None = None):
        self.n, self.i, self.j = n, i, j
        self.target_n = n if target_n is None else target_n
        if self.target_n not in (n, n - 1):
            raise ValueError("target dimension must be n or n−1")
        clean = {}
        for (I, J), op in (entries or {}).items():
            if op.n != n:
                raise ValueError(f"entry dimension {op.n} does not match source dimension {n}")
            if len(I) != i or len(J) != j:
                raise ValueError(f"index sets {I}, {J} do not match degrees ({i}, {j})")
            if J and J[-1] > self.target_n:
                raise ValueError(f"target index set {J} outside 1..{self.target_n}")
            if op:
                clean[(tuple(I), tuple(J))] = op
        self.entries = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, n: int, i: int, scalar: ConstCoeffOp | None = None):
        one = scalar if scalar is not None else ConstCoeffOp.constant(n, 1)
        return cls(n, i, i, {(I, I): one for I in index_sets(n, i)})

    @classmethod
    def zero(cls, n: int, i: int, j: int, target_n: int | None = None):
        return cls(n, i, j, {}, target_n)

    # -- accessors --------------------------------------------------------

    @property
    def sources(self) -> list[IndexSet]:
        return index_sets(self.n, self.i)

    @property
    def targets(self) -> list[IndexSet]:
        return index_sets(self.target_n, self.j)

    def entry(self, I, J) -> ConstCoeffOp:
        return self.entries.get((tuple(I), tuple(J)), ConstCoeffOp.zero(self.n))

    def shape(self):
        return (self.n, self.i, self.target_n, self.j)

    # -- algebra ----------------------------------------------------------

    def _same_shape(self, other):
        if self.shape() != other.shape():
            raise ValueError(f"shape mismatch: {self.shape()} vs {other.shape()}")

    def __add__(self, other: "FormOperator"):
        self._same_shape(other)
        out = dict(self.entries)
        for k, op in other.entries.items():
            out[k] = out[k] + op if k in out else op
        return FormOperator(self.n, self.i, self.j, out, self.target_n)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormOperator":
        """Multiply every entry by a scalar or a ConstCoeffOp (they commute)."""
        if isinstance(c, ConstCoeffOp):
            out = {k: c * op for k, op in self.entries.items()}
        else:
            out = {k: op.scale(c) for k, op in self.entries.items()}
        return FormOperator(self.n, self.i, self.j, out, self.target_n)

    __rmul__ = scale

    def __matmul__(self, other: "FormOperator") -> "FormOperator":
        """self ∘ other: (A∘B)_{IK} = Σ_J A_{JK}·B_{IJ}."""
        if other.target_n != self.n or other.j != self.i or other.n != self.n:
            raise ValueError("incompatible composition")
        if self.target_n != self.n:
            raise ValueError("cannot compose after a restriction")
        by_source: dict[IndexSet, list] = {}
        for (J, K), a in self.entries.items():
            by_source.setdefault(J, []).append((K, a))
        out: dict = {}
        for (I, J), b in other.entries.items():
            for K, a in by_source.get(J, ()):
                key = (I, K)
                prod = a * b
                out[key] = out[key] + prod if key in out else prod
        return FormOperator(self.n, other.i, self.j, out)

    def restrict(self) -> "FormOperator":
        """Compose with Rest_{x_n=0}: keep target basis forms free of dx_n."""
        if self.target_n != self.n:
            return self
        n = self.n
        out = {(I, J): op for (I, J), op in self.entries.items() if n not in J}
        return FormOperator(n, self.i, self.j, out, n - 1)

    def map_entries(self, fn) -> "FormOperator":
        return FormOperator(
            self.n, self.i, self.j, {k: fn(op) for k, op in self.entries.items()}, self.target_n
        )

    def specialize(self, lam=None, nu=None):
        return self.map_entries(lambda op: op.specialize(lam=lam, nu=nu))

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        if not isinstance(other, FormOperator):
            return NotImplemented
        return self.shape() == other.shape() and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape(), frozenset(self.entries.items())))

    def apply(self, f: MultiPolynomial, I: IndexSet) -> dict[IndexSet, MultiPolynomial]:
        """Image of f·dx_I as {J: coefficient}; restricted targets set x_n = 0."""
        out = {}
        for (I2, J), op in self.entries.items():
            if I2 != tuple(I):
                continue
            g = op.apply(f)
            if self.target_n != self.n:
                g = MultiPolynomial(self.n, {e: c for e, c in g.terms.items() if e[-1] == 0})
            if g:
                out[J] = g
        return out

    def __str__(self):
        if not self.entries:
            return "0"
        lines = []
        for (I, J) in sorted(self.entries):
            lines.append(f"[{_fmt_set(I)} → {_fmt_set(J)}] {self.entries[(I, J)]}")
        return "\n".join(lines)

    def __repr__(self):
        return f"FormOperator(n={self.n}, {self.i}→{self.j} on ℝ^{self.target_n}, {len(self.entries)} entries)"


def _fmt_set(I) -> str:
    return "{" + ",".join(map(str, I)) + "}"


# -- exterior calculus ----------------------------------------------------


@lru_cache(maxsize=None)
def basic_form_operator(kind: str, n: int, i: int) -> FormOperator:
    """d (i→i+1), dstar (i→i−1) or iota_n (i→i−1) on i-forms of ℝⁿ.

    d(f dx_I) = Σ_{q∉I} (−1)^{#{r∈I: r<q}} ∂_q f dx_{I∪q}
    d*(f dx_I) = −Σ_{p∈I} (−1)^{#{r∈I: r<p}} ∂_p f dx_{I∖p}
    ι(f dx_I) = (−1)^{i−1} f dx_{I∖n} if n ∈ I
    """
    if kind not in ("d", "dstar", "iota_n"):
        raise ValueError(f"unknown kind {kind!r}")
    if not 0 <= i <= n:
        raise ValueError(f"degree {i} outside 0..{n}")
    j = i + 1 if kind == "d" else i - 1
    entries = {}
    for I in index_sets(n, i):
        if kind == "d":
            for q in range(1, n + 1):
                if q not in I:
                    J = tuple(sorted(I + (q,)))
                    entries[(I, J)] = ConstCoeffOp.partial(n, q).scale(position_sign(I, q))
        elif kind == "dstar":
            for p in I:
                J = tuple(r for r in I if r != p)
                entries[(I, J)] = ConstCoeffOp.partial(n, p).scale(-position_sign(I, p))
        elif n in I:
            J = tuple(r for r in I if r != n)
            entries[(I, J)] = ConstCoeffOp.constant(n, position_sign(I, n))
    return FormOperator(n, i, j, entries)


def _zero_if_invalid(kind, n, i):
    j = i + 1 if kind == "d" else i - 1
    if not 0 <= i <= n or not 0 <= j <= n:
        return FormOperator.zero(n, i, j)
    return basic_form_operator(kind, n, i)


def d_op(n, i):
    return _zero_if_invalid("d", n, i)


def dstar_op(n, i):
    return _zero_if_invalid("dstar", n, i)


def iota_op(n, i):
    return _zero_if_invalid("iota_n", n, i)


def dd_star(n, i) -> FormOperator:
    """d∘d* on i-forms."""
    return d_op(n, i - 1) @ dstar_op(n, i)


def dstar_d(n, i) -> FormOperator:
    return dstar_op(n, i + 1) @ d_op(n, i)


def form_laplacian(n, i) -> FormOperator:
    """Δ = −(dd* + d*d)."""
    return -(dd_star(n, i) + dstar_d(n, i))


# -- Juhl's operator ------------------------------------------------------


@lru_cache(maxsize=None)
def _s_power(n: int, k: int) -> ConstCoeffOp:
    """(−Δ_{ℝ^{n−1}})^k."""
    return laplacian_power(n, k, n - 1).scale((-1) ** k)


@lru_cache(maxsize=None)
def juhl_kernel(n: int, gap: int, lam=LAMBDA) -> ConstCoeffOp:
    """𝒞_{λ,ν} with λ = ``lam`` and ν − λ = ``gap``; zero for negative gap.

    Symbol: (I_gap C̃_gap^{λ−(n−1)/2})(−Δ_{ℝ^{n−1}}, ∂_n).
    """
    if gap < 0:
        return ConstCoeffOp.zero(n)
    alpha = rf(lam) - RationalFunction(Fraction(n - 1, 2))
    g = gegenbauer_renormalized(gap, alpha)
    out = ConstCoeffOp.zero(n)
    dn = ConstCoeffOp.partial(n, n)
    for (e,), c in g.terms.items():
        out = out + (_s_power(n, (gap - e) // 2) * dn**e).scale(c)
    return out


def juhl_symbol(n: int, l: int) -> ConstCoeffOp:
    """𝒞_{λ,λ+l} for symbolic λ."""
    if l < 0:
        raise ValueError("l must be non-negative")
    return juhl_kernel(n, l, LAMBDA)


def _closed_form(n: int, l: int, upper, offset) -> ConstCoeffOp:
    if l < 0:
        raise ValueError("l must be non-negative")
    m = l // 2
    nu = LAMBDA + l
    shift = nu - RationalFunction(Fraction(n - 1, 2)) - m
    lap = ConstCoeffOp.laplacian(n, n - 1)
    dn = ConstCoeffOp.partial(n, n)
    out = ConstCoeffOp.zero(n)
    from math import factorial

    for k in range(m + 1):
        prod = ONE
        for j in range(1, upper(m, k) + 1):
            prod = prod * (shift + offset + j)
        w = prod * RationalFunction(Fraction(2) ** (l - 2 * k)) / (factorial(k) * factorial(l - 2 * k))
        out = out + (lap**k * dn ** (l - 2 * k)).scale(w)
    return out


def juhl_closed_form(n: int, l: int) -> ConstCoeffOp:
    """Closed form with product Π_{j=1}^{m−k+1}(ν − (n−1)/2 − m + j), as it is usually quoted.

    Kept for comparison only: it does not agree with ``juhl_symbol``.
    """
    return _closed_form(n, l, lambda m, k: m - k + 1, 0)


def juhl_closed_form_corrected(n: int, l: int) -> ConstCoeffOp:
    """Closed form with Π_{j=1}^{m−k}(ν − (n−1)/2 − m − 1 + j); equals ``juhl_symbol``."""
    return _closed_form(n, l, lambda m, k: m - k, -1)


def pochhammer_factor_text() -> str:
    return "Π_{j=1}^{m−k} (ν − (n−1)/2 − m − 1 + j)"


# -- the matrix-valued family C^{i,j} -------------------------------------


@lru_cache(maxsize=None)
def sbo_differential(sig: OperatorSignature, l: int) -> FormOperator:
    """C^{i,j}_{λ,ν} with ν = λ + l, assembled by composition and then restricted."""
    if l < 0:
        raise ValueError("l must be non-negative")
    n, i = sig.n, sig.i
    lam = LAMBDA
    nu = lam + l
    if sig.j == i:
        t1 = dd_star(n, i).scale(juhl_kernel(n, l - 2, lam + 1))
        t2 = (d_op(n, i - 1) @ iota_op(n, i)).scale(
            juhl_kernel(n, l - 1, lam).scale(-parity_gamma(lam - Fraction(n, 2), l))
        )
        t3 = FormOperator.identity(n, i, juhl_kernel(n, l, lam).scale(HALF * (nu - i)))
        total = t1 + t2 + t3
    else:
        t1 = (dd_star(n, i - 1) @ iota_op(n, i)).scale(juhl_kernel(n, l - 2, lam + 1).scale(-1))
        t2 = dstar_op(n, i).scale(
            juhl_kernel(n, l - 1, lam + 1).scale(-parity_gamma(lam - Fraction(n - 1, 2), l))
        )
        t3 = iota_op(n, i).scale(juhl_kernel(n, l, lam).scale(HALF * (lam + i - n)))
        total = t1 + t2 + t3
    return total.restrict()


def sbo_components(sig: OperatorSignature, l: int, I, J) -> ConstCoeffOp:
    """(I, J) entry of C^{i,j}_{λ,λ+l} from the case-by-case closed formulas."""
    n, i = sig.n, sig.i
    I, J = tuple(I), tuple(J)
    if len(I) != i or len(J) != sig.j or (J and J[-1] > n - 1) or (I and I[-1] > n):
        raise ValueError(f"invalid index sets {I}, {J} for {sig}")
    lam = LAMBDA
    nu = lam + l
    d = ConstCoeffOp.partial
    c_shift = juhl_kernel(n, l - 2, lam + 1)
    c_same = juhl_kernel(n, l, lam)
    c_odd = juhl_kernel(n, l - 1, lam + 1)
    gam = parity_gamma(lam - Fraction(n - 1, 2), l)
    sI, sJ = set(I), set(J)
    zero = ConstCoeffOp.zero(n)
    if sig.j == i:
        if n not in sI and I == J:
            lap_I = sum((d(n, p) ** 2 for p in I), zero)
            return -(c_shift * lap_I) + c_same.scale(HALF * (nu - i))
        if len(sJ - sI) == 1:
            (q,) = sJ - sI
            if n not in sI:
                (p,) = sI - sJ
                return (c_shift * d(n, p) * d(n, q)).scale(-sign_between(I, p, q))
            if sI - sJ == {n}:
                return (c_odd * d(n, q)).scale(-sign_between(I, q, n) * gam)
        return zero
    sign = (-1) ** (i - 1)
    if n in sI:
        if sJ == sI - {n}:
            lap_out = sum((d(n, p) ** 2 for p in range(1, n + 1) if p not in sI), zero)
            return (-(c_shift * lap_out) + c_same.scale(HALF * (nu + i - n))).scale(sign)
        rest = sI - {n}
        if len(sJ - rest) == 1 and len(rest - sJ) == 1:
            (p,), (q,) = rest - sJ, sJ - rest
            return (c_shift * d(n, p) * d(n, q)).scale(sign * sign_between(I, p, q))
        return zero
    if sJ < sI and len(sI - sJ) == 1:
        (p,) = sI - sJ
        return (c_odd * d(n, p)).scale(position_sign(I, p) * gam)
    return zero


def sbo_from_components(sig: OperatorSignature, l: int) -> FormOperator:
    entries = {
        (I, J): sbo_components(sig, l, I, J) for I in sig.sources for J in sig.targets
    }
    return FormOperator(sig.n, sig.i, sig.j, entries, sig.n - 1)


# -- Branson's operator and the Knapp–Stein residue -----------------------


@lru_cache(maxsize=None)
def branson_operator(n: int, i: int, l: int) -> FormOperator:
    """D^{(i)}_{2l} = −(n/2 − i)Δ^l + l(d*d − dd*)Δ^{l−1}; −(n/2 − i)·id for l = 0."""
    if not 0 <= i <= n:
        raise ValueError(f"degree {i} outside 0..{n}")
    if l < 0:
        raise ValueError("l must be non-negative")
    c = -(RationalFunction(Fraction(n, 2)) - i)
    if l == 0:
        return FormOperator.identity(n, i).scale(c)
    lap = laplacian_power(n, l)
    main = FormOperator.identity(n, i, lap.scale(c))
    return main + (dstar_d(n, i) - dd_star(n, i)).scale(laplacian_power(n, l - 1).scale(l))


def signed_diagonal(n: int, I, reading: str = "full") -> ConstCoeffOp:
    """Σ ε_I(p)∂_p² over p ∈ I (reading='literal') or p = 1..n (reading='full')."""
    rng = I if reading == "literal" else range(1, n + 1)
    if reading not in ("literal", "full"):
        raise ValueError("reading must be 'literal' or 'full'")
    out = ConstCoeffOp.zero(n)
    for p in rng:
        out = out + ConstCoeffOp.partial(n, p) ** 2 * epsilon_weight(I, p, n)
    return out


def knapp_stein_lhs_entry(n: int, l: int, I, J) -> ScaledOp:
    """Residue entry (1/(l+1))·C(l+1, n)·S_{IJ}Δ^{l+1}δ reduced mod 𝒥."""
    op = reduce_product(s_polynomial(tuple(I), tuple(J), n), laplacian_power(n, l + 1))
    return ScaledOp(riesz_constant(l + 1, n) / (l + 1), op)


def knapp_stein_lemma_entry(n: int, i: int, l: int, I, J, reading: str = "full") -> ScaledOp:
    """Closed-form residue entry 4C(l+1,n)·(…), with the diagonal sum read per ``reading``."""
    I, J = tuple(I), tuple(J)
    const = riesz_constant(l + 1, n) * 4
    if I == J:
        op = (signed_diagonal(n, I, reading) * laplacian_power(n, l - 1)).scale(l) if l else ConstCoeffOp.zero(n)
        op = op + laplacian_power(n, l).scale(rf(i) - Fraction(n, 2))
        return ScaledOp(const, op)
    if l and len(set(I) - set(J)) == 1:
        (p,), (q,) = set(I) - set(J), set(J) - set(I)
        op = (ConstCoeffOp.partial(n, p) * ConstCoeffOp.partial(n, q) * laplacian_power(n, l - 1)).scale(
            2 * l * sign_pair(I, J)
        )
        return ScaledOp(const, op)
    return ScaledOp(const, ConstCoeffOp.zero(n))


def branson_lemma_entry(n: int, i: int, l: int, I, J, reading: str = "full") -> ConstCoeffOp:
    """Closed-form (I, J) entry of D^{(i)}_{2l} for l ≥ 1."""
    I, J = tuple(I), tuple(J)
    if I == J:
        if not l:
            return ConstCoeffOp.constant(n, rf(i) - Fraction(n, 2))
        return laplacian_power(n, l).scale(rf(i) - Fraction(n, 2)) + (
            signed_diagonal(n, I, reading) * laplacian_power(n, l - 1)
        ).scale(l)
    if l and len(set(I) - set(J)) == 1:
        (p,), (q,) = set(I) - set(J), set(J) - set(I)
        return (ConstCoeffOp.partial(n, p) * ConstCoeffOp.partial(n, q) * laplacian_power(n, l - 1)).scale(
            2 * l * sign_between(I, p, q)
        )
    return ConstCoeffOp.zero(n)


def knapp_stein_residue_check(n: int, i: int, l: int) -> VerificationReport:
    """Entrywise: residue of the normalized Knapp–Stein kernel vs the scaled Branson operator."""
    start = time.perf_counter()
    rhs_op = branson_operator(n, i, l)
    const = knapp_stein_constant(l, n)
    bad = []
    for I in index_sets(n, i):
        for J in index_sets(n, i):
            lhs = knapp_stein_lhs_entry(n, l, I, J)
            rhs = ScaledOp(const, rhs_op.entry(I, J))
            if lhs != rhs:
                bad.append((I, J, lhs, rhs))
    millis = (time.perf_counter() - start) * 1000
    case = f"n={n} i={i} l={l}"
    if not bad:
        return VerificationReport("knapp-stein", case, True, millis=millis)
    I, J, lhs, rhs = bad[0]
    return VerificationReport(
        "knapp-stein", case, False, str(lhs), str(rhs), millis,
        f"{len(bad)} mismatched entries, first at I={_fmt_set(I)} J={_fmt_set(J)}",
    )


def knapp_stein_vanishes(n: int, i: int, lam) -> bool:
    """Vanishing rule for the normalized Knapp–Stein operator: n even and i = λ = n/2."""
    lam = Fraction(lam)
    return n % 2 == 0 and i == n // 2 and lam == Fraction(n, 2)


def knapp_stein_vanishes_bruteforce(n: int, i: int, lam) -> bool:
    """Zero test from the kernel itself.

    Off the residue points 1/Γ(λ − n/2) ≠ 0 and σ^{(i)}(ψ) is invertible, so the
    kernel is a nonzero function.  At λ = n/2 − l every residue entry is reduced
    and tested for zero.
    """
    lam = Fraction(lam)
    if GammaProduct.gamma(lam - Fraction(n, 2), -1):
        return False
    l = int(Fraction(n, 2) - lam)
    return all(
        not knapp_stein_lhs_entry(n, l, I, J).canonical()[1]
        for I in index_sets(n, i)
        for J in index_sets(n, i)
    )
