"""Index sets, sign conventions and the quadratic polynomials S_IJ.

An index set is a strictly increasing tuple drawn from ``1..n``; it labels
the basis ``e_I = e_{k1} ∧ ... ∧ e_{ki}`` of the i-th exterior power.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from sbo_kit.polynomial import MultiPolynomial

IndexSet = tuple[int, ...]


def index_set(elements: Iterable[int], n: int | None = None) -> IndexSet:
    out = tuple(sorted(elements))
    if len(set(out)) != len(out):
        raise ValueError(f"repeated index in {out}")
    if out and out[0] < 1:
        raise ValueError(f"indices must be positive: {out}")
    if n is not None and out and out[-1] > n:
        raise ValueError(f"index {out[-1]} exceeds dimension {n}")
    return out


def index_sets(n: int, i: int) -> list[IndexSet]:
    """All i-element subsets of {1..n} in lexicographic order."""
    if not 0 <= i <= n:
        return []
    return list(combinations(range(1, n + 1), i))


def sign_between(K: Iterable[int], p: int, q: int) -> int:
    """(−1)^{#{r ∈ K : min(p,q) < r < max(p,q)}}."""
    if p == q:
        raise ValueError("sign_between needs p != q")
    lo, hi = min(p, q), max(p, q)
    return -1 if sum(1 for r in K if lo < r < hi) % 2 else 1


def sign_pair(I: IndexSet, I2: IndexSet) -> int:
    """sgn(I, I') for index sets differing in exactly one element."""
    s1, s2 = set(I), set(I2)
    if len(I) != len(I2) or len(s1 - s2) != 1:
        raise ValueError(f"{I} and {I2} must differ in exactly one element")
    (p,), (q,) = s1 - s2, s2 - s1
    return sign_between(s1 & s2, p, q)


def position_sign(I: Iterable[int], p: int) -> int:
    """(−1)^{#{r ∈ I : r < p}}: the sign picked up moving dx_p to the front."""
    return -1 if sum(1 for r in I if r < p) % 2 else 1


def epsilon_weight(I: Iterable[int], k: int, n: int) -> int:
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    return 1 if k in I else -1


def s_polynomial(I: IndexSet, J: IndexSet, n: int) -> MultiPolynomial:
    """S_IJ(x): minus |x|² times the (I,J) minor of the reflection ψ(x).

    Off the diagonal this is ``2·sgn(I,J)·x_p·x_q``; the factor 2 is what the
    minor computation produces (see ``kernels.reflection_minor``).
    """
    if len(I) != len(J):
        raise ValueError("S_IJ needs #I = #J")
    if I == J:
        out = MultiPolynomial.zero(n)
        for k in range(1, n + 1):
            e = [0] * n
            e[k - 1] = 2
            out = out + MultiPolynomial.monomial(n, e, epsilon_weight(I, k, n))
        return out
    s1, s2 = set(I), set(J)
    if len(s1 - s2) == 1:
        (p,), (q,) = s1 - s2, s2 - s1
        x = MultiPolynomial.variable
        return (x(n, p) * x(n, q)).scale(2 * sign_pair(I, J))
    return MultiPolynomial.zero(n)


@dataclass(frozen=True)
class OperatorSignature:
    """Source degree i on ℝⁿ, target degree j ∈ {i−1, i} on ℝⁿ⁻¹, parity κ."""

    n: int
    i: int
    j: int
    kappa: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.i <= self.n:
            raise ValueError(f"i={self.i} outside 0..{self.n}")
        if self.j not in (self.i - 1, self.i):
            raise ValueError(f"j must be i or i-1, got j={self.j} for i={self.i}")
        if not 0 <= self.j <= self.n - 1:
            raise ValueError(f"j={self.j} outside 0..{self.n - 1}")
        if self.kappa not in (0, 1):
            raise ValueError("kappa must be 0 or 1")

    @property
    def sign(self) -> str:
        return "+" if self.kappa == 0 else "-"

    @property
    def sources(self) -> list[IndexSet]:
        return index_sets(self.n, self.i)

    @property
    def targets(self) -> list[IndexSet]:
        return index_sets(self.n - 1, self.j)

    def __str__(self):
        return f"(n={self.n}, i={self.i}, j={self.j}, κ={self.kappa})"


def all_signatures(n: int, kappas=(0, 1)) -> list[OperatorSignature]:
    out = []
    for i in range(n + 1):
        for j in (i - 1, i):
            if 0 <= j <= n - 1:
                out.extend(OperatorSignature(n, i, j, k) for k in kappas)
    return out


def project_basis(sig: OperatorSignature, I: IndexSet) -> tuple[int, IndexSet] | None:
    """Image of e_I under the projection ∧ⁱ(ℂⁿ) → ∧ʲ(ℂⁿ⁻¹); None for zero."""
    if len(I) != sig.i:
        raise ValueError(f"#I={len(I)} does not match i={sig.i}")
    n = sig.n
    if sig.j == sig.i:
        return None if n in I else (1, tuple(I))
    if n not in I:
        return None
    return (-1) ** (sig.i - 1), tuple(r for r in I if r != n)
