"""Where the normalized operators vanish: the parity lattices, the case
classifier, and a brute-force oracle built on the explicit operators."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from sympy import Poly, symbols

from sbo_kit.indices import OperatorSignature
from sbo_kit.operators import sbo_differential
from sbo_kit.report import VerificationReport


def _int_or_none(x) -> int | None:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else None


@dataclass(frozen=True)
class ParityLattice:
    """L_even = {(−i,−j): 0 ≤ j ≤ i, i ≡ j mod 2}; L_odd has i ≡ j + 1."""

    parity: int  # 0 for L_even, 1 for L_odd

    def __contains__(self, point) -> bool:
        lam, nu = (_int_or_none(v) for v in point)
        if lam is None or nu is None:
            return False
        i, j = -lam, -nu
        return 0 <= j <= i and (i - j) % 2 == self.parity

    @property
    def name(self) -> str:
        return "L_odd" if self.parity else "L_even"


L_EVEN = ParityLattice(0)
L_ODD = ParityLattice(1)


def admissible(lam, nu, kappa: int) -> bool:
    """ν − λ ∈ 2ℕ + κ."""
    gap = Fraction(nu) - Fraction(lam)
    return gap.denominator == 1 and gap >= kappa and (gap - kappa) % 2 == 0


def vanish_branch(lam, nu, sig: OperatorSignature) -> str | None:
    """Name of the matching case of the vanishing theorem, or None if nonzero."""
    lam, nu = Fraction(lam), Fraction(nu)
    if not admissible(lam, nu, sig.kappa):
        return None
    n, i, j = sig.n, sig.i, sig.j
    lattice = L_ODD if sig.kappa else L_EVEN
    in_lattice = (lam, nu) in lattice
    drop_nu0 = in_lattice and nu != 0
    if sig.kappa == 0:
        if j == i:
            if i == 0:
                return lattice.name if in_lattice else None
            if lam == nu == i:
                return "point (i,i)"
            return lattice.name if drop_nu0 else None
        if i == n:
            return lattice.name if in_lattice else None
        if lam == nu == n - i:
            return "point (n−i,n−i)"
        return lattice.name if drop_nu0 else None
    if (j == i and i == 0) or (j == i - 1 and i == n):
        return lattice.name if in_lattice else None
    return lattice.name if drop_nu0 else None


def vanish_classifier(lam, nu, sig: OperatorSignature) -> bool:
    return vanish_branch(lam, nu, sig) is not None


def vanish_bruteforce(lam, nu, sig: OperatorSignature) -> bool:
    """Zero iff ν ∈ {−1, −2, …} (the 1/Γ(ν+1) factor) or every entry of C^{i,j}_{λ,ν} is zero."""
    lam, nu = Fraction(lam), Fraction(nu)
    if not admissible(lam, nu, sig.kappa):
        return False
    if nu.denominator == 1 and nu < 0:
        return True
    op = sbo_differential(sig, int(nu - lam)).specialize(lam=lam)
    return op.is_zero()


def vanish_grid_check(n: int, lo: int = -5, hi: int = 5) -> list[VerificationReport]:
    """Classifier against brute force on λ, ν ∈ [lo, hi] with admissible parity."""
    out = []
    for kappa in (0, 1):
        for i in range(n + 1):
            for j in (i, i - 1):
                if not 0 <= j <= n - 1:
                    continue
                sig = OperatorSignature(n, i, j, kappa)
                start = time.perf_counter()
                bad = []
                for lam in range(lo, hi + 1):
                    for nu in range(lo, hi + 1):
                        if not admissible(lam, nu, kappa):
                            continue
                        a, b = vanish_classifier(lam, nu, sig), vanish_bruteforce(lam, nu, sig)
                        if a != b:
                            bad.append((lam, nu, a, b))
                case = f"n={n} i={i} j={j} κ={kappa} grid {lo}..{hi}"
                lhs = rhs = ""
                if bad:
                    lam, nu, a, b = bad[0]
                    lhs, rhs = f"classifier({lam},{nu})={a}", f"bruteforce({lam},{nu})={b}"
                out.append(
                    VerificationReport(
                        "vanish", case, not bad, lhs, rhs, (time.perf_counter() - start) * 1000,
                        f"{len(bad)} disagreements" if bad else "",
                    )
                )
    return out


_LAM_SYM = symbols("lam")


def zero_locus(sig: OperatorSignature, l: int) -> list[Fraction] | None:
    """Values of λ at which every entry of C^{i,j}_{λ,λ+l} vanishes.

    Computed as the rational roots of the gcd of all coefficient polynomials;
    None means the operator is identically zero in λ.
    """
    op = sbo_differential(sig, l)
    g = None
    for entry in op.entries.values():
        for _, c in entry.terms.items():
            if "ν" in c.free_symbols():
                raise ValueError("coefficients must depend on λ only")
            p = Poly(c.as_expr(), _LAM_SYM, domain="QQ")
            g = p if g is None else g.gcd(p)
    if g is None:
        return None
    if g.degree() <= 0:
        return []
    return sorted(Fraction(int(r.p), int(r.q)) for r in g.ground_roots())


def isolated_zero_check(n: int, lmax: int = 4) -> list[VerificationReport]:
    """C^{i,i} vanishes only at λ = ν = i, C^{i,i−1} only at λ = ν = n − i."""
    out = []
    for i in range(n + 1):
        for j in (i, i - 1):
            # i = 0 and i = n carry an extra factor ν, so ν = 0 kills every l there
            if not 0 <= j <= n - 1 or (j == i == 0) or (j == i - 1 and i == n):
                continue
            sig = OperatorSignature(n, i, j, 0)
            start = time.perf_counter()
            expected_point = Fraction(i if j == i else n - i)
            got = {l: zero_locus(sig, l) for l in range(lmax + 1)}
            want = {l: ([expected_point] if l == 0 else []) for l in range(lmax + 1)}
            ok = got == want
            out.append(
                VerificationReport(
                    "vanish", f"isolated zero n={n} i={i} j={j} l≤{lmax}", ok,
                    "" if ok else str(got), "" if ok else str(want),
                    (time.perf_counter() - start) * 1000,
                )
            )
    return out
