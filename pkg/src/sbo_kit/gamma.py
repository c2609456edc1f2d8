"""Products of Gamma factors with affine arguments in (λ, ν).

A ``GammaProduct`` is ``multiplier · π^{p/2} · Π Γ(form)^{e}``.  Normal form:
every Gamma argument is shifted, using Γ(z+1) = zΓ(z), to the representative
of its class {form + k : k ∈ ℤ} whose constant term lies in [0, 1) (or
(0, 1] for a pure constant), and the surplus goes into the multiplier.
Constant arguments 1 and 1/2 are evaluated (Γ(1) = 1, Γ(1/2) = π^{1/2}).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from scipy import special

from sbo_kit._text import MINUS
from sbo_kit.rational import LAMBDA, NU, ONE, ZERO, RationalFunction, rf


def _frac(x) -> Fraction:
    if isinstance(x, RationalFunction):
        return x.to_fraction()
    return Fraction(x)


@dataclass(frozen=True, order=True)
class Affine:
    """lam·λ + nu·ν + const with rational coefficients."""

    lam: Fraction = Fraction(0)
    nu: Fraction = Fraction(0)
    const: Fraction = Fraction(0)

    def __post_init__(self):
        for f in ("lam", "nu", "const"):
            object.__setattr__(self, f, _frac(getattr(self, f)))

    @classmethod
    def of(cls, value) -> "Affine":
        """From a number or a degree-≤1 RationalFunction."""
        if isinstance(value, Affine):
            return value
        v = rf(value)
        if v.is_constant:
            return cls(0, 0, v.to_fraction())
        num, den = v.numer_denom()
        if den != 1 or num.degree() > 1:
            raise ValueError(f"{v} is not affine in λ, ν")
        lam = nu = const = Fraction(0)
        for (a, b), c in num.terms():
            q = Fraction(int(c.numerator), int(c.denominator))
            if a:
                lam = q
            elif b:
                nu = q
            else:
                const = q
        return cls(lam, nu, const)

    def as_rf(self) -> RationalFunction:
        return _affine_rf(self.lam, self.nu, self.const)

    @property
    def is_constant(self) -> bool:
        return self.lam == 0 and self.nu == 0

    def __add__(self, k):
        if isinstance(k, Affine):
            return Affine(self.lam + k.lam, self.nu + k.nu, self.const + k.const)
        return Affine(self.lam, self.nu, self.const + _frac(k))

    def __sub__(self, k):
        return self + (-k if not isinstance(k, Affine) else Affine(-k.lam, -k.nu, -k.const))

    def __mul__(self, c):
        c = _frac(c)
        return Affine(self.lam * c, self.nu * c, self.const * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def specialize(self, lam=None, nu=None) -> "Affine":
        return Affine.of(self.as_rf().specialize(lam=lam, nu=nu))

    def substitute_nu(self, gap) -> "Affine":
        """ν ↦ λ + gap."""
        return Affine(self.lam + self.nu, 0, self.const + self.nu * _frac(gap))

    def __call__(self, lam=0.0, nu=0.0):
        return float(self.lam) * lam + float(self.nu) * nu + float(self.const)

    def __str__(self):
        return str(self.as_rf())


@lru_cache(maxsize=4096)
def _affine_rf(lam: Fraction, nu: Fraction, const: Fraction) -> RationalFunction:
    return LAMBDA * rf(lam) + NU * rf(nu) + rf(const)


def _class_shift(form: Affine) -> int:
    """Integer k with form − k the class representative."""
    if form.is_constant:
        return math.ceil(form.const) - 1  # representative in (0, 1]
    return math.floor(form.const)  # representative in [0, 1)


class GammaProduct:
    """multiplier · π^{pi_half/2} · Π Γ(form)^{exp}; kept in normal form."""

    __slots__ = ("multiplier", "pi_half", "factors")

    def __init__(self, multiplier=1, pi_half: int = 0, factors: dict | Iterable = ()):
        items = factors.items() if isinstance(factors, dict) else factors
        self.multiplier = rf(multiplier)
        self.pi_half = int(pi_half)
        self.factors: dict[Affine, int] = {}
        raw = {}
        for form, e in items:
            form = Affine.of(form)
            raw[form] = raw.get(form, 0) + e
        self._normalize(raw)

    # -- normalization ----------------------------------------------------

    def _normalize(self, raw: dict[Affine, int]):
        mult, pi_half = self.multiplier, self.pi_half
        out: dict[Affine, int] = {}
        if not mult:
            self.multiplier, self.pi_half, self.factors = ZERO, 0, {}
            return
        vanishing = False
        for form, e in raw.items():
            if not e:
                continue
            k = _class_shift(form)
            base = form - k
            if form.is_constant and form.const <= 0 and form.const.denominator == 1:
                # Γ at a pole
                if e > 0:
                    raise ZeroDivisionError(f"Γ({form}) is a pole")
                vanishing = True
                continue
            # Γ(base + k) = Γ(base)·Π_{u<k}(base+u) for k ≥ 0, inverse for k < 0
            shift = ONE
            if k > 0:
                for u in range(k):
                    shift = shift * (base + u).as_rf()
            elif k < 0:
                for u in range(1, -k + 1):
                    shift = shift / (base - u).as_rf()
            mult = mult * shift**e if e > 0 else mult / shift ** (-e)
            if base.is_constant and base.const == 1:
                continue
            if base.is_constant and base.const == Fraction(1, 2):
                pi_half += e
                continue
            out[base] = out.get(base, 0) + e
            if not out[base]:
                del out[base]
        if vanishing:
            mult, pi_half, out = ZERO, 0, {}
        self.multiplier, self.pi_half, self.factors = mult, pi_half, out

    @classmethod
    def _raw(cls, multiplier, pi_half, factors):
        obj = object.__new__(cls)
        obj.multiplier, obj.pi_half, obj.factors = multiplier, pi_half, factors
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def gamma(cls, form, exp: int = 1):
        return cls(1, 0, {Affine.of(form): exp})

    @classmethod
    def pi_power(cls, half_exponent: int):
        """π^{half_exponent/2}."""
        return cls(1, half_exponent)

    # -- arithmetic -------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, GammaProduct):
            c = rf(other)
            if not c:
                return GammaProduct(0)
            return GammaProduct._raw(self.multiplier * c, self.pi_half, dict(self.factors))
        raw = dict(self.factors)
        for f, e in other.factors.items():
            raw[f] = raw.get(f, 0) + e
        return GammaProduct(self.multiplier * other.multiplier, self.pi_half + other.pi_half, raw)

    __rmul__ = __mul__

    def inverse(self) -> "GammaProduct":
        if not self.multiplier:
            raise ZeroDivisionError("inverse of a vanishing Gamma product")
        return GammaProduct._raw(
            ONE / self.multiplier, -self.pi_half, {f: -e for f, e in self.factors.items()}
        )

    def __truediv__(self, other):
        if not isinstance(other, GammaProduct):
            return self * (ONE / rf(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __neg__(self):
        return self * -1

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GammaProduct(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, GammaProduct):
            try:
                other = GammaProduct(other)
            except TypeError:
                return NotImplemented
        return (
            self.multiplier == other.multiplier
            and self.pi_half == other.pi_half
            and self.factors == other.factors
        )

    def __hash__(self):
        return hash((self.multiplier, self.pi_half, frozenset(self.factors.items())))

    def __bool__(self):
        return bool(self.multiplier)

    # -- structure --------------------------------------------------------

    def transcendental_part(self) -> "GammaProduct":
        """Same product with multiplier 1."""
        return GammaProduct._raw(ONE, self.pi_half, dict(self.factors))

    @property
    def is_rational(self) -> bool:
        return self.pi_half == 0 and not self.factors

    def specialize(self, lam=None, nu=None) -> "GammaProduct":
        return GammaProduct(
            self.multiplier.specialize(lam=lam, nu=nu),
            self.pi_half,
            {f.specialize(lam=lam, nu=nu): e for f, e in self.factors.items()},
        )

    def substitute_nu(self, gap) -> "GammaProduct":
        raw = {}
        for f, e in self.factors.items():
            g = f.substitute_nu(gap)
            raw[g] = raw.get(g, 0) + e
        return GammaProduct(self.multiplier.substitute_nu(gap), self.pi_half, raw)

    def __call__(self, lam=0.0, nu=0.0) -> complex:
        """Numeric value; Γ^{-1} through the entire function 1/Γ."""
        value = complex(self.multiplier(lam, nu)) * math.pi ** (self.pi_half / 2)
        for f, e in self.factors.items():
            z = f(lam, nu)
            if e > 0:
                g = special.gamma(z)
                if not cmath.isfinite(g):
                    raise ZeroDivisionError(f"Γ({f}) has a pole at λ={lam}, ν={nu}")
                value *= g**e
            else:
                value *= special.rgamma(z) ** (-e)
        return value

    def log_abs(self, lam: float, nu: float) -> float:
        """log|value| through log-Gamma, for arguments where Γ overflows."""
        out = math.log(abs(float(self.multiplier(lam, nu)))) + self.pi_half / 2 * math.log(math.pi)
        for f, e in self.factors.items():
            out += e * float(special.gammaln(f(lam, nu)))
        return out

    def __str__(self):
        if not self.multiplier:
            return "0"
        parts = []
        m = self.multiplier
        if m != 1 or (not self.pi_half and not self.factors):
            s = str(m)
            parts.append(f"({s})" if m.needs_parens else s)
        if self.pi_half:
            e = Fraction(self.pi_half, 2)
            parts.append("π" if e == 1 else f"π^({_sign(e)})")
        for f, e in sorted(self.factors.items()):
            parts.append(f"Γ({f})" if e == 1 else f"Γ({f})^({_sign(e)})")
        return " · ".join(parts)

    def __repr__(self):
        return f"GammaProduct({str(self)!r})"

    def latex(self) -> str:
        num, den = [], []
        if self.pi_half:
            e = Fraction(abs(self.pi_half), 2)
            (num if self.pi_half > 0 else den).append(r"\pi" if e == 1 else rf"\pi^{{{e}}}")
        for f, e in sorted(self.factors.items()):
            g = rf"\Gamma\left({f.as_rf().latex()}\right)" + (f"^{{{abs(e)}}}" if abs(e) != 1 else "")
            (num if e > 0 else den).append(g)
        head = self.multiplier.latex()
        top = " ".join(num) or "1"
        body = top if not den else rf"\frac{{{top}}}{{{' '.join(den)}}}"
        return body if self.multiplier == 1 else rf"\left({head}\right) {body}"


def _sign(q: Fraction) -> str:
    return str(q).replace("-", MINUS)


def gamma_normalize(g: GammaProduct) -> GammaProduct:
    """Re-normalize (products are normalized on construction; kept for API symmetry)."""
    return GammaProduct(g.multiplier, g.pi_half, dict(g.factors))


# -- named constants ------------------------------------------------------


@lru_cache(maxsize=4096)
def a_normalizer(kappa: int, lam=LAMBDA, nu=NU, n: int = 2) -> GammaProduct:
    """a_{ε(κ)}(λ, ν) = 1/(Γ((λ+ν−n+1+κ)/2)·Γ((λ−ν+κ)/2))."""
    lam, nu = rf(lam), rf(nu)
    f1 = Affine.of((lam + nu - n + 1 + kappa) / 2)
    f2 = Affine.of((lam - nu + kappa) / 2)
    return GammaProduct(1, 0, {f1: -1}) * GammaProduct(1, 0, {f2: -1})


def riesz_constant(l: int, n: int) -> GammaProduct:
    """C(l, n) = (−1)^l π^{n/2} / (2^{2l} Γ(n/2 + l))."""
    return GammaProduct(
        RationalFunction((-1) ** l) / 2 ** (2 * l), n, {Affine(0, 0, Fraction(n, 2) + l): -1}
    )


def scalar_residue_constant(m: int, n: int, nu=NU) -> GammaProduct:
    """q_C^A at ν − λ = 2m: (−1)^m m! π^{(n−1)/2} / (2^{2m} Γ(ν))."""
    return GammaProduct(
        RationalFunction((-1) ** m * math.factorial(m)) / 2 ** (2 * m), n - 1, {Affine.of(nu): -1}
    )


def knapp_stein_constant(l: int, n: int) -> GammaProduct:
    """(−1)^{l+1} π^{n/2} / (2^{2l} Γ(n/2 + l + 1))."""
    return GammaProduct(
        RationalFunction((-1) ** (l + 1)) / 2 ** (2 * l), n, {Affine(0, 0, Fraction(n, 2) + l + 1): -1}
    )


@dataclass(frozen=True)
class ScaledOp:
    """A Gamma-product constant times an operator (anything with ``scale``)."""

    constant: GammaProduct
    op: object

    def canonical(self) -> tuple[GammaProduct, object]:
        if not self.constant or not self.op:
            return GammaProduct(0), self.op.scale(0)
        return self.constant.transcendental_part(), self.op.scale(self.constant.multiplier)

    def __eq__(self, other):
        if not isinstance(other, ScaledOp):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        if not a[1] and not b[1]:
            return True
        return a == b

    def __hash__(self):
        return hash(self.canonical())

    def __str__(self):
        g, op = self.canonical()
        if not op:
            return "0"
        return f"{g} · [{op}]" if g != 1 else str(op)
