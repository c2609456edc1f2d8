"""Exact rational functions in the parameters λ and ν.

Constants are kept as ``gmpy2.mpq`` and never touch the polynomial
machinery; only genuinely parametric values are promoted to sympy's sparse
fraction field ``QQ(λ, ν)`` (graded lex order), which keeps numerator and
denominator coprime.  Weyl-algebra computations are dominated by integer
coefficients, so the fast path matters.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Number

import gmpy2
from sympy import QQ, Symbol
from sympy.parsing.sympy_parser import (
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)
from sympy.polys.fields import FracElement, field
from sympy.polys.orderings import grlex

from sbo_kit._text import MINUS, superscript, to_sympy_syntax

FIELD, _LAM, _NU = field("lam,nu", QQ, grlex)
_RING = FIELD.ring
_NAMES = ("λ", "ν")
_LOCALS = {"lam": Symbol("lam"), "nu": Symbol("nu")}
_TRANSFORMS = standard_transformations + (implicit_multiplication,)


def _mpq(value) -> gmpy2.mpq:
    if isinstance(value, Fraction):
        return gmpy2.mpq(value.numerator, value.denominator)
    return gmpy2.mpq(value)


class RationalFunction:
    """Element of QQ(λ, ν); immutable and hashable."""

    __slots__ = ("_v",)

    def __init__(self, value=0):
        if isinstance(value, RationalFunction):
            self._v = value._v
        elif isinstance(value, FracElement):
            self._v = _canon(value)
        elif isinstance(value, str):
            self._v = RationalFunction.parse(value)._v
        elif isinstance(value, float):
            raise TypeError("floats are not exact; pass a Fraction or 'p/q' string")
        else:
            self._v = _mpq(value)

    @classmethod
    def _raw(cls, v) -> "RationalFunction":
        obj = object.__new__(cls)
        obj._v = v
        return obj

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        """Parse ``'2λ − 3/2'``, ``'(lam+1)/(nu-2)'`` and similar."""
        expr = parse_expr(
            to_sympy_syntax(text), local_dict=_LOCALS, transformations=_TRANSFORMS
        )
        return cls(FIELD.from_expr(expr))

    # -- arithmetic -------------------------------------------------------

    def _lift(self):
        v = self._v
        return v if isinstance(v, FracElement) else FIELD(v)

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b = self._v, o._v
        fa, fb = isinstance(a, FracElement), isinstance(b, FracElement)
        if not fa and not fb:
            return RationalFunction._raw(a + b)
        if fa != fb:
            return RationalFunction._raw(_add_const(a, b) if fa else _add_const(b, a))
        return RationalFunction._raw(_canon(self._lift() + o._lift()))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self._v)

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b = self._v, o._v
        fa, fb = isinstance(a, FracElement), isinstance(b, FracElement)
        if not fa and not fb:
            return RationalFunction._raw(a * b)
        if not a or not b:
            return ZERO
        if fa != fb:
            return RationalFunction._raw(_mul_const(a, b) if fa else _mul_const(b, a))
        return RationalFunction._raw(_canon(self._lift() * o._lift()))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if not o:
            raise ZeroDivisionError("division by the zero rational function")
        a, b = self._v, o._v
        if not isinstance(a, FracElement) and not isinstance(b, FracElement):
            return RationalFunction._raw(a / b)
        if not isinstance(b, FracElement):
            return RationalFunction._raw(_mul_const(a, 1 / b))
        return RationalFunction._raw(_canon(self._lift() / o._lift()))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ONE / (self ** (-k))
        if isinstance(self._v, FracElement):
            return RationalFunction._raw(_canon(self._v**k))
        return RationalFunction._raw(self._v**k)

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._v == o._v

    def __hash__(self):
        v = self._v
        if isinstance(v, FracElement):
            return hash(v)
        return hash(Fraction(int(v.numerator), int(v.denominator)))

    def __bool__(self):
        return bool(self._v)

    # -- inspection -------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        return not isinstance(self._v, FracElement)

    def to_fraction(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return Fraction(int(self._v.numerator), int(self._v.denominator))

    def numer_denom(self):
        """Numerator and monic denominator as sympy ring elements."""
        f = self._lift()
        lc = f.denom.LC
        return f.numer.quo_ground(lc), f.denom.quo_ground(lc)

    def as_expr(self):
        return self._lift().as_expr()

    def free_symbols(self) -> set[str]:
        if self.is_constant:
            return set()
        num, den = self.numer_denom()
        used = set()
        for poly in (num, den):
            for mono in poly.monoms():
                used.update(_NAMES[k] for k, e in enumerate(mono) if e)
        return used

    # -- substitution and evaluation --------------------------------------

    def specialize(self, lam=None, nu=None) -> "RationalFunction":
        """Exact substitution of rationals or rational functions for λ, ν.

        Substitutions are simultaneous.  Raises ``ZeroDivisionError`` when the
        denominator vanishes at the point.
        """
        if self.is_constant:
            return self
        num, den = self.numer_denom()
        subs = [(k, RationalFunction(v)) for k, v in ((0, lam), (1, nu)) if v is not None]
        n_val, d_val = _subst(num, subs), _subst(den, subs)
        return n_val / d_val

    def substitute_nu(self, gap) -> "RationalFunction":
        """ν ↦ λ + gap."""
        return self.specialize(nu=LAMBDA + gap)

    def __call__(self, lam=0.0, nu=0.0) -> complex:
        """Floating evaluation (complex-safe)."""
        if self.is_constant:
            return float(self._v)
        num, den = self.numer_denom()
        d = _eval_poly(den, lam, nu)
        if d == 0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at λ={lam}, ν={nu}")
        return _eval_poly(num, lam, nu) / d

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if self.is_constant:
            return _fmt_fraction(self.to_fraction())
        num, den = self.numer_denom()
        if den == 1:
            return _fmt_poly(num)
        num, den = _integral_pair(num, den)
        top, bottom = _fmt_poly(num), _fmt_poly(den)
        if len(num.terms()) > 1:
            top = f"({top})"
        (mono, c), = den.terms() if len(den.terms()) == 1 else ((None, None),)
        if mono is None or c != 1 or sum(1 for e in mono if e) > 1:
            bottom = f"({bottom})"
        return f"{top}/{bottom}"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def latex(self) -> str:
        from sympy import latex, Symbol

        expr = self.as_expr().subs({Symbol("lam"): Symbol("lambda"), Symbol("nu"): Symbol("nu")})
        return latex(expr)

    @property
    def needs_parens(self) -> bool:
        """True when juxtaposing with another factor needs brackets."""
        s = str(self)
        return any(c in s[1:] for c in "+" + MINUS + "/") or (
            not self.is_constant and s.startswith(MINUS)
        )


# Constant fast paths.  sympy keeps numerator and denominator coprime with
# integer coefficients and no common integer content; these helpers produce
# exactly that form without a polynomial gcd.


def _strip_content(f: FracElement, num, den) -> FracElement:
    g = 0
    for c in num.itercoeffs():
        g = gcd(g, int(c.numerator))
    for c in den.itercoeffs():
        g = gcd(g, int(c.numerator))
    if g != 1:
        num, den = num.quo_ground(QQ(g)), den.quo_ground(QQ(g))
    return f.raw_new(num, den)


def _mul_const(f: FracElement, c) -> FracElement:
    p, q = int(c.numerator), int(c.denominator)
    return _strip_content(f, f.numer.mul_ground(QQ(p)), f.denom.mul_ground(QQ(q)))


def _add_const(f: FracElement, c) -> FracElement:
    if not c:
        return f
    p, q = int(c.numerator), int(c.denominator)
    den = f.denom.mul_ground(QQ(q))
    return _strip_content(f, f.numer.mul_ground(QQ(q)) + f.denom.mul_ground(QQ(p)), den)


def _canon(f: FracElement):
    if f.numer.is_ground and f.denom.is_ground:
        return gmpy2.mpq(f.numer.LC) / gmpy2.mpq(f.denom.LC) if f.numer else gmpy2.mpq(0)
    return f


def _coerce(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(gmpy2.mpq(0)):
        return RationalFunction._raw(_mpq(x))
    if isinstance(x, FracElement):
        return RationalFunction(x)
    return NotImplemented


def _subst(poly, subs) -> RationalFunction:
    total = ZERO
    for mono, c in poly.terms():
        term = RationalFunction._raw(gmpy2.mpq(c))
        for k, e in enumerate(mono):
            if not e:
                continue
            val = dict(subs).get(k)
            base = val if val is not None else (LAMBDA, NU)[k]
            term = term * base**e
        total = total + term
    return total


def _integral_pair(num, den):
    """Scale num/den to coprime integer coefficients (display only)."""
    coeffs = [c for _, c in num.terms()] + [c for _, c in den.terms()]
    scale = 1
    for c in coeffs:
        scale = scale * int(c.denominator) // gcd(scale, int(c.denominator))
    g = 0
    for c in coeffs:
        g = gcd(g, int(c * scale))
    factor = QQ(scale, g)
    return num.mul_ground(factor), den.mul_ground(factor)


def _eval_poly(poly, lam, nu):
    total = 0
    for (a, b), c in poly.terms():
        total += float(c) * (lam**a) * (nu**b)
    return total


def _fmt_fraction(q: Fraction) -> str:
    s = str(q)
    return s.replace("-", MINUS)


def _fmt_poly(poly) -> str:
    parts = []
    for mono, c in poly.terms():
        q = Fraction(int(c.numerator), int(c.denominator))
        mon = "".join(_NAMES[k] + superscript(e) for k, e in enumerate(mono) if e)
        mag = abs(q)
        if not mon:
            body = str(mag)
        elif mag == 1:
            body = mon
        elif mag.denominator == 1:
            body = f"{mag}{mon}"
        else:
            body = f"({mag}){mon}"
        parts.append((q < 0, body))
    out = ""
    for k, (neg, body) in enumerate(parts):
        if k == 0:
            out = (MINUS if neg else "") + body
        else:
            out += f" {MINUS} " if neg else " + "
            out += body
    return out or "0"


ZERO = RationalFunction._raw(gmpy2.mpq(0))
ONE = RationalFunction._raw(gmpy2.mpq(1))
LAMBDA = RationalFunction._raw(_LAM)
NU = RationalFunction._raw(_NU)


def rf(value) -> RationalFunction:
    """Shorthand constructor; accepts anything ``RationalFunction`` does."""
    return value if isinstance(value, RationalFunction) else RationalFunction(value)


def is_scalar(x) -> bool:
    return isinstance(x, (Number, RationalFunction)) and not isinstance(x, (float, complex))
