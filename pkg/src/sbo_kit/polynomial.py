"""Sparse multivariate polynomials with rational-function coefficients."""

from __future__ import annotations

from typing import Iterable, Iterator

from sbo_kit._text import MINUS, superscript
from sbo_kit.rational import ONE, ZERO, RationalFunction, rf

Exps = tuple[int, ...]


def grlex_key(e: Exps):
    return (sum(e), e)


class MultiPolynomial:
    """Polynomial in ``x_1..x_n``; a dict from exponent tuples to coefficients.

    Zero coefficients are never stored.  Subclasses reuse the arithmetic with
    a different variable name (``ConstCoeffOp`` stores symbols in ∂).
    """

    __slots__ = ("n", "terms")
    var = "x"

    def __init__(self, n: int, terms: dict[Exps, RationalFunction] | None = None):
        if n < 0:
            raise ValueError("dimension must be non-negative")
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match dimension {n}")
            c = rf(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _from_clean(cls, n, terms):
        obj = object.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int):
        return cls._from_clean(n, {})

    @classmethod
    def constant(cls, n: int, c=1):
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, n: int, exps: Iterable[int], c=1):
        return cls(n, {tuple(exps): c})

    @classmethod
    def variable(cls, n: int, k: int):
        """The k-th coordinate (1-based)."""
        if not 1 <= k <= n:
            raise ValueError(f"variable index {k} outside 1..{n}")
        e = [0] * n
        e[k - 1] = 1
        return cls._from_clean(n, {tuple(e): ONE})

    @classmethod
    def square_norm(cls, n: int, upto: int | None = None):
        """x_1² + ... + x_upto² (default: all n variables)."""
        upto = n if upto is None else upto
        terms = {}
        for k in range(upto):
            e = [0] * n
            e[k] = 2
            terms[tuple(e)] = ONE
        return cls._from_clean(n, terms)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def _promote(self, other):
        if isinstance(other, MultiPolynomial):
            self._check(other)
            return other
        return type(self).constant(self.n, other)

    def __add__(self, other):
        other = self._promote(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return type(self)._from_clean(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._from_clean(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._promote(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = rf(c)
        if not c:
            return type(self).zero(self.n)
        return type(self)._from_clean(self.n, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPolynomial):
            return self.scale(other)
        self._check(other)
        out: dict[Exps, RationalFunction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return type(self)._from_clean(self.n, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(ONE / rf(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = type(self).constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPolynomial):
            return type(other) is type(self) and self.n == other.n and self.terms == other.terms
        try:
            return self == type(self).constant(self.n, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Exps, RationalFunction]]:
        return iter(sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True))

    # -- structure --------------------------------------------------------

    def coefficient(self, exps: Iterable[int]) -> RationalFunction:
        return self.terms.get(tuple(exps), ZERO)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading(self) -> tuple[Exps, RationalFunction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def map_coefficients(self, fn):
        return type(self)(self.n, {e: fn(c) for e, c in self.terms.items()})

    def specialize(self, lam=None, nu=None):
        return self.map_coefficients(lambda c: c.specialize(lam=lam, nu=nu))

    def substitute_nu(self, gap):
        return self.map_coefficients(lambda c: c.substitute_nu(gap))

    def derivative(self, k: int):
        """∂/∂(variable k), 1-based."""
        out = {}
        for e, c in self.terms.items():
            if e[k - 1]:
                e2 = list(e)
                e2[k - 1] -= 1
                out[tuple(e2)] = c * e[k - 1]
        return type(self)._from_clean(self.n, out)

    def divide_exact(self, divisor: "MultiPolynomial"):
        """Quotient of an exact division; ``ValueError`` if not divisible."""
        self._check(divisor)
        if not divisor:
            raise ZeroDivisionError("division by zero polynomial")
        lead_e, lead_c = divisor.leading()
        rem, quot = self, type(self).zero(self.n)
        while rem:
            e, c = rem.leading()
            if any(a < b for a, b in zip(e, lead_e)):
                raise ValueError("polynomial is not divisible")
            step = type(self).monomial(self.n, [a - b for a, b in zip(e, lead_e)], c / lead_c)
            quot = quot + step
            rem = rem - step * divisor
        return quot

    def max_power_dividing(self, divisor: "MultiPolynomial") -> tuple[int, "MultiPolynomial"]:
        """Largest k with divisor^k | self, and the cofactor."""
        if not self:
            return 0, self
        k, cur = 0, self
        while True:
            try:
                nxt = cur.divide_exact(divisor)
            except ValueError:
                return k, cur
            k, cur = k + 1, nxt

    def __call__(self, point, lam=0.0, nu=0.0):
        """Floating evaluation at ``point``; coefficients evaluated at (λ, ν)."""
        total = 0.0
        for e, c in self.terms.items():
            v = c(lam, nu)
            for xk, ek in zip(point, e):
                if ek:
                    v = v * xk**ek
            total = total + v
        return total

    # -- printing ---------------------------------------------------------

    def _symbol(self, k: int) -> str:
        return f"{self.var}_{k}"

    def _monomial_str(self, e: Exps) -> str:
        return "".join(self._symbol(k + 1) + superscript(a) for k, a in enumerate(e) if a)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self:
            mon = self._monomial_str(e)
            cs = str(c)
            neg = cs.startswith(MINUS) and not c.needs_parens
            mag = cs[1:] if neg else cs
            if c.needs_parens:
                mag = f"({cs})"
            if mon:
                body = mon if mag == "1" else f"{mag} {mon}"
            else:
                body = mag
            if not out:
                out.append((MINUS if neg else "") + body)
            else:
                out.append((f" {MINUS} " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"{type(self).__name__}({self.n}, {str(self)!r})"
