"""Floating-point cross-checks: kernel evaluation, quadrature of pairings
with Gaussian test functions, homogeneity, and operator semantics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np
from scipy import special
from scipy.integrate import cubature

from sbo_kit.kernels import KernelExpression, g_polynomial
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import RationalFunction, rf
from sbo_kit.weyl import ConstCoeffOp


class ConvergenceError(ValueError):
    """Parameters outside the region where the pairing integral converges absolutely."""


@dataclass(frozen=True)
class TestForm:
    """P(x)·exp(−|x|²) with P given as {exponent tuple: float coefficient}."""

    n: int
    coeffs: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    @classmethod
    def from_polynomial(cls, poly: MultiPolynomial, lam=None, nu=None):
        coeffs = {}
        for e, c in poly.terms.items():
            coeffs[e] = complex(c(0.0 if lam is None else lam, 0.0 if nu is None else nu))
        return cls(poly.n, coeffs)

    @classmethod
    def gaussian(cls, n: int):
        return cls(n, {(0,) * n: 1.0})

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def __call__(self, x) -> np.ndarray:
        """Vectorized: x has shape (npoints, n)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        poly = np.zeros(x.shape[0], dtype=complex)
        for e, c in self.coeffs.items():
            poly += c * np.prod(x ** np.asarray(e), axis=1)
        return poly * np.exp(-np.sum(x * x, axis=1))


# -- kernel evaluation ----------------------------------------------------


def _term_data(entry: KernelExpression, lam, nu):
    data = []
    for t in entry.terms:
        try:
            pre = complex(t.prefactor(lam, nu))
        except ZeroDivisionError as exc:
            raise ValueError(f"Gamma pole in the prefactor at λ={lam}, ν={nu}") from exc
        monos = [(np.asarray(e), complex(c(lam, nu))) for e, c in t.poly.terms.items()]
        data.append((pre, t.a(lam, nu), t.b(lam, nu), t.kappa, monos))
    return data


def evaluate_kernel(entry: KernelExpression, x, lam, nu) -> complex:
    """Value of a kernel entry at a point with x ≠ 0 and x_n ≠ 0."""
    x = np.asarray(x, dtype=float)
    if not np.any(x) or x[-1] == 0:
        raise ValueError("kernel is singular at x = 0 and on x_n = 0")
    return complex(kernel_values(entry, x[None, :], lam, nu)[0])


def kernel_values(entry: KernelExpression, pts: np.ndarray, lam, nu) -> np.ndarray:
    pts = np.atleast_2d(pts)
    r2 = np.sum(pts * pts, axis=1)
    xn = pts[:, -1]
    out = np.zeros(pts.shape[0], dtype=complex)
    for pre, a, b, kappa, monos in _term_data(entry, lam, nu):
        poly = np.zeros(pts.shape[0], dtype=complex)
        for e, c in monos:
            poly += c * np.prod(pts**e, axis=1)
        val = pre * np.power(r2.astype(complex), a) * np.power(np.abs(xn).astype(complex), b)
        if kappa:
            val = val * np.sign(xn)
        out += val * poly
    return out


def homogeneity_ratio(entry: KernelExpression, x, lam, nu, scale: float = 2.0) -> complex:
    x = np.asarray(x, dtype=float)
    return evaluate_kernel(entry, scale * x, lam, nu) / evaluate_kernel(entry, x, lam, nu)


# -- pairing by quadrature ------------------------------------------------


def check_convergence(lam, nu, n: int) -> None:
    """Refuse unless Re λ ≥ |Re ν| + n + 2."""
    if complex(lam).real < abs(complex(nu).real) + n + 2:
        raise ConvergenceError(f"need Re λ ≥ |Re ν| + n + 2, got λ={lam}, ν={nu}, n={n}")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    status: str

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.value) if self.value else math.inf


def integrate_pairing(
    entry,
    f: TestForm,
    lam,
    nu,
    tol: float = 1e-8,
    x0=None,
    max_subdivisions: int = 20000,
) -> QuadratureResult:
    """∫ entry(y)·f(x₀ − y) dy over ℝⁿ, split along y_n = 0.

    ``entry`` is a KernelExpression or a vectorized callable of y alone.
    x₀ must lie on the hyperplane x_n = 0 (default: the origin).
    """
    n = f.n
    check_convergence(lam, nu, n)
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    if x0[-1] != 0:
        raise ValueError("evaluation point must satisfy x_n = 0")
    if isinstance(entry, KernelExpression):
        kernel = lambda y: kernel_values(entry, y, lam, nu)  # noqa: E731
    else:
        kernel = entry

    def integrand(y):
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = kernel(y)
        vals = np.where(np.isfinite(vals), vals, 0) * f(x0[None, :] - y)
        return np.stack([vals.real, vals.imag], axis=-1)

    total, err, statuses = 0j, 0.0, []
    lower = [-np.inf] * (n - 1)
    upper = [np.inf] * (n - 1)
    for a_n, b_n in ((-np.inf, 0.0), (0.0, np.inf)):
        res = cubature(
            integrand, lower + [a_n], upper + [b_n],
            rtol=tol, atol=0, max_subdivisions=max_subdivisions,
        )
        total += complex(res.estimate[0], res.estimate[1])
        err += float(np.hypot(*res.error))
        statuses.append(res.status)
    status = "converged" if all(s == "converged" for s in statuses) else "not_converged"
    return QuadratureResult(total, err, status)


# Direct formulas, evaluated without the symbolic Gamma calculus.  They give
# the two sides of the component identities independently of KernelExpression.


def _a_numeric(kappa: int, lam: float, nu: float, n: int) -> float:
    return float(special.rgamma((lam + nu - n + 1 + kappa) / 2) * special.rgamma((lam - nu + kappa) / 2))


def _poly_values(poly: MultiPolynomial, y: np.ndarray) -> np.ndarray:
    out = np.zeros(y.shape[0])
    for e, c in poly.terms.items():
        out += float(c.to_fraction()) * np.prod(y ** np.asarray(e), axis=1)
    return out


def direct_entry(sig, I, J, lam: float, nu: float):
    """y ↦ a_ε(λ,ν)|y|^{−2ν−2}|y_n|^{λ+ν−n}sgn(y_n)^κ g_{IJ}(y)."""
    n, kappa = sig.n, sig.kappa
    g = g_polynomial(sig, I, J)
    a = _a_numeric(kappa, lam, nu, n)

    def values(y):
        r2 = np.sum(y * y, axis=1)
        yn = y[:, -1]
        v = a * r2 ** (-nu - 1) * np.abs(yn) ** (lam + nu - n) * _poly_values(g, y)
        return v * np.sign(yn) if kappa else v

    return values


def direct_component_rhs(sig, I, J, lam: float, nu: float, kappa1_numerator: float = 2.0):
    """y ↦ constant·g_{IJ}(y)·[y_n]·Ã⁺ at the shifted parameters."""
    n = sig.n
    g = g_polynomial(sig, I, J)
    if sig.kappa == 0:
        c, lam2, nu2, extra = 2 / (lam - nu - 2), lam - 1, nu + 1, False
    else:
        c = kappa1_numerator / ((lam + nu - n) * (lam - nu - 1) * (lam - nu - 3))
        lam2, nu2, extra = lam - 2, nu + 1, True
    a = _a_numeric(0, lam2, nu2, n)

    def values(y):
        r2 = np.sum(y * y, axis=1)
        yn = y[:, -1]
        v = c * a * r2 ** (-nu2) * np.abs(yn) ** (lam2 + nu2 - n) * _poly_values(g, y)
        return v * yn if extra else v

    return values


def scalar_gaussian_closed_form(n: int, lam: float, nu: float) -> complex:
    """∫ Ã⁺_{λ,ν}(y) exp(−|y|²) dy = π^{(n−1)/2} / Γ((λ+ν)/2).

    Polar coordinates: the radial part gives ½Γ((λ−ν)/2), the sphere
    integral of |ω_n|^{λ+ν−n} gives 2π^{(n−1)/2}Γ((λ+ν−n+1)/2)/Γ((λ+ν)/2),
    and the normalizer cancels both numerator Gammas.
    """
    return complex(mpmath.pi ** ((n - 1) / 2) * mpmath.rgamma((lam + nu) / 2))


def relative_difference(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


# -- operator semantics ---------------------------------------------------


def gaussian_taylor(n: int, poly: MultiPolynomial, order: int) -> dict:
    """Exact Taylor coefficients of P(x)·exp(−|x|²) up to total degree ``order``."""
    gauss: dict = {(0,) * n: Fraction(1)}
    for k in range(n):
        nxt: dict = {}
        for e, c in gauss.items():
            for j in range(0, (order - sum(e)) // 2 + 1):
                e2 = list(e)
                e2[k] += 2 * j
                nxt[tuple(e2)] = nxt.get(tuple(e2), 0) + c * Fraction((-1) ** j, factorial(j))
        gauss = nxt
    out: dict = {}
    for e1, c1 in poly.terms.items():
        for e2, c2 in gauss.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            if sum(e) <= order:
                out[e] = out.get(e, 0) + c1 * c2
    return out


def apply_at_origin_exact(D: ConstCoeffOp, poly: MultiPolynomial, lam=None, nu=None) -> RationalFunction:
    """(D(P·e^{−|x|²}))(0) = Σ_β d_β·β!·[x^β](P·e^{−|x|²}), exactly."""
    D = D if lam is None and nu is None else D.specialize(lam=lam, nu=nu)
    poly = poly if lam is None and nu is None else poly.specialize(lam=lam, nu=nu)
    taylor = gaussian_taylor(D.n, poly, max(D.degree, 0))
    total = 0
    for beta, d in D.terms.items():
        c = taylor.get(beta, 0)
        if c:
            w = 1
            for b in beta:
                w *= factorial(b)
            total = total + d * c * w
    return rf(total)


def apply_at_origin_numeric(D: ConstCoeffOp, poly: MultiPolynomial, lam=None, nu=None) -> float:
    """Same value from mpmath numerical differentiation."""
    lam_v = 0.0 if lam is None else float(lam)
    nu_v = 0.0 if nu is None else float(nu)
    coeffs = [(e, float(complex(c(lam_v, nu_v)).real)) for e, c in poly.terms.items()]

    def f(*x):
        p = mpmath.mpf(0)
        for e, c in coeffs:
            term = mpmath.mpf(c)
            for xi, ei in zip(x, e):
                term *= xi**ei
            p += term
        return p * mpmath.exp(-sum(xi**2 for xi in x))

    total = mpmath.mpf(0)
    origin = [0] * D.n
    for beta, d in D.terms.items():
        total += float(complex(d(lam_v, nu_v)).real) * mpmath.diff(f, origin, beta)
    return float(total)


# -- reflection minors by floating linear algebra -------------------------


def psi_numeric(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.eye(len(x)) - 2 * np.outer(x, x) / np.dot(x, x)


def reflection_minor_numeric(x, I, J) -> float:
    """|x|²·det ψ(x)[I, J] by numpy."""
    x = np.asarray(x, dtype=float)
    if not I:
        return float(np.dot(x, x))
    psi = psi_numeric(x)
    sub = psi[np.ix_([p - 1 for p in I], [q - 1 for q in J])]
    return float(np.dot(x, x) * np.linalg.det(sub))
