"""Plain, LaTeX and JSON rendering of operators, plus a parser for plain output."""

from __future__ import annotations

import json
import re

from sympy import Poly, Symbol
from sympy.parsing.sympy_parser import implicit_multiplication, parse_expr, standard_transformations

from sbo_kit._text import MINUS, superscript, to_sympy_syntax
from sbo_kit.operators import FormOperator
from sbo_kit.polynomial import MultiPolynomial
from sbo_kit.rational import FIELD, RationalFunction
from sbo_kit.weyl import ConstCoeffOp

FORMATS = ("plain", "latex", "json")

# -- Juhl operators as polynomials in Δ′ and ∂_n ---------------------------


def juhl_monomials(op: ConstCoeffOp) -> list[tuple[int, int, RationalFunction]]:
    """Write op = Σ c·Δ′^k·∂_n^e; raises ValueError if that is impossible."""
    n = op.n
    by_e: dict[int, dict] = {}
    for e, c in op.terms.items():
        by_e.setdefault(e[-1], {})[e[:-1]] = c
    lap = MultiPolynomial.square_norm(n - 1) if n > 1 else None
    out = []
    for e in sorted(by_e, reverse=True):
        tangential = MultiPolynomial(n - 1, by_e[e])
        deg = tangential.degree
        if n == 1 or deg == 0:
            if deg > 0:
                raise ValueError("not a polynomial in Δ′ and ∂_n")
            out.append((0, e, tangential.coefficient((0,) * (n - 1))))
            continue
        if deg % 2:
            raise ValueError("not a polynomial in Δ′ and ∂_n")
        k = deg // 2
        quotient = tangential
        for _ in range(k):
            quotient = quotient.divide_exact(lap)
        if quotient.degree != 0:
            raise ValueError("not a polynomial in Δ′ and ∂_n")
        out.append((k, e, quotient.coefficient((0,) * (n - 1))))
    return out


def _coeff_plain(c: RationalFunction, has_factor: bool) -> tuple[bool, str]:
    s = str(c)
    neg = s.startswith(MINUS) and not c.needs_parens
    mag = s[1:] if neg else s
    if c.needs_parens:
        mag = f"({s})"
    if has_factor and mag == "1":
        mag = ""
    return neg, mag


def _join(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    out = []
    for idx, (neg, body) in enumerate(parts):
        if idx == 0:
            out.append((MINUS if neg else "") + body)
        else:
            out.append((f" {MINUS} " if neg else " + ") + body)
    return "".join(out)


def juhl_plain(op: ConstCoeffOp) -> str:
    """Terms c Δ′^k ∂_n^e, highest ∂_n power first."""
    parts = []
    for k, e, c in juhl_monomials(op):
        factors = ("Δ′" + superscript(k) if k else "") + ("∂_n" + superscript(e) if e else "")
        neg, mag = _coeff_plain(c, bool(factors))
        parts.append((neg, " ".join(x for x in (mag, factors) if x)))
    return _join(parts)


def juhl_latex(op: ConstCoeffOp) -> str:
    terms = []
    for k, e, c in juhl_monomials(op):
        f = ""
        if k:
            f += r"\Delta'" + (f"^{{{k}}}" if k > 1 else "")
        if e:
            f += r"\partial_n" + (f"^{{{e}}}" if e > 1 else "")
        terms.append(_latex_term(c, f))
    return _latex_join(terms)


# -- general constant-coefficient operators -------------------------------


def op_plain(op: ConstCoeffOp) -> str:
    return str(op)


def _latex_term(c: RationalFunction, factor: str) -> tuple[bool, str]:
    body = c.latex()
    neg = body.startswith("-")
    if neg:
        body = body[1:]
    if factor:
        if body == "1":
            body = ""
        elif c.needs_parens:
            body = rf"\left({c.latex()}\right)"
            neg = False
    return neg, (body + " " + factor).strip()


def _latex_join(terms) -> str:
    if not terms:
        return "0"
    out = []
    for idx, (neg, body) in enumerate(terms):
        out.append(("-" if neg else "") + body if idx == 0 else (" - " if neg else " + ") + body)
    return "".join(out)


def op_latex(op: ConstCoeffOp) -> str:
    terms = []
    for e, c in op:
        f = "".join(
            rf"\partial_{{{k + 1}}}" + (f"^{{{a}}}" if a > 1 else "") for k, a in enumerate(e) if a
        )
        terms.append(_latex_term(c, f))
    return _latex_join(terms)


# -- form operators -------------------------------------------------------


def _fmt_set(I) -> str:
    return "{" + ",".join(map(str, I)) + "}"


def scalar_identity_factor(fop: FormOperator) -> ConstCoeffOp | None:
    """c when fop = c·id (same degree, same dimension, every diagonal entry c)."""
    if fop.target_n != fop.n or fop.i != fop.j or not fop.entries:
        return None
    ops = set()
    for (I, J), op in fop.entries.items():
        if I != J:
            return None
        ops.add(op)
    if len(ops) != 1 or len(fop.entries) != len(fop.sources):
        return None
    return ops.pop()


def form_plain(fop: FormOperator) -> str:
    c = scalar_identity_factor(fop)
    if c is not None:
        text = str(c)
        if len(c.terms) > 1 or c.degree > 0:
            text = f"({text})"
        return f"{text} · id"
    return str(fop)


def form_latex(fop: FormOperator) -> str:
    c = scalar_identity_factor(fop)
    if c is not None:
        return rf"\left({op_latex(c)}\right) \cdot \mathrm{{id}}"
    rows = [
        rf"{_latex_set(I)} \mapsto {_latex_set(J)} &: {op_latex(op)}"
        for (I, J), op in sorted(fop.entries.items())
    ]
    if not rows:
        return "0"
    return r"\begin{aligned}" + r" \\ ".join(rows) + r"\end{aligned}"


def _latex_set(I) -> str:
    return r"\{" + ",".join(map(str, I)) + r"\}"


def form_json(fop: FormOperator) -> dict:
    return {
        "n": fop.n,
        "i": fop.i,
        "target_n": fop.target_n,
        "j": fop.j,
        "entries": [
            {"I": list(I), "J": list(J), "op": str(op)} for (I, J), op in sorted(fop.entries.items())
        ],
    }


def latex_document(body: str) -> str:
    """A standalone document around one displayed formula."""
    return "\n".join(
        [
            r"\documentclass{article}",
            r"\usepackage{amsmath}",
            r"\begin{document}",
            r"\[",
            body,
            r"\]",
            r"\end{document}",
            "",
        ]
    )


def dump_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False)


# -- parsing plain output back --------------------------------------------

_TRANSFORMS = standard_transformations + (implicit_multiplication,)
_PARTIAL = re.compile(r"∂_(\d+|n)")


def parse_operator(text: str, n: int) -> ConstCoeffOp:
    """Inverse of the plain renderings: ∂_k, ∂_n, Δ′, λ, ν, fractions, superscripts."""
    text = text.strip()
    if text.endswith("· id"):
        text = text[: -len("· id")].strip()
    ds = [Symbol(f"D{k}") for k in range(1, n + 1)]
    local = {"lam": Symbol("lam"), "nu": Symbol("nu"), "Lap": Symbol("Lap")}
    local.update({f"D{k}": ds[k - 1] for k in range(1, n + 1)})
    body = _PARTIAL.sub(lambda m: f" D{n if m.group(1) == 'n' else m.group(1)} ", text)
    body = body.replace("Δ′", " Lap ")
    expr = parse_expr(to_sympy_syntax(body), local_dict=local, transformations=_TRANSFORMS)
    expr = expr.subs(local["Lap"], sum(d**2 for d in ds[:-1]))
    poly = Poly(expr.expand(), *ds)
    terms = {}
    for mono, coeff in poly.terms():
        terms[tuple(mono)] = RationalFunction(FIELD.from_expr(coeff))
    return ConstCoeffOp(n, terms)


def parse_form_operator(text: str, n: int, i: int) -> FormOperator:
    """Inverse of ``form_plain`` for square operators on ℝⁿ."""
    text = text.strip()
    if text.endswith("· id"):
        return FormOperator.identity(n, i, parse_operator(text, n))
    if text == "0":
        return FormOperator.zero(n, i, i)
    entries = {}
    for line in text.splitlines():
        m = re.match(r"\[\{([\d,]*)\} → \{([\d,]*)\}\] (.*)$", line.strip())
        if not m:
            raise ValueError(f"cannot parse line {line!r}")
        I = tuple(int(v) for v in m.group(1).split(",") if v)
        J = tuple(int(v) for v in m.group(2).split(",") if v)
        entries[(I, J)] = parse_operator(m.group(3), n)
    j = len(next(iter(entries))[1]) if entries else i
    return FormOperator(n, i, j, entries)


# -- kernels --------------------------------------------------------------


def _poly_latex(poly: MultiPolynomial) -> str:
    terms = []
    for e, c in poly:
        f = " ".join(f"x_{{{k + 1}}}" + (f"^{{{a}}}" if a > 1 else "") for k, a in enumerate(e) if a)
        terms.append(_latex_term(c, f))
    return _latex_join(terms)


def kernel_latex(entry) -> str:
    if not entry.terms:
        return "0"
    out = []
    for t in entry.terms:
        parts = []
        if t.prefactor != 1:
            parts.append(t.prefactor.latex())
        if t.a.as_rf() != 0:
            parts.append(rf"|x|^{{{(t.a * 2).as_rf().latex()}}}")
        if t.b.as_rf() != 0:
            parts.append(rf"|x_n|^{{{t.b.as_rf().latex()}}}")
        if t.kappa:
            parts.append(r"\operatorname{sgn}(x_n)")
        parts.append(rf"\left({_poly_latex(t.poly)}\right)")
        out.append(r" \, ".join(parts))
    return " + ".join(out)


def kernel_plain(matrix: dict) -> str:
    lines = [f"[{_fmt_set(I)} → {_fmt_set(J)}] {e}" for (I, J), e in sorted(matrix.items()) if e.terms]
    return "\n".join(lines) if lines else "0"
