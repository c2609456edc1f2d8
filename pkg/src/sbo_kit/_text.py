"""Shared text helpers for plain-text rendering and re-parsing."""

from __future__ import annotations

import re

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")
_UNSUP = {v: k for k, v in zip("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")}
_SUP_RUN = re.compile("[⁰¹²³⁴⁵⁶⁷⁸⁹⁻]+")

MINUS = "−"


def superscript(k: int) -> str:
    """Exponent suffix; empty for 1."""
    return "" if k == 1 else str(k).translate(_SUP)


def desuperscript(text: str) -> str:
    """Turn superscript runs into ``**k`` so sympy can parse them."""
    return _SUP_RUN.sub(lambda m: "**" + "".join(_UNSUP[c] for c in m.group()), text)


def to_sympy_syntax(text: str) -> str:
    text = text.replace(MINUS, "-").replace("·", "*").replace("λ", " lam ").replace("ν", " nu ")
    return desuperscript(text)
