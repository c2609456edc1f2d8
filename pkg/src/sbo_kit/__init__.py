"""Exact construction and verification of symmetry breaking operators on differential forms."""

from sbo_kit.rational import LAMBDA, NU, ONE, ZERO, RationalFunction, rf

__all__ = ["LAMBDA", "NU", "ONE", "ZERO", "RationalFunction", "rf"]
__version__ = "0.1.0"
