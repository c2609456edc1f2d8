"""Verification outcomes shared by every suite."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    suite: str
    case: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    millis: float = 0.0
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "case": self.case,
            "status": self.status,
            "lhs": "" if self.passed else self.lhs,
            "rhs": "" if self.passed else self.rhs,
            "millis": round(self.millis, 3),
        }

    def __str__(self):
        head = f"[{self.status.upper()}] {self.suite} {self.case}"
        if self.passed:
            return head
        return f"{head}\n  lhs: {self.lhs}\n  rhs: {self.rhs}" + (
            f"\n  {self.detail}" if self.detail else ""
        )


def compare(suite: str, case: str, lhs, rhs, started: float | None = None, detail: str = ""):
    """Report for ``lhs == rhs``; canonical forms are kept only on failure."""
    ok = lhs == rhs
    millis = 0.0 if started is None else (time.perf_counter() - started) * 1000
    return VerificationReport(
        suite, case, bool(ok), "" if ok else str(lhs), "" if ok else str(rhs), millis, detail
    )


@dataclass
class Timer:
    start: float = field(default_factory=time.perf_counter)

    @property
    def millis(self) -> float:
        return (time.perf_counter() - self.start) * 1000


@contextmanager
def timed():
    t = Timer()
    yield t
