"""Verification records shared by the checkers and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["VerificationReport", "judge", "REPORT_FIELDS"]

REPORT_FIELDS = ("case", "seed", "lhs", "rhs", "lhs_stderr", "rhs_stderr", "margin", "status", "ms")


def judge(margin: float, tolerance: float, lhs_stderr: float = 0.0, rhs_stderr: float = 0.0,
          conditional: bool = False) -> str:
    """``pass`` iff ``margin >= -(tolerance + 3 sigma)``; conditional cases only report evidence."""
    if conditional:
        return "evidence-only"
    if not math.isfinite(margin):
        return "fail"
    sigma = math.hypot(lhs_stderr, rhs_stderr)
    return "pass" if margin >= -(tolerance + 3.0 * sigma) else "fail"


@dataclass
class VerificationReport:
    case: str
    seed: int
    lhs: float
    rhs: float
    lhs_stderr: float = 0.0
    rhs_stderr: float = 0.0
    tolerance: float = 1e-9
    conditional: bool = False
    ms: float = 0.0
    detail: dict = field(default_factory=dict)
    status: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = judge(self.margin, self.tolerance, self.lhs_stderr, self.rhs_stderr, self.conditional)

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "evidence-only")

    @property
    def sigma(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)

    def row(self) -> dict:
        return {"case": self.case, "seed": self.seed, "lhs": self.lhs, "rhs": self.rhs,
                "lhs_stderr": self.lhs_stderr, "rhs_stderr": self.rhs_stderr, "margin": self.margin,
                "status": self.status, "ms": self.ms}
