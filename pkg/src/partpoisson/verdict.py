"""Three-valued check results carrying a witness on failure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"
NOT_APPLICABLE = "not-applicable"


def render(obj) -> Any:
    """JSON-friendly rendering of polynomials, fields, matrices and scalars."""
    from fractions import Fraction

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "render"):
        return obj.render()
    if isinstance(obj, dict):
        return {_key(k): render(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [render(v) for v in obj]
    return str(obj)


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(i + 1) if isinstance(i, int) else str(i) for i in k)
    return str(k)


@dataclass
class Verdict:
    check: str
    status: str
    witness: Any = None
    where: Any = None
    reason: str = ""
    details: list["Verdict"] = field(default_factory=list)

    def __post_init__(self):
        if self.status == FAIL and self.witness is None:
            raise ValueError(f"failing verdict {self.check!r} needs a witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def __bool__(self):
        return self.passed

    @classmethod
    def ok(cls, check: str, reason: str = "", details=None) -> "Verdict":
        return cls(check, PASS, reason=reason, details=list(details or []))

    @classmethod
    def fail(cls, check: str, witness, where=None, reason: str = "", details=None) -> "Verdict":
        return cls(check, FAIL, witness=witness, where=where, reason=reason, details=list(details or []))

    @classmethod
    def combine(cls, check: str, parts: list["Verdict"]) -> "Verdict":
        """Fail on the first failing part, else indeterminate if any, else pass."""
        for p in parts:
            if p.failed:
                return cls(check, FAIL, witness=p.witness, where=p.where,
                           reason=f"{p.check}: {p.reason}".rstrip(": "), details=parts)
        if any(p.status == INDETERMINATE for p in parts):
            return cls(check, INDETERMINATE, details=parts)
        return cls(check, PASS, details=parts)

    def rendered_witness(self):
        return render(self.witness)

    def to_dict(self) -> dict:
        out = {"name": self.check, "status": self.status}
        if self.witness is not None:
            out["witness"] = render(self.witness)
        if self.where is not None:
            out["where"] = render(self.where)
        if self.reason:
            out["reason"] = self.reason
        if self.details:
            out["details"] = [d.to_dict() for d in self.details]
        return out
