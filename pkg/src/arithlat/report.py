"""Structured verification outcomes."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
UNRESOLVED = "unresolved"
BUDGET_EXHAUSTED = "budget_exhausted"
STATUSES = (PASS, FAIL, UNRESOLVED, BUDGET_EXHAUSTED)


@dataclass
class Report:
    check_name: str
    status: str
    witness: Any = None
    elapsed_ms: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError("a failing report must carry a witness")

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(
            check_name=data["check_name"],
            status=data["status"],
            witness=data.get("witness"),
            elapsed_ms=data.get("elapsed_ms", 0.0),
            params=data.get("params", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


class Stopwatch:
    def __init__(self):
        self.elapsed_ms = 0.0


@contextmanager
def stopwatch():
    """Context manager measuring wall time in milliseconds."""
    sw = Stopwatch()
    start = time.perf_counter()
    try:
        yield sw
    finally:
        sw.elapsed_ms = (time.perf_counter() - start) * 1000.0
