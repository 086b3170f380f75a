"""Verdict reports shared by every criterion."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
VERDICTS = (HOLDS, FAILS, INCONCLUSIVE)

CLOSED_FORM = "closed-form"
TRUNCATED = "truncated-sup"
EXTRAPOLATED = "truncated-sup-with-limit-extrapolation"
METHODS = (CLOSED_FORM, TRUNCATED, EXTRAPOLATED)


@dataclass
class CriterionReport:
    """Outcome of a truncated test of an infinite condition.

    ``estimate`` is the number the verdict was decided on; ``truncation``
    names the cut-offs actually used; ``details`` holds any further numeric
    evidence (witnesses, per-index estimates, stability diagnostics).
    """

    name: str
    verdict: str
    estimate: float
    method: str
    truncation: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def to_dict(self) -> dict:
        return jsonable(asdict(self))


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(obj, "to_json_obj"):
        return jsonable(obj.to_json_obj())
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON (sorted keys, strict floats)."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
