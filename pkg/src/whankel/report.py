"""Inequality reports, the pass/fail tolerance policy, and report serialization."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "InequalityReport",
    "RATIO_RTOL",
    "RATIO_ATOL",
    "LOG_RTOL",
    "PASS",
    "FAIL",
    "VACUOUS",
    "compare",
    "reports_to_json",
    "reports_to_csv",
    "format_float",
]

RATIO_RTOL = 1e-4
RATIO_ATOL = 1e-9
# log-type checks: absolute slack LOG_RTOL * (energy scale of the inputs)
LOG_RTOL = 1e-4

PASS = "pass"
FAIL = "fail"
VACUOUS = "hypothesis not met"


def format_float(x) -> str:
    return format(float(x), ".17g")


@dataclass
class InequalityReport:
    """Outcome of evaluating one inequality.

    ``relation`` is ">=" or "<=" and reads ``lhs relation rhs``.
    ``ratio`` is lhs / rhs (None when rhs is 0); ``margin`` is the signed slack
    on the passing side (rhs - lhs for "<=", lhs - rhs for ">=").
    """

    name: str
    lhs: float
    rhs: float
    relation: str
    tolerance: float
    passed: bool
    status: str = PASS
    params: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def ratio(self):
        if self.rhs == 0:
            return None
        return self.lhs / self.rhs

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs if self.relation == ">=" else self.rhs - self.lhs

    @property
    def vacuous(self) -> bool:
        return self.status == VACUOUS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _clean(self.lhs),
            "rhs": _clean(self.rhs),
            "relation": self.relation,
            "ratio": _clean(self.ratio),
            "margin": _clean(self.margin),
            "tolerance": _clean(self.tolerance),
            "pass": bool(self.passed),
            "status": self.status,
            "params": _clean(self.params),
            "diagnostics": _clean(self.diagnostics),
        }

    def line(self) -> str:
        ratio = "n/a" if self.ratio is None else f"{self.ratio:.6g}"
        return (f"[{self.status.upper():>4}] {self.name}: lhs={self.lhs:.6g} {self.relation} "
                f"rhs={self.rhs:.6g} (ratio {ratio}) {self.params}")


def compare(name, lhs, rhs, relation, *, rtol=RATIO_RTOL, atol=RATIO_ATOL, params=None, diagnostics=None) -> InequalityReport:
    """Build a report under the tolerance policy.

    ">=" passes when lhs >= rhs (1 - rtol) - atol; "<=" passes when
    lhs <= rhs (1 + rtol) + atol. Relative slack is taken on |rhs|, so the
    rule stays meaningful for negative right-hand sides.
    """
    lhs, rhs = float(lhs), float(rhs)
    slack = rtol * abs(rhs) + atol
    if relation == ">=":
        ok = lhs >= rhs - slack
    elif relation == "<=":
        ok = lhs <= rhs + slack
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return InequalityReport(
        name=name, lhs=lhs, rhs=rhs, relation=relation, tolerance=slack, passed=bool(ok),
        status=PASS if ok else FAIL, params=dict(params or {}), diagnostics=dict(diagnostics or {}),
    )


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    try:
        x = float(obj)
    except (TypeError, ValueError):
        return str(obj)
    return x if math.isfinite(x) else None


def reports_to_json(reports, *, version: str, config_echo=None, seed=None) -> str:
    """Deterministic JSON envelope ``{version, config_echo, seed, reports}``.

    Floats are written with their shortest round-trip repr, so doubles survive
    a dump/load cycle bit for bit.
    """
    doc = {
        "version": version,
        "config_echo": _clean(config_echo or {}),
        "seed": seed,
        "reports": [r.to_dict() for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _param_str(params: dict) -> str:
    parts = []
    for k in sorted(params):
        v = params[k]
        if isinstance(v, float):
            v = format_float(v)
        parts.append(f"{k}={v}")
    return ";".join(parts)


def reports_to_csv(reports) -> str:
    out = io.StringIO()
    out.write("name,alpha,params,lhs,rhs,ratio,pass\n")
    for r in reports:
        alpha = r.params.get("alpha", "")
        alpha = format_float(alpha) if alpha != "" else ""
        ratio = "" if r.ratio is None else format_float(r.ratio)
        params = _param_str({k: v for k, v in r.params.items() if k != "alpha"})
        out.write(f"{r.name},{alpha},\"{params}\",{format_float(r.lhs)},{format_float(r.rhs)},{ratio},{str(r.passed).lower()}\n")
    return out.getvalue()
