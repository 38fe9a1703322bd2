"""Closed-form lower bounds and instance-versus-bound reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

__all__ = [
    "FORMULAS",
    "NOT_CHECKABLE",
    "binary_entropy",
    "exponent_constant",
    "bound_value",
    "BoundReport",
    "check_instance",
    "reports_to_csv",
]

# formula id -> (bounded quantity, description)
FORMULAS = {
    "ldc2": ("m", "2-query LDC: m >= 2^(cn-1), c = 1-H(1/2+3 delta eps/14)"),
    "ldc2_xor": ("m", "2-query XOR LDC: m >= 2^(cn-1), c = 1-H(1/2+3 delta eps/8)"),
    "lqdc1": ("m", "1-query LQDC: m >= 2^(cn-1), c = 1-H(1/2+delta eps/4)"),
    "ldc2_alphabet": ("m", "2-query LDC over {0,1}^l: m >= 2^(cn-l), c = 1-H(1/2+delta eps/2^(3l+1))"),
    "pir2": ("t", "2-server 1-bit PIR: t >= (1-H(1/2+4 eps/7))n - 2"),
    "pir2_xor": ("t", "2-server XOR PIR: t >= (1-H(1/2+eps))n - 1"),
}

NOT_CHECKABLE = {
    "pir2_large_answers": "t >= Omega(n eps^2 / 2^(6a)); no explicit constant, not checkable",
}


def binary_entropy(p) -> float:
    p = float(p)
    if not -1e-12 <= p <= 1 + 1e-12:
        raise ValueError(f"p = {p} lies outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _inner(formula: str, delta, eps, ell: int = 1) -> float:
    d, e = float(delta), float(eps)
    if formula == "ldc2":
        return 0.5 + 3 * d * e / 14
    if formula == "ldc2_xor":
        return 0.5 + 3 * d * e / 8
    if formula == "lqdc1":
        return 0.5 + d * e / 4
    if formula == "ldc2_alphabet":
        return 0.5 + d * e / 2 ** (3 * ell + 1)
    if formula == "pir2":
        return 0.5 + 4 * e / 7
    if formula == "pir2_xor":
        return 0.5 + e
    raise ValueError(f"unknown formula {formula!r}")


def exponent_constant(formula: str, delta=None, eps=None, ell: int = 1) -> float:
    """c = 1 - H(inner), the rate constant of a formula."""
    if formula not in FORMULAS:
        raise ValueError(f"unknown formula {formula!r}")
    if eps is None or not 0 <= float(eps) <= 0.5:
        raise ValueError("eps must lie in [0, 1/2]")
    if FORMULAS[formula][0] == "m" and (delta is None or not 0 <= float(delta) <= 1):
        raise ValueError("delta must lie in [0, 1]")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    u = 2 * _inner(formula, delta or 0, eps, ell) - 1
    if u >= 1:
        return 1.0
    # 1 - H(1/2 + u/2) without the cancellation of the direct form at small u
    return (math.log1p(-u * u) + 2 * u * math.atanh(u)) / (2 * math.log(2))


def bound_value(formula: str, params: Mapping) -> float:
    """Right-hand side of the bound: minimal m (codes) or minimal t (PIR)."""
    if formula in NOT_CHECKABLE:
        raise ValueError(NOT_CHECKABLE[formula])
    if formula not in FORMULAS:
        raise ValueError(f"unknown formula {formula!r}")
    n = params["n"]
    if n < 1:
        raise ValueError("n must be positive")
    ell = int(params.get("ell", 1))
    c = exponent_constant(formula, params.get("delta"), params["eps"], ell)
    if formula in ("ldc2", "ldc2_xor", "lqdc1"):
        return 2.0 ** (c * n - 1)
    if formula == "ldc2_alphabet":
        return 2.0 ** (c * n - ell)
    if formula == "pir2":
        return c * n - 2
    return c * n - 1


@dataclass(frozen=True)
class BoundReport:
    formula: str
    params: Mapping
    bound: float | None
    value: float | None
    quantity: str
    note: str = ""

    @property
    def slack(self) -> float | None:
        if self.bound is None:
            return None
        return self.value - self.bound

    @property
    def verdict(self) -> str:
        if self.bound is None:
            return "not checkable"
        return "pass" if self.value >= self.bound - 1e-12 else "fail"

    def as_dict(self) -> dict:
        return {
            "formula": self.formula,
            "params": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()},
            "quantity": self.quantity,
            "value": self.value,
            "bound": self.bound,
            "slack": self.slack,
            "verdict": self.verdict,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))


def check_instance(formula: str, params: Mapping) -> BoundReport:
    """Compare a constructed instance's m (or t) with the formula's lower bound.

    ``params`` carries n, the instance size under key ``m`` or ``t``, and the
    verified delta / eps (and ell where relevant).
    """
    if formula in NOT_CHECKABLE:
        return BoundReport(formula, dict(params), None, None, "t", NOT_CHECKABLE[formula])
    if formula not in FORMULAS:
        raise ValueError(f"unknown formula {formula!r}")
    quantity = FORMULAS[formula][0]
    if quantity not in params:
        raise ValueError(f"instance must carry {quantity!r}")
    return BoundReport(formula, dict(params), bound_value(formula, params), float(params[quantity]), quantity)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["formula", "n", "delta", "eps", "ell", "quantity", "value", "bound", "slack", "verdict"])
    for r in reports:
        p = r.params
        w.writerow([
            r.formula, p.get("n"), p.get("delta", ""), p.get("eps"), p.get("ell", ""),
            r.quantity, "" if r.value is None else r.value,
            "" if r.bound is None else repr(r.bound),
            "" if r.slack is None else repr(r.slack), r.verdict,
        ])
    return buf.getvalue()
