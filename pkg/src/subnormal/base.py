"""Exact extended-rational arithmetic and small shared result types."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Any

import numpy as np

INF = math.inf


class ParseError(ValueError):
    """Malformed numeric or structural input."""


def is_inf(value) -> bool:
    return isinstance(value, float) and math.isinf(value) and value > 0


def to_number(value) -> Fraction | float:
    """Coerce input to an exact Fraction when possible.

    Floats pass through unchanged (they mark a tolerance-tagged computation)
    and the strings "inf"/"oo" map to ``INF``.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "+inf", "oo", "infinity"):
            return INF
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {value!r}") from None
        except ValueError:
            raise ParseError(f"not a rational number: {value!r}") from None
    if isinstance(value, Real):
        return float(value)
    raise ParseError(f"not a number: {value!r}")


def ext_mul(a, b):
    """Product with the convention 0 * inf = 0."""
    if a == 0 or b == 0:
        return Fraction(0)
    return a * b


def ext_div(a, b):
    """Quotient with 1/0 = inf and 0/0 = 1."""
    if b == 0:
        return Fraction(1) if a == 0 else INF
    if is_inf(b):
        return INF if is_inf(a) else Fraction(0)
    return a / b


def fmt(value) -> str:
    """Render an extended number the way the JSON interfaces expect."""
    if is_inf(value):
        return "inf"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True)
class Check:
    """Outcome of a verification: truthy on success, otherwise carries a witness."""

    ok: bool
    witness: Any = None
    reason: str = ""
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, **details) -> "Check":
        return cls(True, None, "", details)

    @classmethod
    def failed(cls, reason: str, witness=None, **details) -> "Check":
        return cls(False, witness, reason, details)

    def as_dict(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out["reason"] = self.reason
            out["witness"] = jsonable(self.witness)
        if self.details:
            out["details"] = jsonable(self.details)
        return out


def jsonable(value):
    """Recursively convert numbers and containers into JSON-friendly values."""
    if isinstance(value, (Fraction, float)) and not isinstance(value, bool):
        return fmt(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [jsonable(v) for v in sorted(value)]
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if hasattr(value, "as_dict"):
        return value.as_dict()
    return value
