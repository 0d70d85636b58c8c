"""Exact tools for deciding subnormality of weighted composition operators
on discrete measure spaces, generation trees and matrix symbols."""

from .base import INF, Check, ParseError
from .consistency import (
    Family,
    Status,
    Verdict,
    decide_subnormal_discrete,
    generate_fixed_point_example,
    verify_cc,
    verify_scc,
)
from .moments import AtomicMeasure, is_stieltjes, representing_measure_window
from .mspace import MeasureSpace, SelfMap, derivative_table

__all__ = [
    "INF",
    "Check",
    "ParseError",
    "Family",
    "Status",
    "Verdict",
    "decide_subnormal_discrete",
    "generate_fixed_point_example",
    "verify_cc",
    "verify_scc",
    "AtomicMeasure",
    "is_stieltjes",
    "representing_measure_window",
    "MeasureSpace",
    "SelfMap",
    "derivative_table",
]
