"""Gaussian objects in the Bargmann (Abc) representation."""

from .core import (
    AbcTriple,
    ContractionPlan,
    Wire,
    WireKind,
    WireLayout,
    apply,
    contract,
    dumps,
    inner,
    loads,
    partial_trace,
    reorder,
    trace,
)
from .errors import BargmannError

__version__ = "0.1.0"

__all__ = [
    "AbcTriple",
    "BargmannError",
    "ContractionPlan",
    "Wire",
    "WireKind",
    "WireLayout",
    "apply",
    "contract",
    "dumps",
    "inner",
    "loads",
    "partial_trace",
    "reorder",
    "trace",
]
