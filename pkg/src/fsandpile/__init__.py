"""Freezing sandpile prediction: simulation, Boolean networks, macrocell
reductions between restricted alphabets, and specialized deciders."""

from .core import (
    FROZEN,
    Configuration,
    Query,
    Trace,
    allowed_set,
    decide_fspp,
    fire_sequential,
    is_a_simple,
    stabilize,
    step,
)
from .errors import FSPPError

__all__ = [
    "FROZEN",
    "Configuration",
    "FSPPError",
    "Query",
    "Trace",
    "allowed_set",
    "decide_fspp",
    "fire_sequential",
    "is_a_simple",
    "stabilize",
    "step",
]

__version__ = "0.1.0"
