"""Executable white-box cryptography: keyed program families, obfuscators,
game-based experiments and Monte Carlo advantage estimation."""

from . import schemes  # noqa: F401  (registers the concrete families)
from .core import (
    Exhaustive,
    Family,
    Native,
    Poly,
    Sampled,
    Table,
    deserialize_program,
    eval_family,
    eval_program,
    exact_equal,
    get_family,
    program_size,
    sample_key,
    serialize_program,
)
from .rng import RngStream
from .stats import AdvantageEstimate

__version__ = "0.1.0"

__all__ = [
    "AdvantageEstimate", "Exhaustive", "Family", "Native", "Poly", "RngStream", "Sampled", "Table",
    "deserialize_program", "eval_family", "eval_program", "exact_equal", "get_family", "program_size",
    "sample_key", "serialize_program",
]
