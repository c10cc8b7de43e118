"""Signal temporal logic: syntax, parser and monitors."""
from .monitor import affine_values, boolean_sat, robustness, robustness_profile
from .parser import make_atom, parse, parse_file
from .syntax import (
    FALSE,
    TRUE,
    Affine,
    And,
    Atom,
    FalseF,
    Formula,
    Interval,
    Not,
    Or,
    Ref,
    Until,
    always,
    delays,
    depth,
    eventually,
    free_channels,
    implies,
    true,
)

__all__ = [
    "FALSE", "TRUE", "Affine", "And", "Atom", "FalseF", "Formula", "Interval",
    "Not", "Or", "Ref", "Until", "affine_values", "always", "boolean_sat",
    "delays", "depth", "eventually", "free_channels", "implies", "make_atom",
    "parse", "parse_file", "robustness", "robustness_profile", "true",
]
