"""Exact and parameterized crossing minimisation for layered graph drawings."""

from .core import (
    Drawing,
    Instance,
    InvariantError,
    LayeredGraph,
    ParseError,
    count_crossings,
    decode_drawing,
    decode_instance,
    encode_drawing,
    encode_instance,
)

__version__ = "0.1.0"

__all__ = [
    "Drawing",
    "Instance",
    "InvariantError",
    "LayeredGraph",
    "ParseError",
    "count_crossings",
    "decode_drawing",
    "decode_instance",
    "encode_drawing",
    "encode_instance",
]
