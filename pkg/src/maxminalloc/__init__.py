"""Solvers for the (1, eps)-restricted max-min fair allocation problem."""

from .model import (
    Allocation,
    Epsilon,
    Instance,
    Item,
    LatticeValue,
    ParseError,
    min_value,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
    verify_allocation,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Epsilon",
    "Instance",
    "Item",
    "LatticeValue",
    "ParseError",
    "min_value",
    "parse_allocation",
    "parse_instance",
    "serialize_allocation",
    "serialize_instance",
    "verify_allocation",
    "__version__",
]
