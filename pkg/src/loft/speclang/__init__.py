from .ast import Specification
from .parser import SpecError, parse_params, parse_spec
from .printer import print_spec
from .instantiate import TypedModel, instantiate

__all__ = [
    "Specification", "SpecError", "parse_spec", "parse_params",
    "print_spec", "TypedModel", "instantiate",
]
