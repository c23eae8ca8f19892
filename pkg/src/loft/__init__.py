"""Local search over nested high-level types.

A constraint solver that reads an abstract specification (variables of
set, multiset, sequence, function and partition types under arbitrary
nesting), derives neighbourhood structures from the types, and runs an
iterated local search with incremental constraint evaluation.
"""

__version__ = "0.1.0"
