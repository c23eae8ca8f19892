from .context import EvalContext, OverflowAbort, Transaction
from .nodes import VIOL_UNDEF
from .rewrite import eliminate_integer_invariants
from .violations import ViolationMap, distribute_violations

__all__ = [
    "EvalContext", "OverflowAbort", "Transaction", "VIOL_UNDEF",
    "eliminate_integer_invariants", "ViolationMap", "distribute_violations",
]
