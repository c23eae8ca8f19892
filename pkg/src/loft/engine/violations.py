"""Top-down distribution of constraint violations onto variables.

Each constraint's violation starts at its top operator and descends.
The default behaviour passes the amount and optional explanation label
(too_small / too_large) unchanged to every operand; comparisons split
with directional labels, toInt clamps the amount to 1 and absorbs a
violation whose label cannot reduce its value, and amounts are dropped
at constants and parameters.  Variable paths accumulate; the violation
of a containing structure is its own amount plus the sum over its
elements.
"""

from __future__ import annotations

from ..values import VFunc, VPart, VSeq, VSet, VTuple, Value, to_canon
from .comprehension import CompNode
from .nodes import (
    AbsNode, AllDiffNode, AndNode, ApplyNode, Arith, BinderRefNode, CardNode,
    CmpNode, ConstFuncApplyNode, ConstNode, EqValueNode, ExtremumNode,
    ImplyNode, InNode, NegNode, NotNode, OrNode, PartsNode, SetOpNode,
    SubsetEqNode, SumNode, ToIntNode, TupleLitNode, VarRefNode, _Aggregate,
)

TOO_SMALL = "too_small"
TOO_LARGE = "too_large"


class ViolationMap:
    """Per-element violation amounts, keyed by runtime value object."""

    def __init__(self):
        self.amounts = {}
        self.labels = {}
        self._keep = []  # keeps keyed objects alive while the map is
        self._rolled = {}

    def record(self, obj: Value, amount: int, label) -> None:
        key = id(obj)
        if key not in self.amounts:
            self.amounts[key] = 0
            self.labels[key] = {}
            self._keep.append(obj)
        self.amounts[key] += amount
        if label is not None:
            self.labels[key][label] = self.labels[key].get(label, 0) + 1

    def own(self, obj: Value) -> int:
        return self.amounts.get(id(obj), 0)

    def labels_of(self, obj: Value) -> set:
        return set(self.labels.get(id(obj), ()))

    def rolled(self, obj: Value) -> int:
        """Own amount plus the rolled amounts of all nested elements."""
        key = id(obj)
        if key in self._rolled:
            return self._rolled[key]
        total = self.own(obj)
        for child in _value_children(obj):
            total += self.rolled(child)
        self._rolled[key] = total
        return total


def _value_children(v: Value):
    if isinstance(v, (VSet, VSeq, VTuple, VPart)):
        return v.members
    if isinstance(v, VFunc):
        return list(v.defined) + list(v.images)
    return ()


def distribute_violations(ctx) -> ViolationMap:
    vmap = ViolationMap()
    for constraint in ctx.root.children:
        _desc(constraint, constraint.violation, None, vmap)
    return vmap


def _desc(node, amount, label, vmap: ViolationMap):
    if amount <= 0:
        return
    if isinstance(node, ConstNode):
        return
    if isinstance(node, (VarRefNode, BinderRefNode)):
        if isinstance(node.target, Value):
            vmap.record(node.target, amount, label)
        return
    if isinstance(node, ApplyNode):
        fn = node.children[0]
        fv = fn.value
        if node.defined and node.member_index is not None and isinstance(fv, (VFunc, VSeq)):
            member = fv.members[node.member_index] if isinstance(fv, VSeq) \
                else fv.images[node.member_index]
            vmap.record(member, amount, label)
        _desc(node.children[1], amount, label, vmap)
        return
    if isinstance(node, ConstFuncApplyNode):
        _desc(node.children[0], amount, label, vmap)
        return
    if isinstance(node, CmpNode):
        a, b = node.children
        la = lb = None
        if node.op in ("<", "<="):
            la, lb = TOO_LARGE, TOO_SMALL
        elif node.op in (">", ">="):
            la, lb = TOO_SMALL, TOO_LARGE
        elif node.op == "=" and a.defined and b.defined:
            if a.value < b.value:
                la, lb = TOO_SMALL, TOO_LARGE
            elif a.value > b.value:
                la, lb = TOO_LARGE, TOO_SMALL
        _desc(a, amount, la, vmap)
        _desc(b, amount, lb, vmap)
        return
    if isinstance(node, ToIntNode):
        operand = node.children[0]
        if not operand.defined:
            _desc(operand, amount, label, vmap)
            return
        # toInt's value can change by at most 1, and only in one direction
        direction = TOO_LARGE if operand.value else TOO_SMALL
        if label is not None and label != direction:
            return  # the requested change cannot reduce the violation
        _desc(operand, min(amount, 1), direction, vmap)
        return
    if isinstance(node, _Aggregate):
        for member in node.member_nodes:
            _desc(member, amount, label, vmap)
        return
    if isinstance(node, CompNode):
        for member in node.children:
            _desc(member, amount, label, vmap)
        return
    for child in node.children:
        _desc(child, amount, label, vmap)
