"""Pre-search model rewrites: free integer variable elimination.

A top-level constraint ``a = e`` where ``a`` is a free integer find and
``e`` does not mention ``a`` lets us delete ``a``: every occurrence is
replaced by ``e`` and the constraint becomes ``e`` in D(a), or True when
interval analysis shows the inclusion always holds.
"""

from __future__ import annotations

from .. import domains as D
from ..speclang import ast as A
from ..speclang.instantiate import TypedModel


def eliminate_integer_invariants(model: TypedModel) -> TypedModel:
    finds = list(model.finds)
    constraints = list(model.constraints)
    objective = model.objective
    eliminated = list(model.eliminated)
    changed = True
    while changed:
        changed = False
        for ci, c in enumerate(constraints):
            m = _match_equality(c, dict(finds))
            if m is None:
                continue
            name, expr, dom = m
            replacement = _membership_constraint(expr, dom, dict(finds))
            sub = lambda e: _substitute(e, name, expr)
            constraints = [
                replacement if i == ci else sub(x) for i, x in enumerate(constraints)
            ]
            if objective is not None:
                objective = (objective[0], sub(objective[1]))
            eliminated = [(n, sub(d)) for n, d in eliminated]
            eliminated.append((name, expr))
            finds = [(n, d) for n, d in finds if n != name]
            changed = True
            break
    return TypedModel(finds, constraints, objective, model.enums,
                      model.params, model.spec, eliminated)


def _match_equality(c, find_domains):
    if not (isinstance(c, A.BinOp) and c.op == "="):
        return None
    for var_side, expr_side in ((c.a, c.b), (c.b, c.a)):
        if not isinstance(var_side, A.Ref):
            continue
        dom = find_domains.get(var_side.name)
        if dom is None or dom.kind != "int":
            continue
        if _mentions(expr_side, var_side.name):
            continue
        return var_side.name, expr_side, dom
    return None


def _membership_constraint(expr, dom: D.Domain, find_domains):
    span = _interval(expr, find_domains)
    if span is not None:
        lo, hi = span
        if any(rlo <= lo and hi <= rhi for rlo, rhi in dom.ranges):
            return A.Const(True, D.dbool())
    alternatives = []
    for rlo, rhi in dom.ranges:
        alternatives.append(A.BinOp(
            "/\\",
            A.BinOp(">=", expr, A.IntLit(rlo)),
            A.BinOp("<=", expr, A.IntLit(rhi)),
        ))
    out = alternatives[0]
    for alt in alternatives[1:]:
        out = A.BinOp("\\/", out, alt)
    return out


def _interval(e, find_domains):
    if isinstance(e, A.IntLit):
        return (e.value, e.value)
    if isinstance(e, A.Const) and isinstance(e.value, int) and not isinstance(e.value, bool):
        return (e.value, e.value)
    if isinstance(e, A.Ref):
        dom = find_domains.get(e.name)
        if dom is not None and dom.kind == "int":
            return (dom.ranges[0][0], dom.ranges[-1][1])
        return None
    if isinstance(e, A.UnaryOp) and e.op == "-":
        s = _interval(e.a, find_domains)
        return None if s is None else (-s[1], -s[0])
    if isinstance(e, A.Call) and isinstance(e.fn, A.Ref) and e.fn.name == "toInt":
        return (0, 1)
    if isinstance(e, A.BinOp) and e.op in ("+", "-", "*"):
        a = _interval(e.a, find_domains)
        b = _interval(e.b, find_domains)
        if a is None or b is None:
            return None
        if e.op == "+":
            return (a[0] + b[0], a[1] + b[1])
        if e.op == "-":
            return (a[0] - b[1], a[1] - b[0])
        prods = [x * y for x in a for y in b]
        return (min(prods), max(prods))
    return None


def _mentions(e, name) -> bool:
    if isinstance(e, A.Ref):
        return e.name == name
    from .build import _subexprs
    return any(_mentions(x, name) for x in _subexprs(e))


def _substitute(e, name, replacement):
    if isinstance(e, A.Ref):
        return replacement if e.name == name else e
    from ..speclang.instantiate import _map_children
    return _map_children(e, lambda x: _substitute(x, name, replacement))
