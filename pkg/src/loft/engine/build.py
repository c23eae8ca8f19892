"""Build expression trees from a typed model.

forAll becomes a conjunction over a comprehension, exists a disjunction,
and a maximising objective is negated so search always minimises.
Guard conditions on dynamic comprehensions are folded into the body
(forAll: guard -> body, exists: guard /\\ body, sum: toInt(guard) * body);
static comprehensions filter at unroll time.
"""

from __future__ import annotations

from ..canon import kind_of, make_seq
from ..values import VBool, VFunc, VInt, VSeq, VSet, VTuple, VPart, enumerate_domain
from ..speclang import ast as A
from ..speclang.parser import SpecError
from .comprehension import CompNode
from .context import EvalContext, OneWayLink
from .nodes import (
    AbsNode, AllDiffNode, AndNode, ApplyNode, Arith, BinderRefNode, CardNode,
    CmpNode, ConstFuncApplyNode, ConstNode, EqValueNode, ExtremumNode,
    ImplyNode, InNode, NegNode, Node, NotNode, OrNode, PartsNode, SetOpNode,
    SubsetEqNode, SumNode, ToIntNode, TupleLitNode, VarRefNode,
)


def build_trees(model, ctx: EvalContext):
    b = Builder(model, ctx)
    constraint_nodes = [b.build(c, {}) for c in model.constraints]
    root = AndNode(constraint_nodes)
    for c in constraint_nodes:
        _scan_links(ctx, b, c, guard=None)
    obj_root = None
    if model.objective is not None:
        direction, expr = model.objective
        obj_root = b.build(expr, {})
        if direction == "maximise":
            obj_root = NegNode(obj_root)
    return root, obj_root


class Builder:
    def __init__(self, model, ctx):
        self.model = model
        self.ctx = ctx
        self._tables = {}  # id(function canon) -> lookup dict, built once

    # -- kinds ------------------------------------------------------------

    def kind(self, e, env) -> str:
        if isinstance(e, A.IntLit):
            return "int"
        if isinstance(e, A.BoolLit):
            return "bool"
        if isinstance(e, A.Const):
            return e.type.kind if e.type is not None else _canon_kind(e.value)
        if isinstance(e, A.Ref):
            if e.name in env:
                tag, v = env[e.name]
                return _value_kind(v) if tag == "obj" else _canon_kind(v)
            dom = self.model.find_domains.get(e.name)
            if dom is None:
                raise SpecError(f"unknown identifier {e.name!r}", *(e.loc or (None, None)))
            return dom.kind
        if isinstance(e, A.TupleLit):
            return "tuple"
        if isinstance(e, A.UnaryOp):
            return "int" if e.op == "-" else "bool"
        if isinstance(e, A.Bars):
            return "int"
        if isinstance(e, A.BinOp):
            if e.op in ("+", "-", "*", "/", "%"):
                return "int"
            if e.op in ("union", "intersect"):
                return "set"
            return "bool"
        if isinstance(e, A.Quant):
            return "bool" if e.q in ("forAll", "exists") else "int"
        if isinstance(e, A.Call):
            if isinstance(e.fn, A.Ref):
                n = e.fn.name
                if n == "toInt":
                    return "int"
                if n == "parts":
                    return "set"
                if n == "allDiff":
                    return "bool"
                if n in ("max", "min"):
                    return "int"
            fk = self.kind(e.fn, env)
            if fk == "function":
                inner = self._inner_of(e.fn, env)
                return inner if inner else "int"
            return "int"
        if isinstance(e, (A.ListComp, A.ListLit)):
            return "sequence"
        raise SpecError(f"cannot type {type(e).__name__}")

    def _inner_of(self, fn_expr, env):
        if isinstance(fn_expr, A.Ref):
            dom = self.model.find_domains.get(fn_expr.name)
            if dom is not None and dom.kind == "function":
                return dom.inner[1].kind
            if fn_expr.name in env:
                tag, v = env[fn_expr.name]
                if tag == "obj" and isinstance(v, VFunc) and v.images:
                    return _value_kind(v.images[0])
        if isinstance(fn_expr, A.Const) and fn_expr.type is not None:
            return fn_expr.type.inner[1].kind
        return None

    # -- static/dynamic classification -------------------------------------

    def is_static(self, e, env) -> bool:
        if isinstance(e, A.Ref):
            if e.name in env:
                return env[e.name][0] == "canon"
            return False  # a bare reference can only be a find at this point
        for child in _subexprs(e):
            if not self.is_static(child, env):
                return False
        return True

    # -- construction -------------------------------------------------------

    def build(self, e, env) -> Node:
        if isinstance(e, A.IntLit):
            return ConstNode(e.value)
        if isinstance(e, A.BoolLit):
            return ConstNode(e.value, is_bool=True)
        if isinstance(e, A.Const):
            return ConstNode(e.value, is_bool=isinstance(e.value, bool))
        if isinstance(e, A.Ref):
            if e.name in env:
                tag, v = env[e.name]
                if tag == "obj":
                    return BinderRefNode(v)
                return ConstNode(v, is_bool=isinstance(v, bool))
            if e.name in self.ctx.vars:
                return VarRefNode(e.name, self.ctx.vars[e.name])
            raise SpecError(f"unknown identifier {e.name!r}", *(e.loc or (None, None)))
        if isinstance(e, A.TupleLit):
            return TupleLitNode([self.build(x, env) for x in e.items])
        if isinstance(e, A.UnaryOp):
            a = self.build(e.a, env)
            return NegNode(a) if e.op == "-" else NotNode(a)
        if isinstance(e, A.Bars):
            a = self.build(e.a, env)
            if self.kind(e.a, env) == "int":
                return AbsNode(a)
            return CardNode(a)
        if isinstance(e, A.BinOp):
            return self._build_binop(e, env)
        if isinstance(e, A.Call):
            return self._build_call(e, env)
        if isinstance(e, A.Quant):
            return self._build_quant(e, env)
        raise SpecError(f"unsupported expression {type(e).__name__}",
                        *(getattr(e, "loc", None) or (None, None)))

    def _build_binop(self, e, env):
        op = e.op
        if op == "->":
            return ImplyNode(self.build(e.a, env), self.build(e.b, env))
        if op == "/\\":
            return AndNode([self.build(e.a, env), self.build(e.b, env)])
        if op == "\\/":
            return OrNode([self.build(e.a, env), self.build(e.b, env)])
        a = self.build(e.a, env)
        b = self.build(e.b, env)
        if op in ("+", "-", "*", "/", "%"):
            return Arith(op, a, b)
        if op in ("<", "<=", ">", ">="):
            return CmpNode(op, a, b)
        if op in ("=", "!="):
            ka = self.kind(e.a, env)
            kb = self.kind(e.b, env)
            if ka in ("int", "enum", "bool") and kb in ("int", "enum", "bool"):
                if ka == "bool" or kb == "bool":
                    return EqValueNode(op, a, b)
                return CmpNode(op, a, b)
            return EqValueNode(op, a, b)
        if op == "in":
            return InNode((a, b))
        if op == "subsetEq":
            return SubsetEqNode(a, b)
        if op in ("union", "intersect"):
            return SetOpNode(op, a, b)
        raise SpecError(f"unsupported operator {op}")

    def _build_call(self, e, env):
        if isinstance(e.fn, A.Ref) and e.fn.name not in env \
                and e.fn.name not in self.model.find_domains:
            name = e.fn.name
            if name == "toInt":
                return ToIntNode(self.build(e.args[0], env))
            if name == "parts":
                return PartsNode((self.build(e.args[0], env),))
            if name in ("allDiff", "max", "min"):
                arg = e.args[0]
                if isinstance(arg, A.ListLit):
                    kids = [self.build(x, env) for x in arg.items]
                    return AllDiffNode(kids) if name == "allDiff" \
                        else ExtremumNode(name, kids)
                if isinstance(arg, A.ListComp):
                    comp = self._make_comp_from_listcomp(arg, env)
                    return AllDiffNode(comp=comp) if name == "allDiff" \
                        else ExtremumNode(name, comp=comp)
                raise SpecError(f"{name} expects a list literal or comprehension")
            raise SpecError(f"unknown identifier {name!r}")
        fn = self.build(e.fn, env)
        if len(e.args) == 1:
            arg = self.build(e.args[0], env)
        else:
            arg = TupleLitNode([self.build(x, env) for x in e.args])
        if isinstance(fn, ConstNode) and kind_of(fn.value) == "func":
            key = id(fn.value)
            table = self._tables.get(key)
            if table is None:
                table = dict(fn.value[1])
                self._tables[key] = table
            return ConstFuncApplyNode(table, arg)
        return ApplyNode(fn, arg)

    def _build_quant(self, e, env):
        q = e.q
        body = e.body
        conds = list(e.conds)
        static = all(self.is_static(c, env) for c in conds) and \
            (isinstance(e.gen.source, A.DomSource) or
             self.is_static(e.gen.source.expr, env))
        if conds and not static:
            folded = _conj(conds)
            if q == "forAll":
                body = A.BinOp("->", folded, body)
            elif q == "exists":
                body = A.BinOp("/\\", folded, body)
            elif q == "sum":
                body = A.BinOp("*", A.Call(A.Ref("toInt"), [folded]), body)
            else:
                raise SpecError(f"{q} does not support guards over changing collections")
            conds = []
        comp = self._make_comp(body, e.gen, conds, env)
        if q == "forAll":
            return AndNode(comp=comp)
        if q == "exists":
            return OrNode(comp=comp)
        if q == "sum":
            return SumNode(comp=comp)
        return ExtremumNode(q, comp=comp)

    def _make_comp(self, template, gen, conds, env):
        if isinstance(gen.source, A.DomSource):
            elements = enumerate_domain(gen.source.domain)
            source = ConstNode(make_seq(elements))
        else:
            source = self.build(gen.source.expr, env)
        return CompNode(template, gen.pattern, conds, source, env, self.build)

    def _make_comp_from_listcomp(self, lc: A.ListComp, env):
        if len(lc.gens) != 1:
            raise SpecError("only single-generator comprehensions are supported")
        conds = list(lc.conds)
        gen = lc.gens[0]
        static = all(self.is_static(c, env) for c in conds) and \
            (isinstance(gen.source, A.DomSource) or self.is_static(gen.source.expr, env))
        if conds and not static:
            raise SpecError("list comprehension guards must be static")
        return self._make_comp(lc.expr, gen, conds, env)


def _value_kind(v) -> str:
    if isinstance(v, VBool):
        return "bool"
    if isinstance(v, VInt):
        return "int"
    if isinstance(v, VTuple):
        return "tuple"
    if isinstance(v, VSeq):
        return "sequence"
    if isinstance(v, VFunc):
        return "function"
    if isinstance(v, VPart):
        return "partition"
    if isinstance(v, VSet):  # covers VMSet via set semantics at this level
        return "mset" if type(v).__name__ == "VMSet" else "set"
    raise TypeError(type(v))


def _canon_kind(c) -> str:
    k = kind_of(c)
    return {"seq": "sequence", "func": "function", "part": "partition"}.get(k, k)


def _conj(conds):
    out = conds[0]
    for c in conds[1:]:
        out = A.BinOp("/\\", out, c)
    return out


def _subexprs(e):
    if isinstance(e, (A.IntLit, A.BoolLit, A.StrLit, A.Ref, A.Const)):
        return
    if isinstance(e, (A.TupleLit, A.SetLit, A.MSetLit, A.SeqLit, A.ListLit)):
        yield from e.items
    elif isinstance(e, A.UnaryOp):
        yield e.a
    elif isinstance(e, A.Bars):
        yield e.a
    elif isinstance(e, A.BinOp):
        yield e.a
        yield e.b
    elif isinstance(e, A.Call):
        yield e.fn
        yield from e.args
    elif isinstance(e, A.Quant):
        if isinstance(e.gen.source, A.CollSource):
            yield e.gen.source.expr
        yield from e.conds
        yield e.body
    elif isinstance(e, A.ListComp):
        for g in e.gens:
            if isinstance(g.source, A.CollSource):
                yield g.source.expr
        yield from e.conds
        yield e.expr
    else:
        raise TypeError(type(e))


# -- one-way link collection ---------------------------------------------------


def _scan_links(ctx: EvalContext, builder: Builder, node: Node, guard):
    """Register partial one-way propagation links found on conjunctive spines
    (and implication consequents) of a constraint tree."""
    if isinstance(node, AndNode):
        comp = node.children[0] if len(node.children) == 1 and \
            isinstance(node.children[0], CompNode) else None
        if comp is not None:
            comp.on_new_child = lambda child: _scan_links(ctx, builder, child, guard)
            for child in comp.children:
                _scan_links(ctx, builder, child, guard)
        else:
            for child in node.children:
                _scan_links(ctx, builder, child, guard)
        return
    if isinstance(node, ImplyNode):
        _scan_links(ctx, builder, node.children[1], node.children[0])
        return
    if isinstance(node, CmpNode) and node.op == "=":
        a, b = node.children
        for target, source in ((a, b), (b, a)):
            link = _try_link(ctx, builder, node, target, source, guard)
            if link is not None:
                ctx.links.append(link)
                if source.links is None:
                    source.links = []
                source.links.append(link)
                return


def _try_link(ctx, builder, eq_node, target, source, guard):
    if not isinstance(target, ApplyNode):
        return None
    fn = target.children[0]
    if not isinstance(fn, VarRefNode):
        return None
    dom = ctx.find_domains.get(fn.name)
    if dom is None:
        return None
    if dom.attr("injective"):
        return None  # updating an element could break injectivity
    if dom.kind == "function":
        elem = dom.inner[1]
        if not dom.attr("total"):
            return None
    elif dom.kind == "sequence":
        elem = dom.inner[0]
    else:
        return None  # set, mset and partition members cannot be overwritten
    if elem.kind != "int":
        return None
    if any(n is target for n in source.iter_nodes()):
        return None
    return OneWayLink(source=source, apply_node=target, eq_node=eq_node,
                      guard=guard, domain=elem)
