"""Pretty-printer producing text that re-parses to an equal tree."""

from __future__ import annotations

from . import ast as A

_PREC = {
    "->": 1, "\\/": 2, "/\\": 3,
    "=": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4, "in": 4, "subsetEq": 4,
    "union": 5, "intersect": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "%": 7,
}


def print_expr(e, prec: int = 0) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.StrLit):
        return f'"{e.value}"'
    if isinstance(e, (A.Ref, A.Const)):
        if isinstance(e, A.Const):
            from ..canon import canon_to_literal
            return canon_to_literal(e.value)
        return e.name
    if isinstance(e, A.TupleLit):
        return "(" + ", ".join(print_expr(x) for x in e.items) + ")"
    if isinstance(e, A.SetLit):
        return "{" + ", ".join(print_expr(x) for x in e.items) + "}"
    if isinstance(e, A.MSetLit):
        return "mset(" + ", ".join(print_expr(x) for x in e.items) + ")"
    if isinstance(e, A.SeqLit):
        return "sequence(" + ", ".join(print_expr(x) for x in e.items) + ")"
    if isinstance(e, A.FuncLit):
        return "function(" + ", ".join(
            f"{print_expr(p)} --> {print_expr(i)}" for p, i in e.pairs) + ")"
    if isinstance(e, A.PartLit):
        return "partition(" + ", ".join(
            "{" + ", ".join(print_expr(m) for m in part) + "}" for part in e.parts) + ")"
    if isinstance(e, A.ListLit):
        return "[" + ", ".join(print_expr(x) for x in e.items) + "]"
    if isinstance(e, A.ListComp):
        tail = ", ".join([_print_gen(g) for g in e.gens] + [print_expr(c) for c in e.conds])
        return f"[{print_expr(e.expr)} | {tail}]"
    if isinstance(e, A.UnaryOp):
        return f"{e.op}{print_expr(e.a, 8)}"
    if isinstance(e, A.Bars):
        return f"|{print_expr(e.a)}|"
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        right = p + 1 if e.op != "->" else p
        s = f"{print_expr(e.a, p)} {e.op} {print_expr(e.b, right)}"
        return f"({s})" if p < prec else s
    if isinstance(e, A.Call):
        return f"{print_expr(e.fn, 9)}({', '.join(print_expr(x) for x in e.args)})"
    if isinstance(e, A.Quant):
        parts = [_print_gen(e.gen)] + [print_expr(c) for c in e.conds]
        s = f"{e.q} {', '.join(parts)} . {print_expr(e.body)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(type(e))


def _print_gen(g: A.Generator) -> str:
    pat = _print_pattern(g.pattern)
    if isinstance(g.source, A.CollSource):
        return f"{pat} in {print_expr(g.source.expr)}"
    return f"{pat} : {print_domain(g.source.domain)}"


def _print_pattern(p) -> str:
    if isinstance(p, A.PName):
        return p.name
    if isinstance(p, A.PWild):
        return "_"
    return "(" + ", ".join(_print_pattern(x) for x in p.items) + ")"


def print_domain(d) -> str:
    if isinstance(d, A.DBool):
        return "bool"
    if isinstance(d, A.DInt):
        if not d.ranges:
            return "int"
        rs = []
        for lo, hi in d.ranges:
            if lo is not None and hi is not None and lo == hi:
                rs.append(print_expr(lo))
            else:
                left = print_expr(lo) if lo is not None else ""
                right = print_expr(hi) if hi is not None else ""
                rs.append(f"{left}..{right}")
        return f"int({', '.join(rs)})"
    if isinstance(d, A.DRef):
        return d.name
    if isinstance(d, A.DSet):
        return f"set {_print_attrs(d.attrs)}of {print_domain(d.inner)}"
    if isinstance(d, A.DMSet):
        return f"mset {_print_attrs(d.attrs)}of {print_domain(d.inner)}"
    if isinstance(d, A.DSeq):
        return f"sequence {_print_attrs(d.attrs)}of {print_domain(d.inner)}"
    if isinstance(d, A.DFunc):
        return (f"function {_print_attrs(d.attrs)}{print_domain(d.pre)}"
                f" --> {print_domain(d.img)}")
    if isinstance(d, A.DRel):
        inner = " * ".join(print_domain(x) for x in d.items)
        return f"relation {_print_attrs(d.attrs)}of ({inner})"
    if isinstance(d, A.DPart):
        return f"partition {_print_attrs(d.attrs)}from {print_domain(d.base)}"
    if isinstance(d, A.DTuple):
        return "tuple(" + ", ".join(print_domain(x) for x in d.items) + ")"
    raise TypeError(type(d))


def _print_attrs(attrs) -> str:
    if not attrs:
        return ""
    rendered = []
    for name, val in attrs:
        rendered.append(name if val is None else f"{name} {print_expr(val)}")
    return "(" + ", ".join(rendered) + ") "


def print_statement(s) -> str:
    if isinstance(s, A.Given):
        if s.domain == "enum":
            return f"given {', '.join(s.names)} new type enum"
        return f"given {', '.join(s.names)} : {print_domain(s.domain)}"
    if isinstance(s, A.LettingExpr):
        return f"letting {s.name} be {print_expr(s.expr)}"
    if isinstance(s, A.LettingDomain):
        return f"letting {s.name} be domain {print_domain(s.domain)}"
    if isinstance(s, A.LettingEnum):
        vals = ", ".join(f'"{v}"' for v in s.values)
        return f"letting {s.name} be new type enum {{{vals}}}"
    if isinstance(s, A.Find):
        return f"find {', '.join(s.names)} : {print_domain(s.domain)}"
    if isinstance(s, A.SuchThat):
        return "such that\n  " + ",\n  ".join(print_expr(c) for c in s.constraints)
    if isinstance(s, A.Objective):
        word = "minimising" if s.direction == "minimise" else "maximising"
        return f"{word} {print_expr(s.expr)}"
    raise TypeError(type(s))


def print_spec(spec: A.Specification) -> str:
    return "\n".join(print_statement(s) for s in spec.statements) + "\n"
