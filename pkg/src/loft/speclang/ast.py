"""Surface syntax trees for specification and parameter files.

Source locations are carried for error reporting but excluded from
equality so that parse/print round-trips compare structurally equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _loc():
    return field(default=None, compare=False, repr=False)


# -- expressions -----------------------------------------------------------


@dataclass
class Expr:
    pass


@dataclass
class IntLit(Expr):
    value: int
    loc: tuple = _loc()


@dataclass
class BoolLit(Expr):
    value: bool
    loc: tuple = _loc()


@dataclass
class StrLit(Expr):
    value: str
    loc: tuple = _loc()


@dataclass
class Ref(Expr):
    name: str
    loc: tuple = _loc()


@dataclass
class Const(Expr):
    """A ground value substituted during instantiation."""
    value: object
    type: object = None
    loc: tuple = _loc()


@dataclass
class TupleLit(Expr):
    items: list
    loc: tuple = _loc()


@dataclass
class SetLit(Expr):
    items: list
    loc: tuple = _loc()


@dataclass
class MSetLit(Expr):
    items: list
    loc: tuple = _loc()


@dataclass
class SeqLit(Expr):
    items: list
    loc: tuple = _loc()


@dataclass
class FuncLit(Expr):
    pairs: list  # [(pre, img), ...]
    loc: tuple = _loc()


@dataclass
class PartLit(Expr):
    parts: list  # [[expr, ...], ...]
    loc: tuple = _loc()


@dataclass
class ListLit(Expr):
    items: list
    loc: tuple = _loc()


@dataclass
class UnaryOp(Expr):
    op: str  # '-' or '!'
    a: Expr
    loc: tuple = _loc()


@dataclass
class Bars(Expr):
    """|e| : absolute value of an int, cardinality of a container."""
    a: Expr
    loc: tuple = _loc()


@dataclass
class BinOp(Expr):
    op: str
    a: Expr
    b: Expr
    loc: tuple = _loc()


@dataclass
class Call(Expr):
    fn: Expr        # callee (a Ref for user functions / builtins)
    args: list
    loc: tuple = _loc()


# -- generators ------------------------------------------------------------


@dataclass
class PName:
    name: str
    loc: tuple = _loc()


@dataclass
class PWild:
    loc: tuple = _loc()


@dataclass
class PTuple:
    items: list
    loc: tuple = _loc()


@dataclass
class CollSource:
    expr: Expr


@dataclass
class DomSource:
    domain: object


@dataclass
class Generator:
    pattern: object
    source: object  # CollSource | DomSource


@dataclass
class Quant(Expr):
    q: str  # forAll, exists, sum, max, min
    gen: Generator
    conds: list
    body: Expr
    loc: tuple = _loc()


@dataclass
class ListComp(Expr):
    expr: Expr
    gens: list   # [Generator, ...]
    conds: list
    loc: tuple = _loc()


# -- domains (surface) -----------------------------------------------------


@dataclass
class DBool:
    loc: tuple = _loc()


@dataclass
class DInt:
    ranges: list  # [(lo Expr|None, hi Expr|None), ...]; [] means unbounded
    loc: tuple = _loc()


@dataclass
class DRef:
    name: str
    loc: tuple = _loc()


@dataclass
class DSet:
    attrs: list
    inner: object
    loc: tuple = _loc()


@dataclass
class DMSet:
    attrs: list
    inner: object
    loc: tuple = _loc()


@dataclass
class DSeq:
    attrs: list
    inner: object
    loc: tuple = _loc()


@dataclass
class DFunc:
    attrs: list
    pre: object
    img: object
    loc: tuple = _loc()


@dataclass
class DRel:
    attrs: list
    items: list
    loc: tuple = _loc()


@dataclass
class DPart:
    attrs: list
    base: object
    loc: tuple = _loc()


@dataclass
class DTuple:
    items: list
    loc: tuple = _loc()


# -- statements --------------------------------------------------------------


@dataclass
class Given:
    names: list
    domain: object  # surface domain, or the string "enum" for `new type enum`
    loc: tuple = _loc()


@dataclass
class LettingExpr:
    name: str
    expr: Expr
    loc: tuple = _loc()


@dataclass
class LettingDomain:
    name: str
    domain: object
    loc: tuple = _loc()


@dataclass
class LettingEnum:
    name: str
    values: list
    loc: tuple = _loc()


@dataclass
class Find:
    names: list
    domain: object
    loc: tuple = _loc()


@dataclass
class SuchThat:
    constraints: list
    loc: tuple = _loc()


@dataclass
class Objective:
    direction: str  # 'minimise' | 'maximise'
    expr: Expr
    loc: tuple = _loc()


@dataclass
class Specification:
    statements: list

    @property
    def givens(self):
        return [s for s in self.statements if isinstance(s, Given)]

    @property
    def finds(self):
        return [s for s in self.statements if isinstance(s, Find)]

    @property
    def constraints(self):
        out = []
        for s in self.statements:
            if isinstance(s, SuchThat):
                out.extend(s.constraints)
        return out

    @property
    def objective(self):
        for s in self.statements:
            if isinstance(s, Objective):
                return s
        return None
