"""Lexer and recursive-descent parser for specification and parameter files.

The grammar is documented in docs/language.md.  Quantifier bodies extend
maximally to the right; parenthesise to stop them early.
"""

from __future__ import annotations

import re

from . import ast as A


class SpecError(Exception):
    def __init__(self, msg, line=None, col=None):
        self.msg = msg
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{msg}{where}")


KEYWORDS = {
    "given", "letting", "be", "domain", "find", "such", "that",
    "minimising", "maximising", "minimizing", "maximizing",
    "forAll", "exists", "sum", "min", "max", "in", "subsetEq",
    "intersect", "union", "allDiff", "toInt", "parts",
    "true", "false", "new", "type", "enum", "of", "from",
    "set", "mset", "sequence", "function", "tuple", "relation",
    "partition", "int", "bool",
}

ATTR_NAMES = {
    "size", "minSize", "maxSize", "numParts", "minNumParts", "maxNumParts",
    "partSize", "minPartSize", "maxPartSize", "total", "injective", "regular",
}
FLAG_ATTRS = {"total", "injective", "regular"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\$[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<op>-->|\.\.|<-|<=|>=|!=|->|/\\|\\/|[=<>+\-*/%!|(){}\[\],:.])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r})"


def tokenize(text: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        elif kind == "int":
            tokens.append(Token("INT", int(value), line, col))
            col += len(value)
        elif kind == "name":
            k = "KW" if value in KEYWORDS else "NAME"
            tokens.append(Token(k, value, line, col))
            col += len(value)
        elif kind == "str":
            tokens.append(Token("STR", value[1:-1], line, col))
            col += len(value)
        else:
            tokens.append(Token("OP", value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(Token("EOF", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind, value=None):
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def at_kw(self, *words):
        t = self.peek()
        return t.kind == "KW" and t.value in words

    def at_op(self, *ops):
        t = self.peek()
        return t.kind == "OP" and t.value in ops

    def next(self):
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, kind, value=None):
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            raise SpecError(f"expected {want!r}, found {t.value!r}", t.line, t.col)
        return self.next()

    def expect_op(self, op):
        return self.expect("OP", op)

    def expect_kw(self, word):
        return self.expect("KW", word)

    def loc(self):
        t = self.peek()
        return (t.line, t.col)

    # -- statements -------------------------------------------------------

    def parse_spec(self) -> A.Specification:
        stmts = []
        while not self.at("EOF"):
            stmts.append(self.statement())
        if not stmts:
            raise SpecError("empty specification", 1, 1)
        return A.Specification(stmts)

    def statement(self):
        loc = self.loc()
        if self.at_kw("given"):
            self.next()
            names = self.name_list()
            if self.at_kw("new"):
                self.next()
                self.expect_kw("type")
                self.expect_kw("enum")
                return A.Given(names, "enum", loc=loc)
            self.expect_op(":")
            return A.Given(names, self.domain(), loc=loc)
        if self.at_kw("letting"):
            self.next()
            name = self.expect("NAME").value
            self.expect_kw("be")
            if self.at_kw("domain"):
                self.next()
                return A.LettingDomain(name, self.domain(), loc=loc)
            if self.at_kw("new"):
                self.next()
                self.expect_kw("type")
                self.expect_kw("enum")
                return A.LettingEnum(name, self.enum_values(), loc=loc)
            return A.LettingExpr(name, self.expr(), loc=loc)
        if self.at_kw("find"):
            self.next()
            names = self.name_list()
            self.expect_op(":")
            return A.Find(names, self.domain(), loc=loc)
        if self.at_kw("such"):
            self.next()
            self.expect_kw("that")
            cons = [self.expr()]
            while self.at_op(","):
                self.next()
                cons.append(self.expr())
            return A.SuchThat(cons, loc=loc)
        if self.at_kw("minimising", "minimizing"):
            self.next()
            return A.Objective("minimise", self.expr(), loc=loc)
        if self.at_kw("maximising", "maximizing"):
            self.next()
            return A.Objective("maximise", self.expr(), loc=loc)
        t = self.peek()
        raise SpecError(f"expected a statement, found {t.value!r}", t.line, t.col)

    def name_list(self):
        names = [self.expect("NAME").value]
        while self.at_op(","):
            self.next()
            names.append(self.expect("NAME").value)
        return names

    def enum_values(self):
        self.expect_op("{")
        vals = []
        if not self.at_op("}"):
            vals.append(self.expect("STR").value)
            while self.at_op(","):
                self.next()
                vals.append(self.expect("STR").value)
        self.expect_op("}")
        return vals

    def parse_params(self):
        bindings = {}
        while not self.at("EOF"):
            t = self.peek()
            self.expect_kw("letting")
            name = self.expect("NAME").value
            if name in bindings:
                raise SpecError(f"duplicate binding for {name!r}", t.line, t.col)
            self.expect_kw("be")
            if self.at_kw("new"):
                self.next()
                self.expect_kw("type")
                self.expect_kw("enum")
                bindings[name] = ("enum", self.enum_values())
            else:
                bindings[name] = self.expr()
        return bindings

    # -- domains ----------------------------------------------------------

    def domain(self):
        loc = self.loc()
        if self.at_kw("bool"):
            self.next()
            return A.DBool(loc=loc)
        if self.at_kw("int"):
            self.next()
            ranges = []
            if self.at_op("("):
                self.next()
                ranges.append(self.int_range())
                while self.at_op(","):
                    self.next()
                    ranges.append(self.int_range())
                self.expect_op(")")
            return A.DInt(ranges, loc=loc)
        if self.at_kw("set"):
            self.next()
            attrs = self.attr_list(strict=True)
            self.expect_kw("of")
            return A.DSet(attrs, self.domain(), loc=loc)
        if self.at_kw("mset"):
            self.next()
            attrs = self.attr_list(strict=True)
            self.expect_kw("of")
            return A.DMSet(attrs, self.domain(), loc=loc)
        if self.at_kw("sequence"):
            self.next()
            attrs = self.attr_list(strict=True)
            self.expect_kw("of")
            return A.DSeq(attrs, self.domain(), loc=loc)
        if self.at_kw("function"):
            self.next()
            # "(" may open either attributes or a tuple-shorthand preimage
            attrs = self.attr_list()
            pre = self.domain()
            self.expect_op("-->")
            return A.DFunc(attrs, pre, self.domain(), loc=loc)
        if self.at_kw("relation"):
            self.next()
            attrs = self.attr_list(strict=True)
            self.expect_kw("of")
            self.expect_op("(")
            items = [self.domain()]
            while self.at_op("*"):
                self.next()
                items.append(self.domain())
            self.expect_op(")")
            return A.DRel(attrs, items, loc=loc)
        if self.at_kw("partition"):
            self.next()
            attrs = self.attr_list(strict=True)
            self.expect_kw("from")
            return A.DPart(attrs, self.domain(), loc=loc)
        if self.at_kw("tuple"):
            self.next()
            self.expect_op("(")
            items = [self.domain()]
            while self.at_op(","):
                self.next()
                items.append(self.domain())
            self.expect_op(")")
            return A.DTuple(items, loc=loc)
        if self.at_op("("):
            # tuple shorthand: (D1, D2, ...)
            self.next()
            items = [self.domain()]
            while self.at_op(","):
                self.next()
                items.append(self.domain())
            self.expect_op(")")
            if len(items) == 1:
                return items[0]
            return A.DTuple(items, loc=loc)
        if self.at("NAME"):
            return A.DRef(self.next().value, loc=loc)
        t = self.peek()
        raise SpecError(f"expected a domain, found {t.value!r}", t.line, t.col)

    def int_range(self):
        if self.at_op(".."):
            self.next()
            return (None, self.expr())
        lo = self.expr()
        if self.at_op(".."):
            self.next()
            if self.at_op(")") or self.at_op(","):
                return (lo, None)
            return (lo, self.expr())
        return (lo, lo)

    def attr_list(self, strict=False):
        if not self.at_op("("):
            return []
        save = self.i
        self.next()
        t = self.peek()
        if not (t.kind == "NAME" and t.value in ATTR_NAMES):
            if strict:
                raise SpecError(f"unknown attribute {t.value!r}", t.line, t.col)
            self.i = save  # it was a domain in parentheses, not attributes
            return []
        attrs = [self.attr()]
        while self.at_op(","):
            self.next()
            attrs.append(self.attr())
        self.expect_op(")")
        return attrs

    def attr(self):
        t = self.expect("NAME")
        if t.value not in ATTR_NAMES:
            raise SpecError(f"unknown attribute {t.value!r}", t.line, t.col)
        if t.value in FLAG_ATTRS:
            return (t.value, None)
        return (t.value, self.expr())

    # -- expressions --------------------------------------------------------

    def expr(self):
        return self.implies()

    def implies(self):
        loc = self.loc()
        a = self.disjunction()
        if self.at_op("->"):
            self.next()
            return A.BinOp("->", a, self.implies(), loc=loc)
        return a

    def disjunction(self):
        loc = self.loc()
        a = self.conjunction()
        while self.at_op("\\/"):
            self.next()
            a = A.BinOp("\\/", a, self.conjunction(), loc=loc)
        return a

    def conjunction(self):
        loc = self.loc()
        a = self.comparison()
        while self.at_op("/\\"):
            self.next()
            a = A.BinOp("/\\", a, self.comparison(), loc=loc)
        return a

    CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")

    def comparison(self):
        loc = self.loc()
        a = self.unions()
        t = self.peek()
        if t.kind == "OP" and t.value in self.CMP_OPS:
            self.next()
            return A.BinOp(t.value, a, self.unions(), loc=loc)
        if self.at_kw("in", "subsetEq"):
            op = self.next().value
            return A.BinOp(op, a, self.unions(), loc=loc)
        return a

    def unions(self):
        loc = self.loc()
        a = self.additive()
        while self.at_kw("union", "intersect"):
            op = self.next().value
            a = A.BinOp(op, a, self.additive(), loc=loc)
        return a

    def additive(self):
        loc = self.loc()
        a = self.multiplicative()
        while self.at_op("+", "-"):
            op = self.next().value
            a = A.BinOp(op, a, self.multiplicative(), loc=loc)
        return a

    def multiplicative(self):
        loc = self.loc()
        a = self.unary()
        while self.at_op("*", "/", "%"):
            op = self.next().value
            a = A.BinOp(op, a, self.unary(), loc=loc)
        return a

    def unary(self):
        loc = self.loc()
        if self.at_op("-"):
            self.next()
            return A.UnaryOp("-", self.unary(), loc=loc)
        if self.at_op("!"):
            self.next()
            return A.UnaryOp("!", self.unary(), loc=loc)
        if self.at_kw("forAll", "exists", "sum", "max", "min"):
            return self.quantifier()
        return self.postfix()

    def quantifier(self):
        loc = self.loc()
        q = self.next().value
        gen = self.try_generator()
        if gen is None:
            if q in ("forAll", "exists"):
                t = self.peek()
                raise SpecError(f"expected a generator after {q}", t.line, t.col)
            # sum/max/min over a list expression
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return A.Call(A.Ref(q, loc=loc), [arg], loc=loc)
        conds = []
        while self.at_op(","):
            self.next()
            conds.append(self.expr())
        self.expect_op(".")
        body = self.expr()
        return A.Quant(q, gen, conds, body, loc=loc)

    def try_generator(self):
        save = self.i
        try:
            pattern = self.pattern()
        except SpecError:
            self.i = save
            return None
        if self.at_kw("in"):
            self.next()
            return A.Generator(pattern, A.CollSource(self.expr()))
        if self.at_op("<-"):
            self.next()
            return A.Generator(pattern, A.CollSource(self.expr()))
        if self.at_op(":"):
            self.next()
            return A.Generator(pattern, A.DomSource(self.domain()))
        self.i = save
        return None

    def pattern(self):
        loc = self.loc()
        t = self.peek()
        if t.kind == "NAME":
            if t.value == "_":
                self.next()
                return A.PWild(loc=loc)
            self.next()
            return A.PName(t.value, loc=loc)
        if self.at_op("("):
            self.next()
            items = [self.pattern()]
            while self.at_op(","):
                self.next()
                items.append(self.pattern())
            self.expect_op(")")
            return A.PTuple(items, loc=loc)
        raise SpecError(f"expected a pattern, found {t.value!r}", t.line, t.col)

    def postfix(self):
        a = self.atom()
        while self.at_op("("):
            loc = self.loc()
            self.next()
            args = []
            if not self.at_op(")"):
                args.append(self.expr())
                while self.at_op(","):
                    self.next()
                    args.append(self.expr())
            self.expect_op(")")
            a = A.Call(a, args, loc=loc)
        return a

    def atom(self):
        loc = self.loc()
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return A.IntLit(t.value, loc=loc)
        if t.kind == "STR":
            self.next()
            return A.StrLit(t.value, loc=loc)
        if self.at_kw("true"):
            self.next()
            return A.BoolLit(True, loc=loc)
        if self.at_kw("false"):
            self.next()
            return A.BoolLit(False, loc=loc)
        if self.at_kw("toInt", "parts", "allDiff"):
            name = self.next().value
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return A.Call(A.Ref(name, loc=loc), [arg], loc=loc)
        if self.at_kw("tuple"):
            self.next()
            self.expect_op("(")
            items = [self.expr()]
            while self.at_op(","):
                self.next()
                items.append(self.expr())
            self.expect_op(")")
            return A.TupleLit(items, loc=loc)
        if self.at_kw("mset"):
            self.next()
            return A.MSetLit(self.paren_items(), loc=loc)
        if self.at_kw("sequence"):
            self.next()
            return A.SeqLit(self.paren_items(), loc=loc)
        if self.at_kw("function"):
            self.next()
            self.expect_op("(")
            pairs = []
            if not self.at_op(")"):
                pairs.append(self.func_pair())
                while self.at_op(","):
                    self.next()
                    pairs.append(self.func_pair())
            self.expect_op(")")
            return A.FuncLit(pairs, loc=loc)
        if self.at_kw("partition"):
            self.next()
            self.expect_op("(")
            parts = []
            if not self.at_op(")"):
                parts.append(self.brace_items())
                while self.at_op(","):
                    self.next()
                    parts.append(self.brace_items())
            self.expect_op(")")
            return A.PartLit(parts, loc=loc)
        if t.kind == "NAME":
            self.next()
            return A.Ref(t.value, loc=loc)
        if self.at_op("("):
            self.next()
            first = self.expr()
            if self.at_op(","):
                items = [first]
                while self.at_op(","):
                    self.next()
                    items.append(self.expr())
                self.expect_op(")")
                return A.TupleLit(items, loc=loc)
            self.expect_op(")")
            return first
        if self.at_op("|"):
            self.next()
            inner = self.expr()
            self.expect_op("|")
            return A.Bars(inner, loc=loc)
        if self.at_op("{"):
            return A.SetLit(self.brace_items(), loc=loc)
        if self.at_op("["):
            self.next()
            if self.at_op("]"):
                self.next()
                return A.ListLit([], loc=loc)
            head = self.expr()
            if self.at_op("|"):
                self.next()
                gens, conds = self.comp_tail()
                self.expect_op("]")
                return A.ListComp(head, gens, conds, loc=loc)
            items = [head]
            while self.at_op(","):
                self.next()
                items.append(self.expr())
            self.expect_op("]")
            return A.ListLit(items, loc=loc)
        raise SpecError(f"unexpected token {t.value!r}", t.line, t.col)

    def comp_tail(self):
        gens, conds = [], []
        while True:
            gen = self.try_generator()
            if gen is not None:
                gens.append(gen)
            else:
                conds.append(self.expr())
            if self.at_op(","):
                self.next()
                continue
            break
        if not gens:
            t = self.peek()
            raise SpecError("comprehension needs at least one generator", t.line, t.col)
        return gens, conds

    def paren_items(self):
        self.expect_op("(")
        items = []
        if not self.at_op(")"):
            items.append(self.expr())
            while self.at_op(","):
                self.next()
                items.append(self.expr())
        self.expect_op(")")
        return items

    def brace_items(self):
        self.expect_op("{")
        items = []
        if not self.at_op("}"):
            items.append(self.expr())
            while self.at_op(","):
                self.next()
                items.append(self.expr())
        self.expect_op("}")
        return items

    def func_pair(self):
        pre = self.expr()
        self.expect_op("-->")
        return (pre, self.expr())


def parse_spec(text: str) -> A.Specification:
    p = _Parser(text)
    return p.parse_spec()


def parse_params(text: str) -> dict:
    p = _Parser(text)
    return p.parse_params()
