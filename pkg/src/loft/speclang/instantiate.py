"""Turn a parsed specification plus parameter bindings into a typed model.

Instantiation evaluates every ``letting``, substitutes parameter values
into the constraint and objective expressions as ground constants,
grounds all find domains to concrete integer bounds, desugars relations
to sets of tuples, and type-checks the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import domains as D
from ..canon import kind_of
from . import ast as A
from .ground import UNDEF, eval_ground
from .parser import SpecError

# Open interval ends on `given` declarations (finds must be finite).
OPEN_LO = -(10 ** 18)
OPEN_HI = 10 ** 18


@dataclass
class TypedModel:
    finds: list                 # [(name, Domain)]
    constraints: list           # substituted expressions
    objective: tuple | None     # (direction, expr)
    enums: dict                 # enum name -> tuple of member names
    params: dict                # given name -> canonical value
    spec: A.Specification = field(repr=False, default=None)
    eliminated: list = field(default_factory=list)  # [(name, defining expr)]

    @property
    def find_domains(self) -> dict:
        return dict(self.finds)


def instantiate(spec: A.Specification, raw_params: dict):
    """Returns ``(model, params)`` where params maps givens to canonical values."""
    inst = _Instantiator(spec, raw_params)
    return inst.run()


class _Instantiator:
    def __init__(self, spec, raw_params):
        self.spec = spec
        self.raw = raw_params
        self.enums = {}
        self.param_env = {}    # every parameter-file binding, in file order
        self.env = {}          # declared names only (given / letting, in spec order)
        self.types = {}        # name -> Domain for names usable in expressions
        self.domain_defs = {}  # name -> surface domain (domain lettings)
        self.finds = []
        self.find_types = {}
        self.constraints = []
        self.objective = None
        self.param_values = {}

    # -- main walk ----------------------------------------------------------

    def run(self):
        self._resolve_raw_params()
        for st in self.spec.statements:
            if isinstance(st, A.Given):
                self._do_given(st)
            elif isinstance(st, A.LettingEnum):
                self._declare_enum(st.name, st.values)
            elif isinstance(st, A.LettingDomain):
                self.domain_defs[st.name] = st.domain
            elif isinstance(st, A.LettingExpr):
                v = eval_ground(self._resolve_strings(st.expr), self.env)
                # referencing a later given fails here because self.env only
                # holds names declared so far
                if v is UNDEF:
                    raise SpecError(f"letting {st.name} evaluates to undefined", *(st.loc or (None, None)))
                self.env[st.name] = v
                self.types[st.name] = _canon_type(v)
            elif isinstance(st, A.Find):
                dom = self.ground_domain(st.domain)
                dom.validate_attrs()
                _require_finite(dom, st)
                for name in st.names:
                    self.finds.append((name, dom))
                    self.find_types[name] = dom
            elif isinstance(st, A.SuchThat):
                for c in st.constraints:
                    ce, ct = self.check(c, {})
                    if ct.kind != "bool":
                        raise SpecError("constraints must be boolean", *(c.loc or (None, None)))
                    self.constraints.append(ce)
            elif isinstance(st, A.Objective):
                oe, ot = self.check(st.expr, {})
                if ot.kind != "int":
                    raise SpecError("the objective must be an integer expression",
                                    *(st.loc or (None, None)))
                self.objective = (st.direction, oe)
            else:
                raise SpecError(f"unsupported statement {type(st).__name__}")
        model = TypedModel(self.finds, self.constraints, self.objective,
                           dict(self.enums), dict(self.param_values), self.spec)
        return model, dict(self.param_values)

    def _resolve_raw_params(self):
        for name, rhs in self.raw.items():
            if isinstance(rhs, tuple) and rhs and rhs[0] == "enum":
                self._declare_enum(name, rhs[1])
            else:
                v = eval_ground(self._resolve_strings(rhs), self.param_env)
                if v is UNDEF:
                    raise SpecError(f"parameter {name} evaluates to undefined")
                self.param_env[name] = v
                self.param_values[name] = v

    def _declare_enum(self, name, values):
        if len(set(values)) != len(values):
            raise SpecError(f"enum {name} repeats a member name")
        self.enums[name] = tuple(values)
        self.param_values[name] = ("enum", tuple(values))

    def _do_given(self, st):
        for name in st.names:
            if st.domain == "enum":
                if name not in self.enums:
                    raise SpecError(f"missing given: enum {name} is not declared "
                                    f"in the parameter file", *(st.loc or (None, None)))
                continue
            if name not in self.param_env:
                raise SpecError(f"missing given {name!r}", *(st.loc or (None, None)))
            dom = self.ground_domain(st.domain)
            err = dom.conforms(self.param_env[name])
            if err:
                raise SpecError(f"value bound to given {name!r} is outside its domain: {err}",
                                *(st.loc or (None, None)))
            self.env[name] = self.param_env[name]
            self.types[name] = dom

    # -- enum member names --------------------------------------------------

    def _resolve_strings(self, e):
        if isinstance(e, A.StrLit):
            for ename, values in self.enums.items():
                if e.value in values:
                    return A.Const(values.index(e.value),
                                   D.denum(ename, values), loc=e.loc)
            raise SpecError(f'unknown enum member "{e.value}"', *(e.loc or (None, None)))
        return _map_children(e, self._resolve_strings)

    # -- domains --------------------------------------------------------------

    def ground_domain(self, d) -> D.Domain:
        if isinstance(d, D.Domain):
            return d
        if isinstance(d, A.DBool):
            return D.dbool()
        if isinstance(d, A.DInt):
            if not d.ranges:
                return D.Domain("int", ranges=((OPEN_LO, OPEN_HI),))
            ranges = []
            for lo, hi in d.ranges:
                lo_v = self._ground_int(lo) if lo is not None else OPEN_LO
                hi_v = self._ground_int(hi) if hi is not None else OPEN_HI
                if lo_v > hi_v:
                    raise SpecError(f"empty integer range {lo_v}..{hi_v}", *(d.loc or (None, None)))
                ranges.append((lo_v, hi_v))
            ranges.sort()
            return D.Domain("int", ranges=tuple(ranges))
        if isinstance(d, A.DRef):
            if d.name in self.enums:
                return D.denum(d.name, self.enums[d.name])
            if d.name in self.domain_defs:
                return self.ground_domain(self.domain_defs[d.name])
            raise SpecError(f"unknown domain {d.name!r}", *(d.loc or (None, None)))
        if isinstance(d, A.DSet):
            return D.Domain("set", inner=(self.ground_domain(d.inner),),
                            attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DMSet):
            return D.Domain("mset", inner=(self.ground_domain(d.inner),),
                            attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DSeq):
            return D.Domain("sequence", inner=(self.ground_domain(d.inner),),
                            attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DFunc):
            return D.Domain("function",
                            inner=(self.ground_domain(d.pre), self.ground_domain(d.img)),
                            attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DRel):
            # a relation is a set of tuples
            row = D.Domain("tuple", inner=tuple(self.ground_domain(x) for x in d.items))
            return D.Domain("set", inner=(row,), attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DPart):
            return D.Domain("partition", inner=(self.ground_domain(d.base),),
                            attrs=self._ground_attrs(d.attrs))
        if isinstance(d, A.DTuple):
            return D.Domain("tuple", inner=tuple(self.ground_domain(x) for x in d.items))
        raise SpecError(f"unknown domain form {type(d).__name__}")

    def _ground_attrs(self, attrs):
        out = []
        for name, val in attrs:
            if val is None:
                out.append((name, True))
            else:
                out.append((name, self._ground_int(val)))
        return tuple(sorted(out))

    def _ground_int(self, e) -> int:
        v = eval_ground(self._resolve_strings(e), self.env)
        if v is UNDEF or isinstance(v, bool) or not isinstance(v, int):
            raise SpecError("domain bounds must evaluate to integers",
                            *(getattr(e, "loc", None) or (None, None)))
        return v

    # -- type checking and substitution ---------------------------------------

    def check(self, e, binders):
        """Return (substituted expression, its type)."""
        loc = getattr(e, "loc", None) or (None, None)
        if isinstance(e, A.IntLit):
            return e, D.dint((e.value, e.value))
        if isinstance(e, A.BoolLit):
            return e, D.dbool()
        if isinstance(e, A.Const):
            return e, e.type
        if isinstance(e, A.StrLit):
            resolved = self._resolve_strings(e)
            return resolved, resolved.type
        if isinstance(e, A.Ref):
            if e.name in binders:
                return e, binders[e.name]
            if e.name in self.find_types:
                return e, self.find_types[e.name]
            if e.name in self.env:
                v = self.env[e.name]
                return A.Const(v, self.types[e.name], loc=e.loc), self.types[e.name]
            if e.name in self.enums:
                raise SpecError(f"enum type {e.name} cannot be used as a value", *loc)
            raise SpecError(f"unknown identifier {e.name!r}", *loc)
        if isinstance(e, A.TupleLit):
            pairs = [self.check(x, binders) for x in e.items]
            return (A.TupleLit([p[0] for p in pairs], loc=e.loc),
                    D.Domain("tuple", inner=tuple(p[1] for p in pairs)))
        if isinstance(e, (A.SetLit, A.MSetLit, A.SeqLit, A.ListLit)):
            pairs = [self.check(x, binders) for x in e.items]
            items = [p[0] for p in pairs]
            inner = pairs[0][1] if pairs else D.Domain("unknown")
            for _, t in pairs[1:]:
                _require_same(inner, t, loc)
            kind = {A.SetLit: "set", A.MSetLit: "mset",
                    A.SeqLit: "sequence", A.ListLit: "sequence"}[type(e)]
            return type(e)(items, loc=e.loc), D.Domain(kind, inner=(inner,))
        if isinstance(e, A.UnaryOp):
            a, t = self.check(e.a, binders)
            if e.op == "-":
                _require_kind(t, "int", loc)
            else:
                _require_kind(t, "bool", loc)
            return A.UnaryOp(e.op, a, loc=e.loc), t
        if isinstance(e, A.Bars):
            a, t = self.check(e.a, binders)
            if t.kind not in ("int", "set", "mset", "sequence", "function"):
                raise SpecError(f"|..| does not apply to {t.kind}", *loc)
            return A.Bars(a, loc=e.loc), D.dint((0, OPEN_HI))
        if isinstance(e, A.BinOp):
            return self._check_binop(e, binders, loc)
        if isinstance(e, A.Call):
            return self._check_call(e, binders, loc)
        if isinstance(e, A.Quant):
            gen, benv = self._check_generator(e.gen, binders, loc)
            inner_binders = dict(binders)
            inner_binders.update(benv)
            conds = []
            for c in e.conds:
                ce, ct = self.check(c, inner_binders)
                _require_kind(ct, "bool", loc)
                conds.append(ce)
            body, bt = self.check(e.body, inner_binders)
            if e.q in ("forAll", "exists"):
                _require_kind(bt, "bool", loc)
                rt = D.dbool()
            else:
                _require_kind(bt, "int", loc)
                rt = D.dint((OPEN_LO, OPEN_HI))
            return A.Quant(e.q, gen, conds, body, loc=e.loc), rt
        if isinstance(e, A.ListComp):
            inner_binders = dict(binders)
            gens = []
            for g in e.gens:
                gg, benv = self._check_generator(g, inner_binders, loc)
                inner_binders.update(benv)
                gens.append(gg)
            conds = []
            for c in e.conds:
                ce, ct = self.check(c, inner_binders)
                _require_kind(ct, "bool", loc)
                conds.append(ce)
            body, bt = self.check(e.expr, inner_binders)
            return (A.ListComp(body, gens, conds, loc=e.loc),
                    D.Domain("sequence", inner=(bt,)))
        raise SpecError(f"unsupported expression {type(e).__name__}", *loc)

    def _check_generator(self, g, binders, loc):
        if isinstance(g.source, A.DomSource):
            dom = self.ground_domain(g.source.domain)
            benv = {}
            _bind_pattern_type(g.pattern, dom, benv, loc)
            return A.Generator(g.pattern, A.DomSource(dom)), benv
        src, st = self.check(g.source.expr, binders)
        if st.kind in ("set", "mset", "sequence"):
            elem = st.inner[0]
        elif st.kind == "function":
            elem = D.Domain("tuple", inner=(st.inner[0], st.inner[1]))
        else:
            raise SpecError(f"cannot iterate over a {st.kind}", *loc)
        benv = {}
        _bind_pattern_type(g.pattern, elem, benv, loc)
        return A.Generator(g.pattern, A.CollSource(src)), benv

    def _check_binop(self, e, binders, loc):
        a, ta = self.check(e.a, binders)
        b, tb = self.check(e.b, binders)
        op = e.op
        out = A.BinOp(op, a, b, loc=e.loc)
        if op in ("+", "-", "*", "/", "%"):
            _require_kind(ta, "int", loc)
            _require_kind(tb, "int", loc)
            return out, D.dint((OPEN_LO, OPEN_HI))
        if op in ("<", "<=", ">", ">="):
            _require_kind(ta, "int", loc)
            _require_kind(tb, "int", loc)
            return out, D.dbool()
        if op in ("=", "!="):
            _require_same(ta, tb, loc)
            return out, D.dbool()
        if op in ("/\\", "\\/", "->"):
            _require_kind(ta, "bool", loc)
            _require_kind(tb, "bool", loc)
            return out, D.dbool()
        if op == "in":
            if tb.kind not in ("set", "mset"):
                raise SpecError("`in` needs a set or multiset on the right", *loc)
            _require_same(ta, tb.inner[0], loc)
            return out, D.dbool()
        if op == "subsetEq":
            if ta.kind != "set" or tb.kind != "set":
                raise SpecError("subsetEq applies to sets", *loc)
            _require_same(ta.inner[0], tb.inner[0], loc)
            return out, D.dbool()
        if op in ("union", "intersect"):
            if ta.kind != "set" or tb.kind != "set":
                raise SpecError(f"{op} applies to sets", *loc)
            _require_same(ta.inner[0], tb.inner[0], loc)
            return out, ta
        raise SpecError(f"unknown operator {op}", *loc)

    def _check_call(self, e, binders, loc):
        if isinstance(e.fn, A.Ref) and e.fn.name not in binders \
                and e.fn.name not in self.find_types and e.fn.name not in self.env:
            name = e.fn.name
            if name == "toInt":
                a, t = self.check(e.args[0], binders)
                _require_kind(t, "bool", loc)
                return A.Call(A.Ref(name), [a], loc=e.loc), D.dint((0, 1))
            if name == "parts":
                a, t = self.check(e.args[0], binders)
                _require_kind(t, "partition", loc)
                part = D.Domain("set", inner=(t.inner[0],))
                return A.Call(A.Ref(name), [a], loc=e.loc), D.Domain("set", inner=(part,))
            if name == "allDiff":
                a, t = self.check(e.args[0], binders)
                if t.kind not in ("sequence", "set", "mset"):
                    raise SpecError("allDiff needs a list", *loc)
                return A.Call(A.Ref(name), [a], loc=e.loc), D.dbool()
            if name in ("max", "min"):
                a, t = self.check(e.args[0], binders)
                if t.kind not in ("sequence", "set", "mset") or t.inner[0].kind != "int":
                    raise SpecError(f"{name} needs a list of integers", *loc)
                return A.Call(A.Ref(name), [a], loc=e.loc), D.dint((OPEN_LO, OPEN_HI))
            raise SpecError(f"unknown identifier {name!r}", *loc)
        fn, ft = self.check(e.fn, binders)
        if len(e.args) == 1:
            arg, at = self.check(e.args[0], binders)
        else:
            arg, at = self.check(A.TupleLit(list(e.args), loc=e.loc), binders)
        out = A.Call(fn, [arg], loc=e.loc)
        if ft.kind == "function":
            _require_same(at, ft.inner[0], loc)
            return out, ft.inner[1]
        if ft.kind == "sequence":
            _require_kind(at, "int", loc)
            return out, ft.inner[0]
        raise SpecError(f"cannot apply a value of kind {ft.kind}", *loc)


# -- helpers -----------------------------------------------------------------


def _map_children(e, f):
    """Rebuild an expression applying ``f`` to all child expressions."""
    if isinstance(e, (A.IntLit, A.BoolLit, A.StrLit, A.Ref, A.Const)):
        return e
    if isinstance(e, A.TupleLit):
        return A.TupleLit([f(x) for x in e.items], loc=e.loc)
    if isinstance(e, A.SetLit):
        return A.SetLit([f(x) for x in e.items], loc=e.loc)
    if isinstance(e, A.MSetLit):
        return A.MSetLit([f(x) for x in e.items], loc=e.loc)
    if isinstance(e, A.SeqLit):
        return A.SeqLit([f(x) for x in e.items], loc=e.loc)
    if isinstance(e, A.ListLit):
        return A.ListLit([f(x) for x in e.items], loc=e.loc)
    if isinstance(e, A.FuncLit):
        return A.FuncLit([(f(p), f(i)) for p, i in e.pairs], loc=e.loc)
    if isinstance(e, A.PartLit):
        return A.PartLit([[f(m) for m in part] for part in e.parts], loc=e.loc)
    if isinstance(e, A.UnaryOp):
        return A.UnaryOp(e.op, f(e.a), loc=e.loc)
    if isinstance(e, A.Bars):
        return A.Bars(f(e.a), loc=e.loc)
    if isinstance(e, A.BinOp):
        return A.BinOp(e.op, f(e.a), f(e.b), loc=e.loc)
    if isinstance(e, A.Call):
        return A.Call(f(e.fn), [f(x) for x in e.args], loc=e.loc)
    if isinstance(e, A.Quant):
        return A.Quant(e.q, _map_gen(e.gen, f), [f(c) for c in e.conds], f(e.body), loc=e.loc)
    if isinstance(e, A.ListComp):
        return A.ListComp(f(e.expr), [_map_gen(g, f) for g in e.gens],
                          [f(c) for c in e.conds], loc=e.loc)
    raise TypeError(type(e))


def _map_gen(g, f):
    if isinstance(g.source, A.CollSource):
        return A.Generator(g.pattern, A.CollSource(f(g.source.expr)))
    return g


def _canon_type(v) -> D.Domain:
    k = kind_of(v)
    if k == "bool":
        return D.dbool()
    if k == "int":
        return D.dint((v, v))
    body = v[1]
    if k == "tuple":
        return D.Domain("tuple", inner=tuple(_canon_type(m) for m in body))
    if k in ("set", "mset", "seq"):
        kind = {"set": "set", "mset": "mset", "seq": "sequence"}[k]
        inner = _canon_type(body[0]) if body else D.Domain("unknown")
        return D.Domain(kind, inner=(inner,))
    if k == "func":
        if body:
            return D.Domain("function",
                            inner=(_canon_type(body[0][0]), _canon_type(body[0][1])))
        return D.Domain("function", inner=(D.Domain("unknown"), D.Domain("unknown")))
    if k == "part":
        inner = _canon_type(body[0][0]) if body and body[0] else D.Domain("unknown")
        return D.Domain("partition", inner=(inner,))
    raise SpecError(f"cannot type canonical value of kind {k}")


def _bind_pattern_type(pattern, t, env, loc):
    if isinstance(pattern, A.PWild):
        return
    if isinstance(pattern, A.PName):
        env[pattern.name] = t
        return
    if isinstance(pattern, A.PTuple):
        if t.kind != "tuple" or len(t.inner) != len(pattern.items):
            raise SpecError("pattern shape does not match a tuple of that arity", *loc)
        for p, it in zip(pattern.items, t.inner):
            _bind_pattern_type(p, it, env, loc)
        return
    raise TypeError(type(pattern))


def _require_kind(t, kind, loc):
    if t.kind == "unknown":
        return
    if t.kind != kind:
        raise SpecError(f"type mismatch: expected {kind}, found {t.kind}", *loc)


def _require_same(a, b, loc):
    if a.kind == "unknown" or b.kind == "unknown":
        return
    if a.kind != b.kind:
        raise SpecError(f"type mismatch: {a.kind} vs {b.kind}", *loc)
    if a.kind == "enum" and a.enum_name != b.enum_name:
        raise SpecError(f"type mismatch: enum {a.enum_name} vs {b.enum_name}", *loc)
    if a.kind in ("set", "mset", "sequence", "partition"):
        _require_same(a.inner[0], b.inner[0], loc)
    if a.kind in ("tuple", "function"):
        if len(a.inner) != len(b.inner):
            raise SpecError("tuple arity mismatch", *loc)
        for x, y in zip(a.inner, b.inner):
            _require_same(x, y, loc)


def _require_finite(dom: D.Domain, st) -> None:
    loc = st.loc or (None, None)
    try:
        dom.value_count()
    except D.DomainError as exc:
        raise SpecError(f"find domain is not finite: {exc}", *loc)
    # open integer bounds are only allowed on givens
    if _has_open_range(dom):
        raise SpecError("find domain has an unbounded integer range", *loc)


def _has_open_range(dom: D.Domain) -> bool:
    if dom.kind == "int":
        return any(lo <= OPEN_LO or hi >= OPEN_HI for lo, hi in dom.ranges)
    return any(_has_open_range(i) for i in dom.inner)
