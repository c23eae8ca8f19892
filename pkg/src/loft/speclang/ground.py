"""Hash-free structural evaluation over canonical values.

This evaluator serves three roles: grounding ``letting`` definitions at
instantiation time, verifying candidate solutions independently of the
incremental engine (values compare structurally, never by 64-bit hash),
and acting as the from-scratch oracle in tests.

Booleans follow relational semantics: an expression may evaluate to
``UNDEF`` (division by zero, indexing outside a sequence, applying a
function outside its defined set), and undefinedness propagates through
strict operators while Kleene logic lets /\\ and \\/ absorb it.
"""

from __future__ import annotations

from .. import domains as D
from ..canon import kind_of, make_func, make_mset, make_part, make_seq, make_set, make_tuple
from ..values import enumerate_domain
from . import ast as A
from .parser import SpecError


class _Undef:
    def __repr__(self):
        return "UNDEF"


UNDEF = _Undef()


def eval_ground(e, env):
    """Evaluate expression ``e`` over canonical environment ``env``."""
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.BoolLit):
        return e.value
    if isinstance(e, A.Const):
        return e.value
    if isinstance(e, A.StrLit):
        raise SpecError(f'unresolved enum name "{e.value}"', *(e.loc or (None, None)))
    if isinstance(e, A.Ref):
        if e.name not in env:
            raise SpecError(f"unknown identifier {e.name!r}", *(e.loc or (None, None)))
        return env[e.name]
    if isinstance(e, A.TupleLit):
        items = [eval_ground(x, env) for x in e.items]
        return UNDEF if any(x is UNDEF for x in items) else make_tuple(items)
    if isinstance(e, A.SetLit):
        items = [eval_ground(x, env) for x in e.items]
        if any(x is UNDEF for x in items):
            return UNDEF
        uniq = []
        for x in items:
            if x not in uniq:
                uniq.append(x)
        return make_set(uniq)
    if isinstance(e, A.MSetLit):
        items = [eval_ground(x, env) for x in e.items]
        return UNDEF if any(x is UNDEF for x in items) else make_mset(items)
    if isinstance(e, A.SeqLit):
        items = [eval_ground(x, env) for x in e.items]
        return UNDEF if any(x is UNDEF for x in items) else make_seq(items)
    if isinstance(e, A.FuncLit):
        pairs = [(eval_ground(p, env), eval_ground(i, env)) for p, i in e.pairs]
        if any(p is UNDEF or i is UNDEF for p, i in pairs):
            return UNDEF
        pres = [p for p, _ in pairs]
        for i, p in enumerate(pres):
            if p in pres[:i]:
                raise SpecError("function literal maps a preimage twice")
        return make_func(pairs)
    if isinstance(e, A.PartLit):
        parts = [[eval_ground(m, env) for m in part] for part in e.parts]
        if any(m is UNDEF for part in parts for m in part):
            return UNDEF
        return make_part(parts)
    if isinstance(e, A.ListLit):
        items = [eval_ground(x, env) for x in e.items]
        return UNDEF if any(x is UNDEF for x in items) else make_seq(items)
    if isinstance(e, A.UnaryOp):
        v = eval_ground(e.a, env)
        if v is UNDEF:
            return UNDEF
        return -v if e.op == "-" else (not v)
    if isinstance(e, A.Bars):
        v = eval_ground(e.a, env)
        if v is UNDEF:
            return UNDEF
        if isinstance(v, bool):
            raise SpecError("|..| does not apply to bool")
        if isinstance(v, int):
            return abs(v)
        return len(v[1])
    if isinstance(e, A.BinOp):
        return _binop(e, env)
    if isinstance(e, A.Call):
        return _call(e, env)
    if isinstance(e, A.Quant):
        return _quant(e, env)
    if isinstance(e, A.ListComp):
        items = _comprehend(e.gens, e.conds, e.expr, env)
        return UNDEF if items is UNDEF else make_seq(items)
    raise TypeError(type(e))


def _binop(e, env):
    op = e.op
    if op == "/\\":
        a = eval_ground(e.a, env)
        if a is False:
            return False
        b = eval_ground(e.b, env)
        if b is False:
            return False
        return UNDEF if (a is UNDEF or b is UNDEF) else True
    if op == "\\/":
        a = eval_ground(e.a, env)
        if a is True:
            return True
        b = eval_ground(e.b, env)
        if b is True:
            return True
        return UNDEF if (a is UNDEF or b is UNDEF) else False
    if op == "->":
        a = eval_ground(e.a, env)
        if a is False:
            return True
        b = eval_ground(e.b, env)
        if b is True:
            return True
        return UNDEF if (a is UNDEF or b is UNDEF) else False
    a = eval_ground(e.a, env)
    b = eval_ground(e.b, env)
    if a is UNDEF or b is UNDEF:
        return UNDEF
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return UNDEF if b == 0 else a // b  # floor semantics
    if op == "%":
        return UNDEF if b == 0 else a % b
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "in":
        return a in b[1]
    if op == "subsetEq":
        bm = list(b[1])
        for m in a[1]:
            if m in bm:
                bm.remove(m)
            else:
                return False
        return True
    if op == "union":
        merged = list(a[1])
        for m in b[1]:
            if m not in merged:
                merged.append(m)
        return make_set(merged)
    if op == "intersect":
        return make_set([m for m in a[1] if m in b[1]])
    raise SpecError(f"unknown operator {op}")


def _call(e, env):
    if isinstance(e.fn, A.Ref):
        name = e.fn.name
        if name == "toInt":
            v = eval_ground(e.args[0], env)
            return UNDEF if v is UNDEF else int(v)
        if name == "parts":
            v = eval_ground(e.args[0], env)
            if v is UNDEF:
                return UNDEF
            return make_set([make_set(part) for part in v[1]])
        if name == "allDiff":
            v = eval_ground(e.args[0], env)
            if v is UNDEF:
                return UNDEF
            items = list(v[1])
            for i, m in enumerate(items):
                if m in items[:i]:
                    return False
            return True
        if name in ("max", "min"):
            v = eval_ground(e.args[0], env)
            if v is UNDEF or not v[1]:
                return UNDEF
            return max(v[1]) if name == "max" else min(v[1])
    f = eval_ground(e.fn, env)
    if f is UNDEF:
        return UNDEF
    if len(e.args) == 1:
        arg = eval_ground(e.args[0], env)
    else:
        items = [eval_ground(x, env) for x in e.args]
        arg = UNDEF if any(x is UNDEF for x in items) else make_tuple(items)
    if arg is UNDEF:
        return UNDEF
    k = kind_of(f)
    if k == "func":
        for pre, img in f[1]:
            if pre == arg:
                return img
        return UNDEF
    if k == "seq":
        body = f[1]
        if isinstance(arg, bool) or not isinstance(arg, int):
            return UNDEF
        if not 1 <= arg <= len(body):
            return UNDEF  # sequences index from 1
        return body[arg - 1]
    if k == "tuple":
        body = f[1]
        if not isinstance(arg, int) or not 1 <= arg <= len(body):
            return UNDEF
        return body[arg - 1]
    raise SpecError("only functions and sequences can be applied")


def iter_collection(c):
    k = kind_of(c)
    if k in ("set", "mset", "seq"):
        return list(c[1])
    if k == "func":
        return [make_tuple(p) for p in c[1]]
    raise SpecError(f"cannot iterate a value of kind {k}")


def bind_pattern(pattern, value, env):
    if isinstance(pattern, A.PWild):
        return
    if isinstance(pattern, A.PName):
        env[pattern.name] = value
        return
    if isinstance(pattern, A.PTuple):
        if kind_of(value) != "tuple" or len(value[1]) != len(pattern.items):
            raise SpecError("pattern does not match tuple shape")
        for p, v in zip(pattern.items, value[1]):
            bind_pattern(p, v, env)
        return
    raise TypeError(type(pattern))


def _gen_values(gen, env):
    if isinstance(gen.source, A.CollSource):
        coll = eval_ground(gen.source.expr, env)
        if coll is UNDEF:
            return UNDEF
        return iter_collection(coll)
    dom = gen.source.domain
    if not isinstance(dom, D.Domain):
        raise SpecError("domain generators must be ground at evaluation time")
    return enumerate_domain(dom)


def _comprehend(gens, conds, body, env):
    """Expand generators left to right; returns list of body values or UNDEF."""
    out = []
    saw_undef = [False]

    def rec(k, env):
        if k == len(gens):
            for c in conds:
                v = eval_ground(c, env)
                if v is UNDEF:
                    saw_undef[0] = True
                    return
                if v is not True:
                    return
            out.append(eval_ground(body, env))
            return
        vals = _gen_values(gens[k], env)
        if vals is UNDEF:
            saw_undef[0] = True
            return
        for v in vals:
            sub = dict(env)
            bind_pattern(gens[k].pattern, v, sub)
            rec(k + 1, sub)

    rec(0, env)
    if saw_undef[0]:
        return UNDEF
    return out


def _quant(e, env):
    items = _comprehend([e.gen], e.conds, e.body, env)
    if items is UNDEF:
        return UNDEF
    if e.q == "forAll":
        if any(v is False for v in items):
            return False
        return UNDEF if any(v is UNDEF for v in items) else True
    if e.q == "exists":
        if any(v is True for v in items):
            return True
        return UNDEF if any(v is UNDEF for v in items) else False
    if any(v is UNDEF for v in items):
        return UNDEF
    if e.q == "sum":
        return sum(items)
    if not items:
        return UNDEF
    return max(items) if e.q == "max" else min(items)
