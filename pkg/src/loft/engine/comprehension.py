"""Dynamic comprehension unrolling.

A comprehension node owns one unrolled copy of its expression template
per element of the generating collection, kept index-aligned with the
collection's internal storage.  Structural collection events (add,
remove, swap, wholesale change) are mirrored by creating, dropping or
reordering unrolled entries; content changes inside an element reach
the affected entry directly through the binder leaves subscribed to the
element, so the comprehension ignores them.  The template itself is
retained for the lifetime of the node.
"""

from __future__ import annotations

from ..values import (
    MemberHasBecomeDefined, MemberHasBecomeUndefined, MemberValueChanged,
    PositionsSwapped, SubsequenceChanged, Value, ValueAdded, ValueChanged,
    ValueRemoved, VBool, VFunc, VInt, VSeq, VSet, VTuple, to_canon,
)
from ..speclang import ast as A
from ..speclang.ground import UNDEF, eval_ground
from ..speclang.parser import SpecError
from .nodes import HasBecomeDefined, HasBecomeUndefined, Node


class CompNode(Node):
    def __init__(self, template, pattern, conds, source: Node, env, builder):
        super().__init__()
        self.template = template
        self.pattern = pattern
        self.conds = conds        # static guards, pre-filtered at unroll time
        self.source = source
        source.parent = self
        source.slot = -1
        self.env = env            # enclosing binder environment
        self.builder = builder
        self.elems = []           # element handle per unrolled child
        self.aggregator = None
        self.ctx = None
        self.on_new_child = None  # one-way link scanning hook

    # -- plumbing ---------------------------------------------------------

    def init_full(self, ctx):
        self.ctx = ctx
        self.source.init_full(ctx)
        self._unroll_all()

    def detach(self):
        self.source.detach()
        for c in self.children:
            c.detach()

    def iter_nodes(self):
        yield self
        yield from self.source.iter_nodes()
        for c in self.children:
            yield from c.iter_nodes()

    def local_recompute(self):
        pass

    def verify_caches(self):
        self.source.verify_caches()
        for c in self.children:
            c.verify_caches()
        if not self.conds:
            assert len(self.children) == len(self._elements()), \
                "comprehension misaligned with its collection"

    # -- unrolling ----------------------------------------------------------

    def _elements(self):
        v = self.source.value
        assert self.source.defined, "comprehension over an undefined collection"
        if isinstance(v, (VSet, VSeq)):
            return list(v.members)
        if isinstance(v, VFunc):
            if v.direct:
                return [("pair", pc, img) for pc, img in zip(v.pre_canons, v.images)]
            return [("pair", pre, img) for pre, img in zip(v.defined, v.images)]
        if isinstance(v, tuple):
            if v[0] == "func":
                return [("pair", pre, img) for pre, img in v[1]]
            return list(v[1])
        raise TypeError(f"cannot iterate over {type(v).__name__}")

    def _bindings(self, elem):
        out = {}
        _bind(self.pattern, elem, out)
        return out

    def _passes_conds(self, bindings):
        if not self.conds:
            return True
        env = {}
        for name, (kind, val) in {**self.env, **bindings}.items():
            env[name] = val if kind == "canon" else to_canon(val)
        for c in self.conds:
            v = eval_ground(c, env)
            if v is UNDEF:
                raise SpecError("comprehension guard evaluates to undefined")
            if v is not True:
                return False
        return True

    def _make_child(self, elem):
        bindings = self._bindings(elem)
        env = dict(self.env)
        env.update(bindings)
        node = self.builder(self.template, env)
        node.init_full(self.ctx)
        if self.on_new_child is not None:
            self.on_new_child(node)
        return node

    def _unroll_all(self):
        for c in self.children:
            c.detach()
        self.children.clear()
        self.elems.clear()
        for elem in self._elements():
            if not self._passes_conds(self._bindings(elem)):
                continue
            node = self._make_child(elem)
            node.parent = self
            node.slot = len(self.children)
            self.children.append(node)
            self.elems.append(elem)

    # -- events ---------------------------------------------------------------

    def child_event(self, slot, ev):
        if slot == -1:
            return self._source_event(ev)
        if isinstance(ev, (ValueChanged, ValueAdded, ValueRemoved,
                           MemberValueChanged, SubsequenceChanged, PositionsSwapped)):
            return SubsequenceChanged(slot, slot + 1)
        if isinstance(ev, HasBecomeUndefined):
            return MemberHasBecomeUndefined(slot)
        if isinstance(ev, HasBecomeDefined):
            return MemberHasBecomeDefined(slot)
        return SubsequenceChanged(slot, slot + 1)

    def _source_event(self, ev):
        if self.conds:
            # guarded comprehensions are static; a changing source is a bug
            raise SpecError("a guarded comprehension cannot range over a "
                            "changing collection")
        if isinstance(ev, ValueAdded):
            elem = self._elements()[ev.index]
            node = self._make_child(elem)
            node.parent = self
            self.children.insert(ev.index, node)
            self.elems.insert(ev.index, elem)
            for k in range(ev.index, len(self.children)):
                self.children[k].slot = k
            return ValueAdded(ev.index)
        if isinstance(ev, ValueRemoved):
            node = self.children.pop(ev.index)
            self.elems.pop(ev.index)
            node.detach()
            for k in range(ev.index, len(self.children)):
                self.children[k].slot = k
            return ValueRemoved(ev.index, node)
        if isinstance(ev, PositionsSwapped):
            i, j = ev.i1, ev.i2
            ch = self.children
            ch[i], ch[j] = ch[j], ch[i]
            ch[i].slot, ch[j].slot = i, j
            self.elems[i], self.elems[j] = self.elems[j], self.elems[i]
            return ev
        if isinstance(ev, (MemberValueChanged, SubsequenceChanged)):
            # in-place content change: handled via the element's own
            # subscriptions inside the affected unrolled entry
            return None
        if isinstance(ev, (MemberHasBecomeDefined, MemberHasBecomeUndefined)):
            return None
        # wholesale change: rebuild every entry
        self._unroll_all()
        return ValueChanged()


def _bind(pattern, elem, out):
    if isinstance(pattern, A.PWild):
        return
    if isinstance(elem, tuple) and elem and elem[0] == "pair" and len(elem) == 3:
        _, pre, img = elem
        if isinstance(pattern, A.PTuple) and len(pattern.items) == 2:
            _bind(pattern.items[0], pre, out)
            _bind(pattern.items[1], img, out)
            return
        if isinstance(pattern, A.PName):
            if isinstance(pre, Value) or isinstance(img, Value):
                raise SpecError("bind function entries with a (preimage, image) "
                                "tuple pattern")
            from ..canon import make_tuple
            out[pattern.name] = ("canon", make_tuple((pre, img)))
            return
        raise SpecError("pattern shape does not match a function entry")
    if isinstance(pattern, A.PName):
        if isinstance(elem, Value):
            out[pattern.name] = ("obj", elem)
        else:
            out[pattern.name] = ("canon", elem)
        return
    if isinstance(pattern, A.PTuple):
        if isinstance(elem, VTuple):
            if len(elem.members) != len(pattern.items):
                raise SpecError("pattern arity mismatch")
            for p, m in zip(pattern.items, elem.members):
                _bind(p, m, out)
            return
        if isinstance(elem, tuple) and elem[0] == "tuple":
            if len(elem[1]) != len(pattern.items):
                raise SpecError("pattern arity mismatch")
            for p, m in zip(pattern.items, elem[1]):
                _bind(p, m, out)
            return
        raise SpecError("tuple pattern over a non-tuple element")
    raise TypeError(type(pattern))
