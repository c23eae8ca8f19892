"""Expression tree nodes with cached values, violations and definedness.

Every node caches its value; Boolean nodes additionally cache a
violation (0 iff satisfied) and every node a definedness flag.  Changes
arrive as trigger events from child nodes (or from subscribed runtime
values at the leaves), each node updates its caches incrementally or by
local recomputation over its children's caches, and passes an event
describing its own change to its parent, stopping as soon as a node
absorbs a change.

Undefinedness follows relational semantics: an undefined operand makes
the nearest Boolean ancestor undefined, which carries the maximal
violation 2**32.
"""

from __future__ import annotations

from ..canon import hash_canon, kind_of, make_set, make_tuple
from ..hashing import int_hash
from ..values import (
    HasBecomeDefined, HasBecomeUndefined, MemberHasBecomeDefined,
    MemberHasBecomeUndefined, MemberValueChanged, PositionsSwapped,
    SubsequenceChanged, Value, ValueAdded, ValueChanged, ValueRemoved,
    VBool, VFunc, VInt, VPart, VSeq, VSet, VTuple, pre_index, to_canon,
)

VIOL_UNDEF = 2 ** 32
INT_LIMIT = 2 ** 63


class Node:
    is_bool = False

    def __init__(self, children=()):
        self.parent = None
        self.slot = -1
        self.children = list(children)
        for i, c in enumerate(self.children):
            c.parent = self
            c.slot = i
        self.value = None
        self.defined = True
        self.viol = 0

    # one-way links where this node is the source; assigned lazily
    links = None

    @property
    def violation(self) -> int:
        return self.viol if self.viol < VIOL_UNDEF else VIOL_UNDEF

    def init_full(self, ctx) -> None:
        for c in self.children:
            c.init_full(ctx)
        self.local_recompute()

    def local_recompute(self) -> None:
        raise NotImplementedError(type(self))

    def child_event(self, slot, ev):
        return self._diff(self.local_recompute)

    def _diff(self, recompute):
        before = (self.value, self.defined, self.viol)
        recompute()
        after = (self.value, self.defined, self.viol)
        if before == after:
            return None
        if before[1] and not after[1]:
            return HasBecomeUndefined()
        if after[1] and not before[1]:
            return HasBecomeDefined()
        return ValueChanged()

    def detach(self) -> None:
        if self.links:
            for link in self.links:
                link.alive = False
        for c in self.children:
            c.detach()

    def verify_caches(self) -> None:
        """Recompute every cache bottom-up and fail on any stale entry."""
        for c in self.children:
            c.verify_caches()
        before = (self.value, self.defined, self.viol)
        self.local_recompute()
        after = (self.value, self.defined, self.viol)
        assert before == after, f"stale cache at {type(self).__name__}: {before} != {after}"

    def iter_nodes(self):
        yield self
        for c in self.children:
            yield from c.iter_nodes()


def value_hash(node: Node) -> int:
    """64-bit hash of a node's current value (for equality-style operators)."""
    v = node.value
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, int):
        return int_hash(v)
    if isinstance(v, Value):
        return v.h
    return hash_canon(v)


def container_len(v) -> int:
    if isinstance(v, (VSet, VSeq)):
        return len(v.members)
    if isinstance(v, VFunc):
        return len(v.images)
    if isinstance(v, VPart):
        return len(v.hp)
    if isinstance(v, tuple):
        return len(v[1])
    raise TypeError(type(v))


def container_member_hashes(v):
    if isinstance(v, VSet):
        return [m.h for m in v.members]
    if isinstance(v, tuple):
        return [hash_canon(m) for m in v[1]]
    raise TypeError(type(v))


def container_contains_hash(v, h) -> int:
    """Occurrences of hash ``h`` among the members of a set-like value."""
    if isinstance(v, VSet):  # covers VMSet
        return v.hcount.get(h, 0)
    if isinstance(v, tuple):
        return sum(1 for m in v[1] if hash_canon(m) == h)
    raise TypeError(type(v))


# -- leaves ------------------------------------------------------------------


class ConstNode(Node):
    def __init__(self, canon, is_bool=False):
        super().__init__()
        self.is_bool = is_bool
        self.value = canon
        if is_bool:
            self.viol = 0 if canon else 1

    def local_recompute(self):
        pass


class VarRefNode(Node):
    """Leaf referencing a decision variable's current value."""

    def __init__(self, name, value: Value):
        super().__init__()
        self.name = name
        self.target = value
        self.is_bool = isinstance(value, VBool)
        self.local_recompute()

    def init_full(self, ctx):
        self.target.subscribe(self)
        self.local_recompute()

    def local_recompute(self):
        t = self.target
        if isinstance(t, (VInt, VBool)):
            self.value = t.val
            if self.is_bool:
                self.viol = 0 if t.val else 1
        else:
            self.value = t

    def on_value_event(self, ev):
        self.local_recompute()
        return ev

    def detach(self):
        super().detach()
        self.target.unsubscribe(self)


class BinderRefNode(Node):
    """Leaf bound to one element of a container during unrolling."""

    def __init__(self, target: Value):
        super().__init__()
        self.target = target
        self.is_bool = isinstance(target, VBool)
        self.local_recompute()

    def init_full(self, ctx):
        self.target.subscribe(self)
        self.local_recompute()

    def local_recompute(self):
        t = self.target
        if isinstance(t, (VInt, VBool)):
            self.value = t.val
            if self.is_bool:
                self.viol = 0 if t.val else 1
        else:
            self.value = t

    def on_value_event(self, ev):
        self.local_recompute()
        return ev

    def detach(self):
        super().detach()
        self.target.unsubscribe(self)


# -- integer operators -------------------------------------------------------


class Arith(Node):
    """Binary integer arithmetic with floor division semantics."""

    def __init__(self, op, a, b):
        super().__init__((a, b))
        self.op = op

    def local_recompute(self):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined = False
            self.value = None
            return
        x, y = a.value, b.value
        op = self.op
        if op == "+":
            self.value, self.defined = x + y, True
        elif op == "-":
            self.value, self.defined = x - y, True
        elif op == "*":
            self.value, self.defined = x * y, True
        elif op == "/":
            if y == 0:
                self.value, self.defined = None, False
            else:
                self.value, self.defined = x // y, True
        elif op == "%":
            if y == 0:
                self.value, self.defined = None, False
            else:
                self.value, self.defined = x % y, True
        else:
            raise ValueError(op)


class NegNode(Node):
    def __init__(self, a):
        super().__init__((a,))

    def local_recompute(self):
        a = self.children[0]
        self.defined = a.defined
        self.value = -a.value if a.defined else None


class AbsNode(Node):
    def __init__(self, a):
        super().__init__((a,))

    def local_recompute(self):
        a = self.children[0]
        self.defined = a.defined
        self.value = abs(a.value) if a.defined else None


class ToIntNode(Node):
    def __init__(self, a):
        super().__init__((a,))

    def local_recompute(self):
        a = self.children[0]
        self.defined = a.defined
        self.value = int(a.value) if a.defined else None


class CardNode(Node):
    """|c| for a container-valued child."""

    def __init__(self, a):
        super().__init__((a,))

    def local_recompute(self):
        a = self.children[0]
        self.defined = a.defined
        self.value = container_len(a.value) if a.defined else None

    def child_event(self, slot, ev):
        if isinstance(ev, ValueAdded):
            self.value += 1
            return ValueChanged()
        if isinstance(ev, ValueRemoved):
            self.value -= 1
            return ValueChanged()
        if isinstance(ev, (MemberValueChanged, SubsequenceChanged, PositionsSwapped)):
            return None  # cardinality unaffected
        return self._diff(self.local_recompute)


class TupleLitNode(Node):
    """Tuple built from scalar children; value is its canonical form."""

    def local_recompute(self):
        if not all(c.defined for c in self.children):
            self.defined = False
            self.value = None
            return
        self.defined = True
        self.value = make_tuple(
            c.value if not isinstance(c.value, Value) else to_canon(c.value)
            for c in self.children
        )


# -- comparisons -------------------------------------------------------------


class CmpNode(Node):
    """Integer comparison carrying the standard violation measures."""

    is_bool = True

    def __init__(self, op, a, b):
        super().__init__((a, b))
        self.op = op

    def local_recompute(self):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        x, y = a.value, b.value
        op = self.op
        self.defined = True
        if op == "=":
            self.viol = abs(x - y)
        elif op == "!=":
            self.viol = 1 if x == y else 0
        elif op == "<":
            self.viol = max(x - y + 1, 0)
        elif op == "<=":
            self.viol = max(x - y, 0)
        elif op == ">":
            self.viol = max(y - x + 1, 0)
        elif op == ">=":
            self.viol = max(y - x, 0)
        else:
            raise ValueError(op)
        self.value = self.viol == 0


class EqValueNode(Node):
    """(Dis)equality over non-integer operands, compared by hash."""

    is_bool = True

    def __init__(self, op, a, b):
        super().__init__((a, b))
        self.op = op

    def local_recompute(self):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        self.defined = True
        same = value_hash(a) == value_hash(b)
        sat = same if self.op == "=" else not same
        self.viol = 0 if sat else 1
        self.value = sat


# -- logic -------------------------------------------------------------------


class NotNode(Node):
    is_bool = True

    def __init__(self, a):
        super().__init__((a,))

    def local_recompute(self):
        a = self.children[0]
        if not a.defined:
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        self.defined = True
        self.value = not a.value
        self.viol = 0 if self.value else 1


class _Aggregate(Node):
    """Shared machinery for nodes aggregating a dynamic member list.

    Members are either direct children or the unrolled children of a
    comprehension child; ``member_nodes`` is the live list and events
    carry member positions.
    """

    def __init__(self, children, comp=None):
        if comp is not None:
            super().__init__((comp,))
            comp.aggregator = self
            self.member_nodes = comp.children
        else:
            super().__init__(tuple(children))
            self.member_nodes = self.children

    def init_full(self, ctx):
        for c in self.children:
            c.init_full(ctx)
        self.rebuild()

    def local_recompute(self):
        self.rebuild()

    def child_event(self, slot, ev):
        return self._diff(lambda: self.apply_event(slot, ev))

    def apply_event(self, slot, ev):
        if isinstance(ev, ValueAdded):
            self.member_added(ev.index)
        elif isinstance(ev, ValueRemoved):
            self.member_removed(ev.index, ev.removed)
        elif isinstance(ev, PositionsSwapped):
            self.members_swapped(ev.i1, ev.i2)
        elif isinstance(ev, SubsequenceChanged):
            for i in range(ev.start, ev.end):
                self.member_changed(i)
        elif isinstance(ev, MemberHasBecomeUndefined):
            self.member_changed(ev.index)
        elif isinstance(ev, MemberHasBecomeDefined):
            self.member_changed(ev.index)
        elif isinstance(ev, (ValueChanged, HasBecomeUndefined, HasBecomeDefined)):
            if self.member_nodes is self.children:
                self.member_changed(slot)
            else:
                self.rebuild()
        else:
            self.rebuild()


class AndNode(_Aggregate):
    """Conjunction; violation is the sum of member violations."""

    is_bool = True

    def __init__(self, children=(), comp=None):
        self.cv = []
        self.n_false = 0
        self.n_undef = 0
        self.total = 0
        super().__init__(children, comp)

    def _state(self, node):
        return (node.violation, node.value is False, not node.defined)

    def rebuild(self):
        self.cv = [self._state(n) for n in self.member_nodes]
        self.total = sum(v for v, _, _ in self.cv)
        self.n_false = sum(1 for _, f, _ in self.cv if f)
        self.n_undef = sum(1 for _, _, u in self.cv if u)
        self._finish()

    def _finish(self):
        self.viol = self.total
        if self.n_false:
            self.value, self.defined = False, True
        elif self.n_undef:
            self.value, self.defined = None, False
        else:
            self.value, self.defined = self.viol == 0, True

    def member_added(self, i):
        st = self._state(self.member_nodes[i])
        self.cv.insert(i, st)
        self.total += st[0]
        self.n_false += st[1]
        self.n_undef += st[2]
        self._finish()

    def member_removed(self, i, removed):
        st = self.cv.pop(i)
        self.total -= st[0]
        self.n_false -= st[1]
        self.n_undef -= st[2]
        self._finish()

    def members_swapped(self, i, j):
        self.cv[i], self.cv[j] = self.cv[j], self.cv[i]

    def member_changed(self, i):
        old = self.cv[i]
        new = self._state(self.member_nodes[i])
        self.cv[i] = new
        self.total += new[0] - old[0]
        self.n_false += new[1] - old[1]
        self.n_undef += new[2] - old[2]
        self._finish()


class OrNode(_Aggregate):
    """Disjunction; violation is the minimum member violation (1 if empty)."""

    is_bool = True

    def __init__(self, children=(), comp=None):
        self.cv = []
        super().__init__(children, comp)

    def _state(self, node):
        return (node.violation, node.value is True, not node.defined)

    def rebuild(self):
        self.cv = [self._state(n) for n in self.member_nodes]
        self._finish()

    def _finish(self):
        if not self.cv:
            self.viol, self.value, self.defined = 1, False, True
            return
        self.viol = min(v for v, _, _ in self.cv)
        if any(t for _, t, _ in self.cv):
            self.value, self.defined = True, True
        elif any(u for _, _, u in self.cv):
            self.value, self.defined = None, False
        else:
            self.value, self.defined = self.viol == 0, True

    def member_added(self, i):
        self.cv.insert(i, self._state(self.member_nodes[i]))
        self._finish()

    def member_removed(self, i, removed):
        self.cv.pop(i)
        self._finish()

    def members_swapped(self, i, j):
        self.cv[i], self.cv[j] = self.cv[j], self.cv[i]

    def member_changed(self, i):
        self.cv[i] = self._state(self.member_nodes[i])
        self._finish()


class ImplyNode(Node):
    """p -> q evaluated as (!p \\/ q)."""

    is_bool = True

    def __init__(self, a, b):
        super().__init__((a, b))

    def local_recompute(self):
        p, q = self.children
        not_p_viol = VIOL_UNDEF if not p.defined else (1 if p.value else 0)
        q_viol = VIOL_UNDEF if not q.defined else q.violation
        self.viol = min(not_p_viol, q_viol)
        if p.defined and not p.value:
            self.value, self.defined = True, True
        elif q.defined and q.value:
            self.value, self.defined = True, True
        elif not p.defined or not q.defined:
            self.value, self.defined = None, False
        else:
            self.value, self.defined = False, True


class SumNode(_Aggregate):
    """Incremental sum with cached member values and an undefined counter."""

    def __init__(self, children=(), comp=None):
        self.cmv = []
        self.total = 0
        self.n_undef = 0
        super().__init__(children, comp)

    def _mv(self, node):
        return (node.value if node.defined else 0, not node.defined)

    def rebuild(self):
        self.cmv = [self._mv(n) for n in self.member_nodes]
        self.total = sum(v for v, _ in self.cmv)
        self.n_undef = sum(1 for _, u in self.cmv if u)
        self._finish()

    def _finish(self):
        if self.n_undef:
            self.value, self.defined = None, False
        else:
            self.value, self.defined = self.total, True

    def member_added(self, i):
        mv = self._mv(self.member_nodes[i])
        self.cmv.insert(i, mv)
        self.total += mv[0]
        self.n_undef += mv[1]
        self._finish()

    def member_removed(self, i, removed):
        v, u = self.cmv.pop(i)
        self.total -= v
        self.n_undef -= u
        self._finish()

    def members_swapped(self, i, j):
        self.cmv[i], self.cmv[j] = self.cmv[j], self.cmv[i]

    def member_changed(self, i):
        old_v, old_u = self.cmv[i]
        mv = self._mv(self.member_nodes[i])
        self.cmv[i] = mv
        self.total += mv[0] - old_v
        self.n_undef += mv[1] - old_u
        self._finish()


class ExtremumNode(_Aggregate):
    """max/min over members; undefined when empty; rescans on change."""

    def __init__(self, op, children=(), comp=None):
        self.op = op
        super().__init__(children, comp)

    def rebuild(self):
        nodes = self.member_nodes
        if not nodes or any(not n.defined for n in nodes):
            self.value, self.defined = None, False
            return
        vals = [n.value for n in nodes]
        self.value = max(vals) if self.op == "max" else min(vals)
        self.defined = True

    def member_added(self, i):
        self.rebuild()

    def member_removed(self, i, removed):
        self.rebuild()

    def members_swapped(self, i, j):
        pass

    def member_changed(self, i):
        self.rebuild()


class AllDiffNode(_Aggregate):
    """Violation counts repeated member values (by hash)."""

    is_bool = True

    def __init__(self, children=(), comp=None):
        self.chv = []
        self.counts = {}
        self.n_undef = 0
        super().__init__(children, comp)

    def rebuild(self):
        self.chv = []
        self.counts = {}
        self.n_undef = 0
        for n in self.member_nodes:
            if not n.defined:
                self.n_undef += 1
                self.chv.append(None)
                continue
            h = value_hash(n)
            self.chv.append(h)
            self.counts[h] = self.counts.get(h, 0) + 1
        self._finish()

    def _finish(self):
        if self.n_undef:
            self.viol, self.value, self.defined = VIOL_UNDEF, None, False
            return
        self.viol = len(self.chv) - len(self.counts)
        self.value = self.viol == 0
        self.defined = True

    def _count_out(self, h):
        if h is None:
            self.n_undef -= 1
            return
        c = self.counts[h]
        if c == 1:
            del self.counts[h]
        else:
            self.counts[h] = c - 1

    def _count_in(self, h):
        if h is None:
            self.n_undef += 1
            return
        self.counts[h] = self.counts.get(h, 0) + 1

    def _node_hash(self, n):
        return value_hash(n) if n.defined else None

    def member_added(self, i):
        h = self._node_hash(self.member_nodes[i])
        self.chv.insert(i, h)
        self._count_in(h)
        self._finish()

    def member_removed(self, i, removed):
        h = self.chv.pop(i)
        self._count_out(h)
        self._finish()

    def members_swapped(self, i, j):
        self.chv[i], self.chv[j] = self.chv[j], self.chv[i]

    def member_changed(self, i):
        old = self.chv[i]
        new = self._node_hash(self.member_nodes[i])
        if old != new:
            self._count_out(old)
            self._count_in(new)
            self.chv[i] = new
        self._finish()


# -- container operators -----------------------------------------------------


class InNode(Node):
    """x in S, membership by hash."""

    is_bool = True

    def local_recompute(self):
        x, s = self.children
        if not (x.defined and s.defined):
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        self.defined = True
        self.value = container_contains_hash(s.value, value_hash(x)) > 0
        self.viol = 0 if self.value else 1


class SubsetEqNode(Node):
    """a subsetEq b; the violation counts members of a missing from b."""

    is_bool = True

    def __init__(self, a, b):
        super().__init__((a, b))

    def local_recompute(self):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        self.defined = True
        bv = b.value
        self.viol = sum(
            1 for h in container_member_hashes(a.value)
            if not container_contains_hash(bv, h)
        )
        self.value = self.viol == 0

    def child_event(self, slot, ev):
        return self._diff(lambda: self._apply(slot, ev))

    def _apply(self, slot, ev):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined, self.value, self.viol = False, None, VIOL_UNDEF
            return
        if not self.defined:
            self.local_recompute()
            return
        if isinstance(ev, PositionsSwapped):
            return
        if slot == 0:  # change within a
            if isinstance(ev, ValueAdded):
                h = a.value.members[ev.index].h
                if not container_contains_hash(b.value, h):
                    self.viol += 1
            elif isinstance(ev, ValueRemoved):
                if not container_contains_hash(b.value, ev.removed.h):
                    self.viol -= 1
            elif isinstance(ev, MemberValueChanged):
                new = a.value.members[ev.index].h
                if ev.old_hash != new:
                    if not container_contains_hash(b.value, ev.old_hash):
                        self.viol -= 1
                    if not container_contains_hash(b.value, new):
                        self.viol += 1
            else:
                self.local_recompute()
                return
        else:  # change within b; counts below are post-change
            if isinstance(ev, ValueAdded):
                h = b.value.members[ev.index].h
                if container_contains_hash(b.value, h) == 1:
                    self.viol -= container_contains_hash(a.value, h)
            elif isinstance(ev, ValueRemoved):
                h = ev.removed.h
                if container_contains_hash(b.value, h) == 0:
                    self.viol += container_contains_hash(a.value, h)
            elif isinstance(ev, MemberValueChanged):
                old, new = ev.old_hash, b.value.members[ev.index].h
                if old != new:
                    if container_contains_hash(b.value, old) == 0:
                        self.viol += container_contains_hash(a.value, old)
                    if container_contains_hash(b.value, new) == 1:
                        self.viol -= container_contains_hash(a.value, new)
            else:
                self.local_recompute()
                return
        self.value = self.viol == 0


class SetOpNode(Node):
    """union / intersect, recomputed locally into a canonical set."""

    def __init__(self, op, a, b):
        super().__init__((a, b))
        self.op = op

    def _side(self, node):
        v = node.value
        return to_canon(v) if isinstance(v, Value) else v

    def local_recompute(self):
        a, b = self.children
        if not (a.defined and b.defined):
            self.defined, self.value = False, None
            return
        self.defined = True
        av, bv = self._side(a), self._side(b)
        if self.op == "union":
            merged = list(av[1])
            for m in bv[1]:
                if m not in merged:
                    merged.append(m)
            self.value = make_set(merged)
        else:
            self.value = make_set([m for m in av[1] if m in bv[1]])

    def child_event(self, slot, ev):
        return self._diff(self.local_recompute)


class PartsNode(Node):
    """The set of parts of a partition, as a canonical set of sets."""

    def local_recompute(self):
        p = self.children[0]
        if not p.defined:
            self.defined, self.value = False, None
            return
        self.defined = True
        v = p.value
        if isinstance(v, VPart):
            self.value = make_set(
                make_set(to_canon(v.members[i]) for i in v.by_label[lab])
                for lab in v.hp
            )
        else:
            self.value = make_set(make_set(part) for part in v[1])

    def child_event(self, slot, ev):
        return self._diff(self.local_recompute)


class ApplyNode(Node):
    """Function application f(x) and sequence indexing s(i).

    Undefined when the argument lies outside the defined set (or the
    index is out of bounds); sequences index from 1.
    """

    def __init__(self, fn, arg):
        super().__init__((fn, arg))
        self.member_index = None

    def _resolve(self):
        fn, arg = self.children
        self.member_index = None
        if not (fn.defined and arg.defined):
            self.defined, self.value = False, None
            return
        f = fn.value
        a = arg.value
        if isinstance(a, Value):
            a = to_canon(a)
        if isinstance(f, VFunc):
            if f.direct:
                idx = pre_index(f.pre_domain, a)
            else:
                idx = f.index_of_pre_hash(hash_canon(a))
            if idx is None or idx >= len(f.images):
                self.defined, self.value = False, None
                return
            self.member_index = idx
            member = f.images[idx]
            self.defined = True
            self.value = member.val if isinstance(member, (VInt, VBool)) else member
            return
        if isinstance(f, VSeq):
            if isinstance(a, bool) or not isinstance(a, int) or not 1 <= a <= len(f.members):
                self.defined, self.value = False, None
                return
            self.member_index = a - 1
            member = f.members[a - 1]
            self.defined = True
            self.value = member.val if isinstance(member, (VInt, VBool)) else member
            return
        # canonical function / sequence constants
        k = kind_of(f)
        if k == "func":
            for pre, img in f[1]:
                if pre == a:
                    self.defined, self.value = True, img
                    return
            self.defined, self.value = False, None
            return
        if k == "seq":
            body = f[1]
            if isinstance(a, bool) or not isinstance(a, int) or not 1 <= a <= len(body):
                self.defined, self.value = False, None
                return
            self.defined, self.value = True, body[a - 1]
            return
        raise TypeError(f"cannot apply {k}")

    def local_recompute(self):
        self._resolve()

    def child_event(self, slot, ev):
        if slot == 0 and self.member_index is not None:
            # events from the applied function/sequence: skip unrelated members
            if isinstance(ev, (MemberValueChanged, MemberHasBecomeDefined,
                               MemberHasBecomeUndefined)):
                if ev.index != self.member_index:
                    return None
            elif isinstance(ev, SubsequenceChanged):
                if not ev.start <= self.member_index < ev.end:
                    return None
            elif isinstance(ev, PositionsSwapped):
                if self.member_index not in (ev.i1, ev.i2):
                    return None
        return self._diff(self.local_recompute)


class ConstFuncApplyNode(Node):
    """Application of a parameter function, via a precomputed lookup table."""

    def __init__(self, table, arg):
        super().__init__((arg,))
        self.table = table

    def local_recompute(self):
        arg = self.children[0]
        if not arg.defined:
            self.defined, self.value = False, None
            return
        a = arg.value
        if isinstance(a, Value):
            a = to_canon(a)
        hit = self.table.get(a, _MISSING)
        if hit is _MISSING:
            self.defined, self.value = False, None
        else:
            self.defined, self.value = True, hit


class _Missing:
    pass


_MISSING = _Missing()
