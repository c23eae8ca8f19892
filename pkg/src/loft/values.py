"""Mutable runtime values with incrementally maintained 64-bit hashes.

Values form an ownership tree: containers own their members, and every
edit updates the hashes of the edited value and all its ancestors in
O(1) hash work per level (sequences pay for index shifts).  Each edit
returns its exact inverse plus the trigger events describing the change
at every level of the ownership chain, innermost first.

Storage conventions:
  * sets and multisets keep members in an extensible array; deletion
    swaps the victim with the last member and pops,
  * sequences keep members in order; insertion and deletion shift,
  * functions either compute preimage indexes directly (total functions
    over enumerable preimages) or store explicit preimage arrays,
  * partitions keep one flat member array, a label per member, and a
    per-part hash table ``hp``.
"""

from __future__ import annotations

import itertools

from .canon import hash_canon, make_func, make_mset, make_part, make_seq, make_set, make_tuple
from .domains import Domain
from .hashing import MASK64, combine_ordered, int_hash, mix, pair_hash


# --------------------------------------------------------------------------
# Trigger events


class ValueChanged:
    __slots__ = ()


class HasBecomeUndefined:
    __slots__ = ()


class HasBecomeDefined:
    __slots__ = ()


class ValueAdded:
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index


class ValueRemoved:
    __slots__ = ("index", "removed")

    def __init__(self, index, removed):
        self.index = index
        self.removed = removed


class MemberValueChanged:
    __slots__ = ("index", "old_hash")

    def __init__(self, index, old_hash):
        self.index = index
        self.old_hash = old_hash


class SubsequenceChanged:
    __slots__ = ("start", "end")

    def __init__(self, start, end):
        self.start = start
        self.end = end


class PositionsSwapped:
    __slots__ = ("i1", "i2")

    def __init__(self, i1, i2):
        self.i1 = i1
        self.i2 = i2


class MemberHasBecomeDefined:
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index


class MemberHasBecomeUndefined:
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index


# --------------------------------------------------------------------------
# Value classes


class Value:
    __slots__ = ("h", "owner", "slot", "subscribers")

    def __init__(self):
        self.h = 0
        self.owner = None
        self.slot = -1
        self.subscribers = {}

    def subscribe(self, node) -> None:
        self.subscribers[id(node)] = node

    def unsubscribe(self, node) -> None:
        self.subscribers.pop(id(node), None)


class VBool(Value):
    __slots__ = ("val",)

    def __init__(self, val: bool):
        super().__init__()
        self.val = val
        self.h = int(val)


class VInt(Value):
    __slots__ = ("val",)

    def __init__(self, val: int):
        super().__init__()
        self.val = val
        self.h = int_hash(val)


class VTuple(Value):
    __slots__ = ("members",)

    def __init__(self, members):
        super().__init__()
        self.members = list(members)
        for i, m in enumerate(self.members):
            m.owner = self
            m.slot = i
        self.h = combine_ordered(tuple(m.h for m in self.members))

    def _member_hash_changed(self, slot, h_old, h_new):
        self.h = combine_ordered(tuple(m.h for m in self.members))
        return MemberValueChanged(slot, h_old)


class VSet(Value):
    __slots__ = ("members", "hcount", "dup")

    def __init__(self):
        super().__init__()
        self.members = []
        self.hcount = {}
        self.dup = 0

    def __len__(self):
        return len(self.members)

    def contains_hash(self, h: int) -> bool:
        return self.hcount.get(h, 0) > 0

    def _count_in(self, h):
        cnt = self.hcount.get(h, 0)
        if cnt >= 1:
            self.dup += 1
        self.hcount[h] = cnt + 1

    def _count_out(self, h):
        cnt = self.hcount[h]
        if cnt > 1:
            self.dup -= 1
            self.hcount[h] = cnt - 1
        else:
            del self.hcount[h]

    def _member_hash_changed(self, slot, h_old, h_new):
        self._count_out(h_old)
        self._count_in(h_new)
        self.h = (self.h - mix(h_old) + mix(h_new)) & MASK64
        return MemberValueChanged(slot, h_old)


class VMSet(VSet):
    __slots__ = ()

    def _count_in(self, h):
        self.hcount[h] = self.hcount.get(h, 0) + 1

    def _count_out(self, h):
        cnt = self.hcount[h]
        if cnt > 1:
            self.hcount[h] = cnt - 1
        else:
            del self.hcount[h]


class VSeq(Value):
    __slots__ = ("members", "contrib")

    def __init__(self):
        super().__init__()
        self.members = []
        self.contrib = []

    def __len__(self):
        return len(self.members)

    def _member_hash_changed(self, slot, h_old, h_new):
        c_new = mix(pair_hash(slot, h_new))
        self.h = (self.h - self.contrib[slot] + c_new) & MASK64
        self.contrib[slot] = c_new
        return SubsequenceChanged(slot, slot + 1)


class VFunc(Value):
    """Function value.

    ``direct`` mode stores only the image array; the preimage index is
    computed from the (total, enumerable) preimage domain.  Otherwise
    preimages are stored explicitly alongside the images.
    """

    __slots__ = ("direct", "pre_domain", "pre_canons", "pre_hashes",
                 "defined", "images", "contrib", "pre_hcount", "dup")

    def __init__(self, direct: bool, pre_domain: Domain):
        super().__init__()
        self.direct = direct
        self.pre_domain = pre_domain
        self.pre_canons = []   # direct mode: canonical preimages by index
        self.pre_hashes = []
        self.defined = []      # explicit mode: preimage Values by index
        self.images = []
        self.contrib = []
        self.pre_hcount = {}
        self.dup = 0

    def __len__(self):
        return len(self.images)

    def index_of_pre_hash(self, h: int):
        if self.direct:
            raise RuntimeError("direct functions index by preimage value")
        for i, ph in enumerate(self.pre_hashes):
            if ph == h:
                return i
        return None

    def _pair_contrib(self, i: int) -> int:
        return mix(combine_ordered((self.pre_hashes[i], self.images[i].h)))

    def _member_hash_changed(self, slot, h_old, h_new):
        if slot >= 0:  # image slot
            c_new = self._pair_contrib(slot)
            self.h = (self.h - self.contrib[slot] + c_new) & MASK64
            self.contrib[slot] = c_new
            return MemberValueChanged(slot, h_old)
        # explicit preimage slot: rekeying, fall back to a coarse event
        i = -slot - 1
        cnt = self.pre_hcount[h_old]
        if cnt > 1:
            self.dup -= 1
            self.pre_hcount[h_old] = cnt - 1
        else:
            del self.pre_hcount[h_old]
        if self.pre_hcount.get(h_new, 0) >= 1:
            self.dup += 1
        self.pre_hcount[h_new] = self.pre_hcount.get(h_new, 0) + 1
        self.pre_hashes[i] = h_new
        c_new = self._pair_contrib(i)
        self.h = (self.h - self.contrib[i] + c_new) & MASK64
        self.contrib[i] = c_new
        return ValueChanged()


class VPart(Value):
    """Partition value: member array ``members``, label array ``labels``,
    per-part hashes ``hp``.  ``hp_writes`` counts h_p entry updates for
    instrumentation."""

    __slots__ = ("members", "labels", "contrib", "hp", "by_label",
                 "pos_in_label", "hcount", "dup", "next_label", "hp_writes")

    def __init__(self):
        super().__init__()
        self.members = []
        self.labels = []
        self.contrib = []
        self.hp = {}
        self.by_label = {}
        self.pos_in_label = []
        self.hcount = {}
        self.dup = 0
        self.next_label = 0
        self.hp_writes = 0

    def __len__(self):
        return len(self.members)

    def part_labels(self):
        return list(self.hp.keys())

    def part_size(self, label):
        return len(self.by_label[label])

    def _append_member(self, m: Value, label: int):
        i = len(self.members)
        m.owner = self
        m.slot = i
        self.members.append(m)
        self.labels.append(label)
        c = mix(m.h)
        self.contrib.append(c)
        cnt = self.hcount.get(m.h, 0)
        if cnt >= 1:
            self.dup += 1
        self.hcount[m.h] = cnt + 1
        if label in self.hp:
            self.h = (self.h - mix(self.hp[label])) & MASK64
            self.hp[label] = (self.hp[label] + c) & MASK64
            self.by_label[label].append(i)
            self.pos_in_label.append(len(self.by_label[label]) - 1)
        else:
            self.hp[label] = c
            self.by_label[label] = [i]
            self.pos_in_label.append(0)
            self.next_label = max(self.next_label, label + 1)
        self.hp_writes += 1
        self.h = (self.h + mix(self.hp[label])) & MASK64

    def _move(self, i: int, to_label: int):
        from_label = self.labels[i]
        c = self.contrib[i]
        # leave the old part
        old = self.hp[from_label]
        self.h = (self.h - mix(old)) & MASK64
        bl = self.by_label[from_label]
        pos = self.pos_in_label[i]
        last = bl[-1]
        bl[pos] = last
        self.pos_in_label[last] = pos
        bl.pop()
        if bl:
            self.hp[from_label] = (old - c) & MASK64
            self.h = (self.h + mix(self.hp[from_label])) & MASK64
        else:
            del self.hp[from_label]
            del self.by_label[from_label]
        self.hp_writes += 1
        # join the new part
        if to_label in self.hp:
            self.h = (self.h - mix(self.hp[to_label])) & MASK64
            self.hp[to_label] = (self.hp[to_label] + c) & MASK64
            self.by_label[to_label].append(i)
            self.pos_in_label[i] = len(self.by_label[to_label]) - 1
        else:
            self.hp[to_label] = c
            self.by_label[to_label] = [i]
            self.pos_in_label[i] = 0
            self.next_label = max(self.next_label, to_label + 1)
        self.hp_writes += 1
        self.h = (self.h + mix(self.hp[to_label])) & MASK64
        self.labels[i] = to_label
        return from_label

    def _member_hash_changed(self, slot, h_old, h_new):
        label = self.labels[slot]
        cnt = self.hcount[h_old]
        if cnt > 1:
            self.dup -= 1
            self.hcount[h_old] = cnt - 1
        else:
            del self.hcount[h_old]
        if self.hcount.get(h_new, 0) >= 1:
            self.dup += 1
        self.hcount[h_new] = self.hcount.get(h_new, 0) + 1
        c_new = mix(h_new)
        self.h = (self.h - mix(self.hp[label])) & MASK64
        self.hp[label] = (self.hp[label] - self.contrib[slot] + c_new) & MASK64
        self.h = (self.h + mix(self.hp[label])) & MASK64
        self.hp_writes += 1
        self.contrib[slot] = c_new
        return ValueChanged()


# --------------------------------------------------------------------------
# Edits

Edit = tuple  # ("op", target, ...)


def apply_edit(edit: Edit):
    """Apply one edit; return (inverse_edit, [(value, event), ...]).

    Events are listed innermost first, ending with the ancestors'
    member-change notifications.
    """
    op = edit[0]
    if op == "assign":
        _, v, new = edit
        old = v.val
        h_old = v.h
        v.val = new
        v.h = int(new) if isinstance(v, VBool) else int_hash(new)
        events = [(v, ValueChanged())]
        _bubble(v, h_old, events)
        return ("assign", v, old), events
    if op == "append":
        _, s, m = edit
        h_old = s.h
        i = len(s.members)
        m.owner = s
        m.slot = i
        s.members.append(m)
        s._count_in(m.h)
        s.h = (s.h + mix(m.h)) & MASK64
        events = [(s, ValueAdded(i))]
        _bubble(s, h_old, events)
        return ("pop", s), events
    if op == "pop":
        _, s = edit
        h_old = s.h
        m = s.members.pop()
        i = len(s.members)
        s._count_out(m.h)
        s.h = (s.h - mix(m.h)) & MASK64
        m.owner = None
        events = [(s, ValueRemoved(i, m))]
        _bubble(s, h_old, events)
        return ("append", s, m), events
    if op == "swap":
        _, s, i, j = edit
        h_old = s.h
        ms = s.members
        ms[i], ms[j] = ms[j], ms[i]
        ms[i].slot, ms[j].slot = i, j
        if isinstance(s, VSeq):
            for k in (i, j):
                c_new = mix(pair_hash(k, ms[k].h))
                s.h = (s.h - s.contrib[k] + c_new) & MASK64
                s.contrib[k] = c_new
        events = [(s, PositionsSwapped(i, j))]
        if s.h != h_old:
            _bubble(s, h_old, events)
        return ("swap", s, i, j), events
    if op == "seq_insert":
        _, s, i, m = edit
        h_old = s.h
        n = len(s.members)
        s.h = (s.h - sum(s.contrib[i:])) & MASK64
        s.members.insert(i, m)
        m.owner = s
        del s.contrib[i:]
        for k in range(i, n + 1):
            mk = s.members[k]
            mk.slot = k
            c = mix(pair_hash(k, mk.h))
            s.contrib.append(c)
            s.h = (s.h + c) & MASK64
        events = [(s, ValueAdded(i))]
        _bubble(s, h_old, events)
        return ("seq_remove", s, i), events
    if op == "seq_remove":
        _, s, i = edit
        h_old = s.h
        n = len(s.members)
        s.h = (s.h - sum(s.contrib[i:])) & MASK64
        m = s.members.pop(i)
        m.owner = None
        del s.contrib[i:]
        for k in range(i, n - 1):
            mk = s.members[k]
            mk.slot = k
            c = mix(pair_hash(k, mk.h))
            s.contrib.append(c)
            s.h = (s.h + c) & MASK64
        events = [(s, ValueRemoved(i, m))]
        _bubble(s, h_old, events)
        return ("seq_insert", s, i, m), events
    if op == "func_add":
        _, f, pre, img = edit
        h_old = f.h
        i = len(f.images)
        f.defined.append(pre)
        pre.owner = f
        pre.slot = -i - 1
        img.owner = f
        img.slot = i
        f.images.append(img)
        f.pre_hashes.append(pre.h)
        if f.pre_hcount.get(pre.h, 0) >= 1:
            f.dup += 1
        f.pre_hcount[pre.h] = f.pre_hcount.get(pre.h, 0) + 1
        c = f._pair_contrib(i)
        f.contrib.append(c)
        f.h = (f.h + c) & MASK64
        events = [(f, ValueAdded(i))]
        _bubble(f, h_old, events)
        return ("func_pop", f), events
    if op == "func_pop":
        _, f = edit
        h_old = f.h
        i = len(f.images) - 1
        pre = f.defined.pop()
        img = f.images.pop()
        pre.owner = img.owner = None
        f.pre_hashes.pop()
        cnt = f.pre_hcount[pre.h]
        if cnt > 1:
            f.dup -= 1
            f.pre_hcount[pre.h] = cnt - 1
        else:
            del f.pre_hcount[pre.h]
        c = f.contrib.pop()
        f.h = (f.h - c) & MASK64
        events = [(f, ValueRemoved(i, (pre, img)))]
        _bubble(f, h_old, events)
        return ("func_add", f, pre, img), events
    if op == "func_swap":
        _, f, i, j = edit
        h_old = f.h
        for arr in (f.defined, f.images, f.pre_hashes, f.contrib):
            arr[i], arr[j] = arr[j], arr[i]
        f.defined[i].slot, f.defined[j].slot = -i - 1, -j - 1
        f.images[i].slot, f.images[j].slot = i, j
        events = [(f, PositionsSwapped(i, j))]
        if f.h != h_old:
            _bubble(f, h_old, events)
        return ("func_swap", f, i, j), events
    if op == "part_move":
        _, p, i, label = edit
        h_old = p.h
        from_label = p._move(i, label)
        events = [(p, ValueChanged())]
        _bubble(p, h_old, events)
        return ("part_move", p, i, from_label), events
    raise ValueError(f"unknown edit {op!r}")


def _bubble(value: Value, h_old: int, events: list) -> None:
    cur = value
    while cur.owner is not None:
        owner = cur.owner
        prev = owner.h
        ev = owner._member_hash_changed(cur.slot, h_old, cur.h)
        events.append((owner, ev))
        h_old = prev
        cur = owner


# --------------------------------------------------------------------------
# Canonical conversion


def enumerate_domain(d: Domain):
    """All canonical values of an enumerable atomic/tuple domain, ascending."""
    if d.kind == "bool":
        return [False, True]
    if d.kind == "int":
        return [lo + k for lo, hi in d.ranges for k in range(hi - lo + 1)]
    if d.kind == "enum":
        return list(range(len(d.enum_values)))
    if d.kind == "tuple":
        parts = [enumerate_domain(m) for m in d.inner]
        return [make_tuple(t) for t in itertools.product(*parts)]
    raise ValueError(f"domain kind {d.kind} is not enumerable")


def is_directly_indexable(d: Domain) -> bool:
    """Preimage domains whose index can be computed instead of stored."""
    if d.kind in ("int", "enum", "bool"):
        return True
    if d.kind == "tuple":
        return all(is_directly_indexable(m) for m in d.inner)
    return False


def pre_index(d: Domain, c) -> int | None:
    """Index of canonical value ``c`` within enumerable domain ``d``."""
    if d.kind == "bool":
        return int(c)
    if d.kind == "int" or d.kind == "enum":
        if d.kind == "enum":
            return c if 0 <= c < len(d.enum_values) else None
        idx = 0
        for lo, hi in d.ranges:
            if lo <= c <= hi:
                return idx + (c - lo)
            idx += hi - lo + 1
        return None
    if d.kind == "tuple":
        idx = 0
        for m, md in zip(c[1], d.inner):
            sub = pre_index(md, m)
            if sub is None:
                return None
            idx = idx * md.value_count() + sub
        return idx
    raise ValueError(f"domain kind {d.kind} is not enumerable")


def from_canon(d: Domain, c) -> Value:
    k = d.kind
    if k == "bool":
        return VBool(c)
    if k in ("int", "enum"):
        return VInt(c)
    if k == "tuple":
        return VTuple([from_canon(md, m) for md, m in zip(d.inner, c[1])])
    if k in ("set", "mset"):
        s = VSet() if k == "set" else VMSet()
        for m in c[1]:
            apply_edit(("append", s, from_canon(d.inner[0], m)))
        return s
    if k == "sequence":
        s = VSeq()
        for i, m in enumerate(c[1]):
            apply_edit(("seq_insert", s, i, from_canon(d.inner[0], m)))
        return s
    if k == "function":
        pre_d, img_d = d.inner
        direct = bool(d.attr("total")) and is_directly_indexable(pre_d)
        f = VFunc(direct, pre_d)
        if direct:
            by_pre = dict(c[1])
            for pc in enumerate_domain(pre_d):
                i = len(f.images)
                img = from_canon(img_d, by_pre[pc])
                img.owner = f
                img.slot = i
                f.pre_canons.append(pc)
                f.pre_hashes.append(hash_canon(pc))
                f.images.append(img)
                f.contrib.append(f._pair_contrib(i))
                f.h = (f.h + f.contrib[i]) & MASK64
        else:
            for pc, ic in c[1]:
                apply_edit(("func_add", f, from_canon(pre_d, pc), from_canon(img_d, ic)))
        return f
    if k == "partition":
        base = d.inner[0]
        p = VPart()
        for label, part in enumerate(c[1]):
            for m in part:
                p._append_member(from_canon(base, m), label)
        return p
    raise ValueError(f"unknown kind {k}")


def to_canon(v: Value):
    if isinstance(v, VBool):
        return v.val
    if isinstance(v, VInt):
        return v.val
    if isinstance(v, VTuple):
        return make_tuple(to_canon(m) for m in v.members)
    if isinstance(v, VMSet):
        return make_mset(to_canon(m) for m in v.members)
    if isinstance(v, VSet):
        return make_set(to_canon(m) for m in v.members)
    if isinstance(v, VSeq):
        return make_seq(to_canon(m) for m in v.members)
    if isinstance(v, VFunc):
        if v.direct:
            pairs = [(pc, to_canon(img)) for pc, img in zip(v.pre_canons, v.images)]
        else:
            pairs = [(to_canon(p), to_canon(i)) for p, i in zip(v.defined, v.images)]
        return make_func(pairs)
    if isinstance(v, VPart):
        return make_part(
            [to_canon(v.members[i]) for i in v.by_label[lab]] for lab in v.hp
        )
    raise TypeError(type(v))


def scratch_hash(v: Value) -> int:
    """From-scratch hash, the oracle against the cached incremental one."""
    return hash_canon(to_canon(v))


# --------------------------------------------------------------------------
# Fast storage-level conformance (hash-based uniqueness, used after moves)


def conforms_value(d: Domain, v: Value) -> str | None:
    k = d.kind
    if k == "bool":
        return None if isinstance(v, VBool) else "expected bool"
    if k == "int":
        if not isinstance(v, VInt) or not d.int_contains(v.val):
            return f"integer outside domain"
        return None
    if k == "enum":
        if not isinstance(v, VInt) or not 0 <= v.val < len(d.enum_values):
            return "enum value outside domain"
        return None
    if k == "tuple":
        for md, m in zip(d.inner, v.members):
            err = conforms_value(md, m)
            if err:
                return err
        return None
    if k in ("set", "mset"):
        if k == "set" and v.dup:
            return "set has duplicate members"
        err = _card_err(d, len(v.members))
        if err:
            return err
        for m in v.members:
            err = conforms_value(d.inner[0], m)
            if err:
                return err
        return None
    if k == "sequence":
        err = _card_err(d, len(v.members))
        if err:
            return err
        if d.attr("injective"):
            seen = {}
            for m in v.members:
                if m.h in seen:
                    return "injective sequence has duplicate members"
                seen[m.h] = True
        for m in v.members:
            err = conforms_value(d.inner[0], m)
            if err:
                return err
        return None
    if k == "function":
        if not v.direct:
            if v.dup:
                return "function maps a preimage twice"
            if d.attr("total") and len(v.images) != d.inner[0].value_count():
                return "total function does not cover its preimage domain"
            if not d.attr("total"):
                err = _card_err(d, len(v.images))
                if err:
                    return err
            for p in v.defined:
                err = conforms_value(d.inner[0], p)
                if err:
                    return err
        if d.attr("injective"):
            seen = {}
            for m in v.images:
                if m.h in seen:
                    return "injective function repeats an image"
                seen[m.h] = True
        for m in v.images:
            err = conforms_value(d.inner[1], m)
            if err:
                return err
        return None
    if k == "partition":
        if v.dup:
            return "partition repeats an element"
        if len(v.members) != d.inner[0].value_count():
            return "partition does not cover its base domain"
        lo, hi = d.part_count_bounds()
        if not lo <= len(v.hp) <= hi:
            return "part count outside bounds"
        plo, phi = d.part_size_bounds()
        sizes = [len(idx) for idx in v.by_label.values()]
        for s in sizes:
            if not plo <= s <= phi:
                return "part size outside bounds"
        if d.attr("regular") and len(set(sizes)) > 1:
            return "regular partition has parts of unequal size"
        for m in v.members:
            err = conforms_value(d.inner[0], m)
            if err:
                return err
        return None
    raise ValueError(f"unknown kind {k}")


def _card_err(d: Domain, n: int) -> str | None:
    size = d.attr("size")
    if size is not None and n != size:
        return f"cardinality {n} != size {size}"
    lo = d.attr("minSize")
    if lo is not None and n < lo:
        return f"cardinality {n} < minSize {lo}"
    hi = d.attr("maxSize")
    if hi is not None and n > hi:
        return f"cardinality {n} > maxSize {hi}"
    return None
