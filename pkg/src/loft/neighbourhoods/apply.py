"""Move generation: apply a neighbourhood structure to the current state.

A structure gets up to 50 attempts to produce a type-valid move.  Cheap
feasibility checks (size bounds, duplicate membership) run before any
edit where possible; after a candidate move is applied, the mutated
variables are checked against their full domain attributes and the move
is reverted on violation.  Element selection inside lifts is biased
proportionally to 1 + element violation.  Random elements for Add
templates come from the resource-limited generator, and the consumed
resource is recorded as the move's cost for bandit accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..canon import hash_canon
from ..generate import generate_with_retry
from ..values import (VBool, VFunc, VInt, VPart, VSeq, VSet, VTuple,
                      conforms_value, from_canon, pre_index)

MAX_ATTEMPTS = 50


@dataclass
class Move:
    structure: object
    tx: object          # transaction holding forward edits' exact inverses
    cost: int           # generation resource plus one per attempt iteration
    abandoned: bool = False
    reverted: bool = False


ABANDONED = "abandoned"


def apply_structure(ns, ctx, rng, attempts: int = MAX_ATTEMPTS) -> Move:
    root = ctx.vars[ns.var]
    total_cost = 0
    for _ in range(attempts):
        tx = ctx.begin()
        acc = [0]
        ok = _apply(ns.chain, root, ctx, rng, acc)
        ctx.end()
        total_cost += 1 + acc[0]
        if ok and _post_check(ctx, tx) is None:
            return Move(structure=ns, tx=tx, cost=total_cost)
        if tx.log:
            ctx.revert(tx)
    return Move(structure=ns, tx=None, cost=total_cost, abandoned=True)


def revert(move: Move, ctx) -> None:
    if move.abandoned:
        return  # failed attempts revert themselves
    assert not move.reverted, "move reverted twice"
    move.reverted = True
    ctx.revert(move.tx)


def _post_check(ctx, tx):
    domains = ctx.find_domains
    for root_id in tx.touched:
        name = ctx.root_names.get(root_id)
        if name is None:
            continue
        err = conforms_value(domains[name], ctx.vars[name])
        if err:
            return err
    return None


# -- selection helpers ------------------------------------------------------


def _pick_biased(ctx, members, rng) -> int:
    """Index into members, weighted by 1 + rolled element violation."""
    vmap = ctx.violation_map()
    weights = [1 + vmap.rolled(m) for m in members]
    total = sum(weights)
    if total == len(members):
        return rng.randrange(len(members))
    r = rng.randrange(total)
    for i, w in enumerate(weights):
        r -= w
        if r < 0:
            return i
    return len(members) - 1


def _gen(dom, rng, acc):
    value, consumed = generate_with_retry(dom, rng)
    acc[0] += consumed
    return value


def _set_remove_at(ctx, s, idx):
    last = len(s.members) - 1
    if idx != last:
        ctx.apply(("swap", s, idx, last))
    obj = s.members[last]
    ctx.apply(("pop", s))
    return obj


# -- the template interpreter -------------------------------------------------


def _apply(chain, target, ctx, rng, acc) -> bool:
    tag = chain[0]
    if tag == "LiftSingle":
        members = target.members
        if not members:
            return False
        idx = _pick_biased(ctx, members, rng)
        return _apply(chain[2], members[idx], ctx, rng, acc)
    if tag == "LiftMultiple":
        members = target.members
        if len(members) < 2:
            return False
        i = _pick_biased(ctx, members, rng)
        j = rng.randrange(len(members) - 1)
        if j >= i:
            j += 1
        return _apply_sync(chain[2], members[i], members[j], chain[3], ctx, rng, acc)
    if tag == "FunctionRangeLiftSingle":
        images = target.images
        if not images:
            return False
        idx = _pick_biased(ctx, images, rng)
        return _apply(chain[2], images[idx], ctx, rng, acc)
    if tag == "FunctionDefinedLiftSingle":
        defined = target.defined
        if not defined:
            return False
        idx = _pick_biased(ctx, defined, rng)
        return _apply(chain[2], defined[idx], ctx, rng, acc)
    return _apply_leaf(tag, chain[1], target, ctx, rng, acc)


def _apply_leaf(tag, dom, target, ctx, rng, acc) -> bool:
    if tag == "boolReassign":
        ctx.apply(("assign", target, not target.val))
        return True
    if tag == "enumAssignRandom":
        n = len(dom.enum_values)
        if n < 2:
            return False
        v = rng.randrange(n - 1)
        if v >= target.val:
            v += 1
        ctx.apply(("assign", target, v))
        return True
    if tag == "intAssignRandom":
        n = dom.int_count()
        if n < 2:
            return False
        while True:
            v = dom.int_at(rng.randrange(n))
            if v != target.val:
                break
        ctx.apply(("assign", target, v))
        return True
    if tag == "intAssignRandomFromViolation":
        v = ctx.violation_map().rolled(target)
        if v <= 0:
            return False
        x = rng.randint(target.val - v, target.val + v)
        if x == target.val or not dom.int_contains(x):
            return False
        ctx.apply(("assign", target, x))
        return True
    if tag in ("SetAdd", "MSetAdd"):
        hi = dom.max_card()
        if hi is not None and len(target.members) >= hi:
            return False
        value = _gen(dom.inner[0], rng, acc)
        h = hash_canon(value)
        if tag == "SetAdd" and target.contains_hash(h):
            return False
        ctx.apply(("append", target, from_canon(dom.inner[0], value)))
        return True
    if tag in ("SetRemove", "MSetRemove"):
        if len(target.members) <= max(dom.min_card(), 0) or not target.members:
            return False
        _set_remove_at(ctx, target, rng.randrange(len(target.members)))
        return True
    if tag == "SequenceAdd":
        hi = dom.max_card()
        if hi is not None and len(target.members) >= hi:
            return False
        value = _gen(dom.inner[0], rng, acc)
        pos = rng.randint(0, len(target.members))
        ctx.apply(("seq_insert", target, pos, from_canon(dom.inner[0], value)))
        return True
    if tag == "SequenceRemove":
        if len(target.members) <= max(dom.min_card(), 0) or not target.members:
            return False
        ctx.apply(("seq_remove", target, rng.randrange(len(target.members))))
        return True
    if tag == "SequenceReverseSub":
        n = len(target.members)
        if n < 2:
            return False
        length = rng.randint(1, min(n, 8))
        start = rng.randint(0, n - length)
        for k in range(length // 2):
            ctx.apply(("swap", target, start + k, start + length - 1 - k))
        return True
    if tag == "SequencePositionsSwap":
        n = len(target.members)
        if n < 2:
            return False
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        ctx.apply(("swap", target, i, j))
        return True
    if tag == "SequenceReassignSub":
        n = len(target.members)
        if n == 0:
            return False
        length = rng.randint(1, min(n, 8))
        start = rng.randint(0, n - length)
        for pos in range(start, start + length):
            member = target.members[pos]
            value = _gen(dom.inner[0], rng, acc)
            if isinstance(member, (VInt, VBool)):
                if value != member.val:
                    ctx.apply(("assign", member, value))
            else:
                ctx.apply(("seq_remove", target, pos))
                ctx.apply(("seq_insert", target, pos, from_canon(dom.inner[0], value)))
        return True
    if tag == "FunctionAdd":
        hi = dom.max_card()
        if hi is not None and len(target.images) >= hi:
            return False
        pre = _gen(dom.inner[0], rng, acc)
        if hash_canon(pre) in target.pre_hcount:
            return False
        img = _gen(dom.inner[1], rng, acc)
        ctx.apply(("func_add", target,
                   from_canon(dom.inner[0], pre), from_canon(dom.inner[1], img)))
        return True
    if tag == "FunctionRemove":
        if len(target.images) <= dom.attr("minSize", 0) or not target.images:
            return False
        idx = rng.randrange(len(target.images))
        last = len(target.images) - 1
        if idx != last:
            ctx.apply(("func_swap", target, idx, last))
        ctx.apply(("func_pop", target))
        return True
    if tag == "FunctionUnifyImages":
        return _two_images(target, rng, want_equal=False,
                           action=lambda i, j: _copy_image(ctx, target, i, j))
    if tag == "FunctionSplitImages":
        def split(i, j):
            value = _gen(dom.inner[1], rng, acc)
            member = target.images[j]
            if not isinstance(member, VInt) or value == member.val:
                return False
            ctx.apply(("assign", member, value))
            return True
        return _two_images(target, rng, want_equal=True, action=split)
    if tag == "FunctionSwap":
        return _two_images(target, rng, want_equal=False,
                           action=lambda i, j: _swap_images(ctx, target, i, j))
    if tag == "FunctionSwapAlongAxis":
        return _swap_along_axis(dom, target, ctx, rng)
    if tag == "PartitionMoveParts":
        labels = target.part_labels()
        if len(labels) < 2:
            return False
        l1, l2 = _two_of(labels, rng)
        plo, phi = dom.part_size_bounds()
        size1 = target.part_size(l1)
        if size1 > 1 and size1 - 1 < plo:
            return False
        if size1 == 1 and len(labels) - 1 < dom.part_count_bounds()[0]:
            return False
        if target.part_size(l2) + 1 > phi:
            return False
        elem = target.by_label[l1][rng.randrange(size1)]
        ctx.apply(("part_move", target, elem, l2))
        return True
    if tag == "PartitionSwapParts":
        labels = target.part_labels()
        if len(labels) < 2:
            return False
        l1, l2 = _two_of(labels, rng)
        e1 = target.by_label[l1][rng.randrange(target.part_size(l1))]
        e2 = target.by_label[l2][rng.randrange(target.part_size(l2))]
        ctx.apply(("part_move", target, e1, l2))
        ctx.apply(("part_move", target, e2, l1))
        return True
    if tag == "PartitionMergeParts":
        labels = target.part_labels()
        if len(labels) < 2 or len(labels) - 1 < dom.part_count_bounds()[0]:
            return False
        l1, l2 = _two_of(labels, rng)
        merged = target.part_size(l1) + target.part_size(l2)
        if merged > dom.part_size_bounds()[1]:
            return False
        for elem in list(target.by_label[l2]):
            ctx.apply(("part_move", target, elem, l1))
        return True
    if tag == "PartitionSplitPart":
        labels = [l for l in target.part_labels() if target.part_size(l) >= 2]
        if not labels or len(target.part_labels()) + 1 > dom.part_count_bounds()[1]:
            return False
        l1 = labels[rng.randrange(len(labels))]
        elems = list(target.by_label[l1])
        movers = [e for e in elems if rng.random() < 0.5]
        if not movers or len(movers) == len(elems):
            return False
        plo = dom.part_size_bounds()[0]
        if len(movers) < plo or len(elems) - len(movers) < plo:
            return False
        fresh = target.next_label
        for elem in movers:
            ctx.apply(("part_move", target, elem, fresh))
        return True
    raise ValueError(f"unknown template {tag!r}")


def _apply_sync(name, m1, m2, dom, ctx, rng, acc) -> bool:
    if name == "SetMove":
        if not m1.members:
            return False
        if dom.min_card() and len(m1.members) <= dom.min_card():
            return False
        hi = dom.max_card()
        if hi is not None and len(m2.members) >= hi:
            return False
        idx = rng.randrange(len(m1.members))
        if m2.contains_hash(m1.members[idx].h):
            return False
        obj = _set_remove_at(ctx, m1, idx)
        ctx.apply(("append", m2, obj))
        return True
    if name == "SetCrossover":
        if not m1.members or not m2.members:
            return False
        i = rng.randrange(len(m1.members))
        j = rng.randrange(len(m2.members))
        h1, h2 = m1.members[i].h, m2.members[j].h
        if h1 == h2 or m2.contains_hash(h1) or m1.contains_hash(h2):
            return False
        x1 = _set_remove_at(ctx, m1, i)
        x2 = _set_remove_at(ctx, m2, j)
        ctx.apply(("append", m1, x2))
        ctx.apply(("append", m2, x1))
        return True
    if name == "SequenceMove":
        if not m1.members:
            return False
        if dom.min_card() and len(m1.members) <= dom.min_card():
            return False
        hi = dom.max_card()
        if hi is not None and len(m2.members) >= hi:
            return False
        i = rng.randrange(len(m1.members))
        pos = rng.randint(0, len(m2.members))
        obj = m1.members[i]
        ctx.apply(("seq_remove", m1, i))
        ctx.apply(("seq_insert", m2, pos, obj))
        return True
    if name == "SequenceCrossover":
        n = min(len(m1.members), len(m2.members))
        if n == 0:
            return False
        i = rng.randrange(n)
        a, b = m1.members[i], m2.members[i]
        if isinstance(a, VInt) and isinstance(b, VInt):
            if a.val == b.val:
                return False
            va, vb = a.val, b.val
            ctx.apply(("assign", a, vb))
            ctx.apply(("assign", b, va))
            return True
        ctx.apply(("seq_remove", m1, i))
        ctx.apply(("seq_remove", m2, i))
        ctx.apply(("seq_insert", m1, i, b))
        ctx.apply(("seq_insert", m2, i, a))
        return True
    if name == "FunctionCrossover":
        n = min(len(m1.images), len(m2.images))
        if n == 0:
            return False
        if m1.direct and m2.direct:
            i = rng.randrange(n)
            j = i  # identical enumeration order for a shared preimage domain
        else:
            i = rng.randrange(len(m1.images))
            j = m2.index_of_pre_hash(m1.pre_hashes[i]) if not m2.direct else None
            if j is None:
                return False
        a, b = m1.images[i], m2.images[j]
        if not (isinstance(a, VInt) and isinstance(b, VInt)) or a.val == b.val:
            return False
        va, vb = a.val, b.val
        ctx.apply(("assign", a, vb))
        ctx.apply(("assign", b, va))
        return True
    raise ValueError(f"unknown synchronised template {name!r}")


def _two_of(items, rng):
    i = rng.randrange(len(items))
    j = rng.randrange(len(items) - 1)
    if j >= i:
        j += 1
    return items[i], items[j]


def _two_images(f, rng, want_equal, action) -> bool:
    n = len(f.images)
    if n < 2:
        return False
    i = rng.randrange(n)
    j = rng.randrange(n - 1)
    if j >= i:
        j += 1
    equal = f.images[i].h == f.images[j].h
    if equal != want_equal:
        return False
    return action(i, j)


def _copy_image(ctx, f, i, j) -> bool:
    a, b = f.images[i], f.images[j]
    if not (isinstance(a, VInt) and isinstance(b, VInt)):
        return False
    ctx.apply(("assign", a, b.val))
    return True


def _swap_images(ctx, f, i, j) -> bool:
    a, b = f.images[i], f.images[j]
    if not (isinstance(a, VInt) and isinstance(b, VInt)):
        return False
    va, vb = a.val, b.val
    ctx.apply(("assign", a, vb))
    ctx.apply(("assign", b, va))
    return True


def _swap_along_axis(dom, f, ctx, rng) -> bool:
    if not f.direct:
        return False
    pre = dom.inner[0]
    i = rng.randrange(len(f.images))
    coords = list(f.pre_canons[i][1])
    c = rng.randrange(len(coords))
    coord_dom = pre.inner[c]
    n = coord_dom.value_count()
    if n < 2:
        return False
    from ..values import enumerate_domain
    alternatives = [v for v in enumerate_domain(coord_dom) if v != coords[c]]
    coords[c] = alternatives[rng.randrange(len(alternatives))]
    from ..canon import make_tuple
    j = pre_index(pre, make_tuple(coords))
    if j is None or j == i:
        return False
    return _swap_images(ctx, f, i, j)
