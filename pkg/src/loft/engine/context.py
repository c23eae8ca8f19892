"""The evaluation context: one mutable search state.

Owns the current assignment (one runtime value per decision variable),
the constraint and objective trees, the propagation queue, one-way
links, and the transaction log used to revert moves exactly.  Strictly
single-threaded; independent contexts may run in parallel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..values import VInt, VSeq, ValueChanged, apply_edit, from_canon, to_canon
from .nodes import INT_LIMIT, VIOL_UNDEF, Node


class OverflowAbort(RuntimeError):
    """Raised when violation or objective totals leave 64-bit range."""


@dataclass
class OneWayLink:
    source: Node          # expression whose value is copied
    apply_node: Node      # f(x) / s(i) locating the target element
    eq_node: Node
    guard: Node | None
    domain: object        # the target element's integer domain
    alive: bool = True
    fired_count: int = 0


@dataclass
class Transaction:
    log: list = field(default_factory=list)   # inverse edits, application order
    consumed: int = 0
    reverted: bool = False
    version_before: int = 0
    touched: set = field(default_factory=set)  # ids of mutated variable roots


class EvalContext:
    def __init__(self, model):
        self.model = model
        self.find_domains = dict(model.finds)
        self.vars = {}
        self.root = None
        self.obj_root = None
        self.maximise = model.objective is not None and model.objective[0] == "maximise"
        self.links = []
        self.fired = set()
        self.pending_fires = deque()
        self.tx = None
        self.oneway_enabled = True
        self.version = 0
        self._vmap = None
        self._vmap_version = -1

    # -- assignment ----------------------------------------------------------

    def reset(self, assignment: dict) -> None:
        """Install a full assignment (canonical values) and rebuild trees."""
        from .build import build_trees
        if self.root is not None:
            self.root.detach()
            if self.obj_root is not None:
                self.obj_root.detach()
        self.links = []
        self.vars = {
            name: from_canon(dom, assignment[name]) for name, dom in self.model.finds
        }
        self.root_names = {id(v): name for name, v in self.vars.items()}
        self.root, self.obj_root = build_trees(self.model, self)
        self.root.init_full(self)
        if self.obj_root is not None:
            self.obj_root.init_full(self)
        self.version += 1

    def snapshot(self) -> dict:
        return {name: to_canon(v) for name, v in self.vars.items()}

    def raw_snapshot(self) -> dict:
        """Unsorted structural copy; canonicalise with ``canonize_raw``."""
        from .snapshots import raw_copy
        return {name: raw_copy(v) for name, v in self.vars.items()}

    # -- readings -------------------------------------------------------------

    def total_violation(self) -> int:
        v = self.root.violation
        if v >= INT_LIMIT:
            raise OverflowAbort(f"violation total {v} exceeds 64-bit range")
        return v

    def objective_internal(self) -> int:
        if self.obj_root is None:
            return 0
        if not self.obj_root.defined:
            return INT_LIMIT - 1  # undefined objective ranks worst
        v = self.obj_root.value
        if abs(v) >= INT_LIMIT:
            raise OverflowAbort(f"objective {v} exceeds 64-bit range")
        return v

    def objective_user(self) -> int:
        v = self.objective_internal()
        return -v if self.maximise else v

    def state(self) -> tuple:
        return (self.total_violation(), self.objective_internal())

    # -- edits and propagation ---------------------------------------------

    def begin(self) -> Transaction:
        assert self.tx is None, "nested transactions"
        self.tx = Transaction(version_before=self.version)
        self.fired = set()
        return self.tx

    def end(self) -> Transaction:
        tx, self.tx = self.tx, None
        return tx

    def apply(self, edit) -> None:
        if self.tx is not None:
            self.tx.touched.add(id(self._root_of(edit[1])))
        inverse, events = apply_edit(edit)
        if self.tx is not None:
            self.tx.log.append(inverse)
        self.version += 1
        self._propagate(events)

    @staticmethod
    def _root_of(value):
        while value.owner is not None:
            value = value.owner
        return value

    def revert(self, tx: Transaction) -> None:
        assert not tx.reverted, "transaction reverted twice"
        tx.reverted = True
        assert self.tx is None
        self.oneway_enabled = False
        try:
            for inverse in reversed(tx.log):
                _, events = apply_edit(inverse)
                self.version += 1
                self._propagate(events)
        finally:
            self.oneway_enabled = True
        # the state is bit-identical to the pre-transaction one, so cached
        # derivations keyed by version are valid again
        self.version = tx.version_before

    def _propagate(self, events) -> None:
        q = deque(events)
        while q:
            value, ev = q.popleft()
            for node in list(value.subscribers.values()):
                self._bubble(node, ev)
            while self.pending_fires:
                link = self.pending_fires.popleft()
                edit = self._resolve_fire(link)
                if edit is None:
                    continue
                link.fired_count += 1
                if self.tx is not None:
                    self.tx.touched.add(id(self._root_of(edit[1])))
                inverse, evs = apply_edit(edit)
                if self.tx is not None:
                    self.tx.log.append(inverse)
                q.extend(evs)

    def _bubble(self, leaf, ev) -> None:
        cur = leaf
        out = cur.on_value_event(ev)
        while out is not None:
            if cur.links and self.oneway_enabled:
                self.pending_fires.extend(l for l in cur.links if l.alive)
            parent = cur.parent
            if parent is None:
                break
            out = parent.child_event(cur.slot, out)
            cur = parent

    def _resolve_fire(self, link: OneWayLink):
        if not link.alive:
            return None
        if link.guard is not None and not (link.guard.defined and link.guard.value is True):
            return None
        src = link.source
        if not src.defined:
            return None
        ap = link.apply_node
        if not ap.defined or ap.member_index is None:
            return None
        fn_value = ap.children[0].value
        if isinstance(fn_value, VSeq):
            target = fn_value.members[ap.member_index]
        else:
            target = fn_value.images[ap.member_index]
        if not isinstance(target, VInt):
            return None
        v = src.value
        if not link.domain.int_contains(v):
            return None  # the source left the target's domain: skip this pass
        if id(target) in self.fired:
            return None  # cycle guard: one update per element per pass
        if target.val == v:
            return None
        self.fired.add(id(target))
        return ("assign", target, v)

    # -- violation map ---------------------------------------------------------

    def violation_map(self):
        from .violations import distribute_violations
        if self._vmap_version != self.version:
            self._vmap = distribute_violations(self)
            self._vmap_version = self.version
        return self._vmap

    # -- verification hooks ------------------------------------------------------

    def verify_caches(self) -> None:
        self.root.verify_caches()
        if self.obj_root is not None:
            self.obj_root.verify_caches()

    def dump_tree(self) -> list:
        out = []

        def visit(node, depth):
            entry = {
                "id": id(node),
                "op": type(node).__name__,
                "depth": depth,
                "defined": node.defined,
            }
            v = node.value
            entry["value"] = repr(to_canon(v)) if hasattr(v, "subscribers") else repr(v)
            if node.is_bool:
                entry["violation"] = node.violation
            out.append(entry)
            kids = list(node.children)
            if hasattr(node, "source"):
                kids.append(node.source)
            for c in kids:
                visit(c, depth + 1)

        visit(self.root, 0)
        if self.obj_root is not None:
            visit(self.obj_root, 0)
        return out
