"""Neighbourhood template catalogue and structure synthesis.

Four template families exist: atomic templates on primitive values,
direct templates on the outermost constructor of a compound type,
higher-order templates (LiftSingle / LiftMultiple) that apply another
template to container members, and synchronised templates that edit two
members at once and therefore only occur under LiftMultiple.

Structures are synthesised per variable by walking its type from the
outside in, filtered by domain attributes: templates that alter the
cardinality of a fixed-size container are dropped, injective sequences
keep only injectivity-preserving templates, total functions get no
mapping addition/removal, regular partitions keep only part-size
preserving moves, and partitions are never lifted into.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..domains import Domain

ATOMIC = {
    "bool": ("boolReassign",),
    "enum": ("enumAssignRandom",),
    "int": ("intAssignRandom", "intAssignRandomFromViolation"),
}

DIRECT = {
    "set": ("Remove", "Add"),
    "mset": ("Remove", "Add"),
    "sequence": ("Remove", "Add", "ReverseSub", "PositionsSwap", "ReassignSub"),
    "function": ("Remove", "Add", "UnifyImages", "SplitImages", "Swap", "SwapAlongAxis"),
    "partition": ("MoveParts", "SwapParts", "MergeParts", "SplitPart"),
}

HIGHER_ORDER = ("LiftSingle", "LiftMultiple")

SYNCHRONISED = {
    "set": ("Move", "Crossover"),
    "sequence": ("Move", "Crossover"),
    "function": ("Crossover",),
}

PREFIX = {"set": "Set", "mset": "MSet", "sequence": "Sequence",
          "function": "Function", "partition": "Partition"}

# sequence templates that can never violate injectivity
INJECTIVITY_PRESERVING = {"Remove", "ReverseSub", "PositionsSwap"}
# partition templates that keep every part size unchanged
SIZE_PRESERVING_PART = {"SwapParts"}


@dataclass(frozen=True)
class NeighbourhoodStructure:
    var: str
    name: str
    chain: tuple  # nested template chain with the relevant domains


def instantiate_structures(model) -> list:
    """All neighbourhood structures for the model's decision variables."""
    out = []
    for name, dom in model.finds:
        for chain in chains_for(dom):
            out.append(NeighbourhoodStructure(name, chain_name(chain), chain))
    return out


def chains_for(dom: Domain) -> list:
    k = dom.kind
    if k in ATOMIC:
        return [(t, dom) for t in ATOMIC[k]]
    out = []
    if k in DIRECT:
        for t in DIRECT[k]:
            if _direct_applicable(t, dom):
                out.append((f"{PREFIX[k]}{t}", dom))
    if k in ("set", "mset", "sequence"):
        if not (k == "sequence" and dom.attr("injective")):
            inner = dom.inner[0]
            for chain in chains_for(inner):
                out.append(("LiftSingle", dom, chain))
            for t in SYNCHRONISED.get(inner.kind, ()):
                if _sync_applicable(t, inner):
                    out.append(("LiftMultiple", dom, f"{PREFIX[inner.kind]}{t}", inner))
    elif k == "function":
        for chain in chains_for(dom.inner[1]):
            out.append(("FunctionRangeLiftSingle", dom, chain))
        if not dom.attr("total"):
            for chain in chains_for(dom.inner[0]):
                out.append(("FunctionDefinedLiftSingle", dom, chain))
    # partitions and tuples are not lifted into
    return out


def _fixed_size(dom: Domain) -> bool:
    if dom.attr("size") is not None:
        return True
    lo, hi = dom.attr("minSize"), dom.attr("maxSize")
    return lo is not None and lo == hi


def _direct_applicable(t: str, dom: Domain) -> bool:
    k = dom.kind
    if k in ("set", "mset"):
        if t in ("Add", "Remove"):
            return not _fixed_size(dom)
        return True
    if k == "sequence":
        if dom.attr("injective") and t not in INJECTIVITY_PRESERVING:
            return False
        if t in ("Add", "Remove"):
            return not _fixed_size(dom)
        return True
    if k == "function":
        if t in ("Add", "Remove"):
            return not dom.attr("total") and not _fixed_size(dom)
        if t in ("UnifyImages", "SplitImages") and dom.attr("injective"):
            return False
        if t == "SwapAlongAxis":
            pre = dom.inner[0]
            return pre.kind == "tuple" and all(
                m.kind in ("int", "enum", "bool") for m in pre.inner)
        return True
    if k == "partition":
        if dom.attr("regular"):
            return t in SIZE_PRESERVING_PART
        if t in ("MergeParts", "SplitPart"):
            lo, hi = dom.part_count_bounds()
            if lo == hi:
                return False
        if t == "MoveParts":
            plo, phi = dom.part_size_bounds()
            if plo == phi:
                return False
        return True
    raise ValueError(k)


def _sync_applicable(t: str, inner: Domain) -> bool:
    if inner.kind in ("set", "mset"):
        if t == "Move":
            return not _fixed_size(inner)
        return True
    if inner.kind == "sequence":
        if inner.attr("injective"):
            return False
        if t == "Move":
            return not _fixed_size(inner)
        return True
    if inner.kind == "function":
        return True
    return False


def chain_name(chain: tuple) -> str:
    tag = chain[0]
    if tag == "LiftSingle":
        return f"{PREFIX[chain[1].kind]}LiftSingle_{chain_name(chain[2])}"
    if tag == "LiftMultiple":
        return f"{PREFIX[chain[1].kind]}LiftMultiple_{chain[2]}"
    if tag in ("FunctionRangeLiftSingle", "FunctionDefinedLiftSingle"):
        return f"{tag}_{chain_name(chain[2])}"
    return tag
