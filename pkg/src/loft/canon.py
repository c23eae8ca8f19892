"""Canonical immutable value forms.

Every runtime value has a canonical form built from plain Python data:

    bool                     -> bool
    int / enum member        -> int
    tuple                    -> ("tuple", (members...))
    set                      -> ("set", (members sorted...))
    multiset                 -> ("mset", (members sorted...))
    sequence                 -> ("seq", (members in order...))
    function                 -> ("func", ((pre, img) sorted by pre...))
    partition                -> ("part", (parts sorted, each a sorted tuple))

Canonical forms compare structurally with ``==`` (no 64-bit hashes are
involved), which makes them the safe representation for solution
snapshots, verification, and parameter values.  Unordered containers
are stored sorted by a deterministic key so that printing and
materialisation are reproducible.
"""

from __future__ import annotations

from .hashing import MASK64, combine_ordered, int_hash, mix, pair_hash

Canon = object  # documentation alias; canonical values are plain data


def sort_key(c):
    """Deterministic total order key for canonical values of one type."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    tag, body = c
    return tuple(sort_key(m) for m in body)


def make_set(members) -> tuple:
    return ("set", tuple(sorted(members, key=sort_key)))


def make_mset(members) -> tuple:
    return ("mset", tuple(sorted(members, key=sort_key)))


def make_seq(members) -> tuple:
    return ("seq", tuple(members))


def make_tuple(members) -> tuple:
    return ("tuple", tuple(members))


def make_func(pairs) -> tuple:
    return ("func", tuple(sorted(pairs, key=lambda p: sort_key(p[0]))))


def make_part(parts) -> tuple:
    inner = [tuple(sorted(p, key=sort_key)) for p in parts]
    return ("part", tuple(sorted(inner, key=lambda p: tuple(sort_key(m) for m in p))))


def kind_of(c) -> str:
    if isinstance(c, bool):
        return "bool"
    if isinstance(c, int):
        return "int"
    return c[0]


def hash_canon(c) -> int:
    """From-scratch 64-bit hash of a canonical value."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return int_hash(c)
    tag, body = c
    if tag == "tuple":
        return combine_ordered(tuple(hash_canon(m) for m in body))
    if tag in ("set", "mset"):
        total = 0
        for m in body:
            total += mix(hash_canon(m))
        return total & MASK64
    if tag == "seq":
        total = 0
        for i, m in enumerate(body):
            total += mix(pair_hash(i, hash_canon(m)))
        return total & MASK64
    if tag == "func":
        total = 0
        for pre, img in body:
            total += mix(combine_ordered((hash_canon(pre), hash_canon(img))))
        return total & MASK64
    if tag == "part":
        total = 0
        for part in body:
            hp = 0
            for m in part:
                hp += mix(hash_canon(m))
            total += mix(hp & MASK64)
        return total & MASK64
    raise ValueError(f"unknown canonical tag {tag!r}")


def canon_to_literal(c, domain=None) -> str:
    """Render a canonical value in the surface literal syntax.

    When ``domain`` is given, enum members print as quoted names instead
    of their internal integer codes.
    """
    if isinstance(c, bool):
        return "true" if c else "false"
    if isinstance(c, int):
        if domain is not None and domain.kind == "enum":
            return f'"{domain.enum_values[c]}"'
        return str(c)
    tag, body = c

    def inner(i):
        return domain.inner[i] if domain is not None else None

    if tag == "tuple":
        doms = domain.inner if domain is not None else [None] * len(body)
        return "(" + ", ".join(canon_to_literal(m, d) for m, d in zip(body, doms)) + ")"
    if tag == "set":
        return "{" + ", ".join(canon_to_literal(m, inner(0)) for m in body) + "}"
    if tag == "mset":
        return "mset(" + ", ".join(canon_to_literal(m, inner(0)) for m in body) + ")"
    if tag == "seq":
        return "sequence(" + ", ".join(canon_to_literal(m, inner(0)) for m in body) + ")"
    if tag == "func":
        pre_d = inner(0)
        img_d = inner(1) if domain is not None else None
        entries = ", ".join(
            f"{canon_to_literal(p, pre_d)} --> {canon_to_literal(i, img_d)}" for p, i in body
        )
        return f"function({entries})"
    if tag == "part":
        base = inner(0)
        parts = ", ".join(
            "{" + ", ".join(canon_to_literal(m, base) for m in part) + "}" for part in body
        )
        return f"partition({parts})"
    raise ValueError(f"unknown canonical tag {tag!r}")
