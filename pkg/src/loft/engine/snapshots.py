"""Cheap structural copies of runtime values.

``raw_copy`` mirrors a value without sorting (container members stay in
storage order); ``canonize_raw`` re-sorts a raw copy into canonical
form.  Incumbent snapshots on the search's hot path use the raw form
and canonicalise once when the run ends.
"""

from __future__ import annotations

from ..canon import make_func, make_mset, make_part, make_seq, make_set, make_tuple
from ..values import VBool, VFunc, VInt, VPart, VSeq, VSet, VMSet, VTuple


def raw_copy(v):
    if isinstance(v, (VBool, VInt)):
        return v.val
    if isinstance(v, VTuple):
        return ("tuple", tuple(raw_copy(m) for m in v.members))
    if isinstance(v, VMSet):
        return ("mset", tuple(raw_copy(m) for m in v.members))
    if isinstance(v, VSet):
        return ("set", tuple(raw_copy(m) for m in v.members))
    if isinstance(v, VSeq):
        return ("seq", tuple(raw_copy(m) for m in v.members))
    if isinstance(v, VFunc):
        if v.direct:
            pairs = tuple((pc, raw_copy(img)) for pc, img in zip(v.pre_canons, v.images))
        else:
            pairs = tuple((raw_copy(p), raw_copy(i))
                          for p, i in zip(v.defined, v.images))
        return ("func", pairs)
    if isinstance(v, VPart):
        return ("part", tuple(
            tuple(raw_copy(v.members[i]) for i in v.by_label[lab]) for lab in v.hp))
    raise TypeError(type(v))


def canonize_raw(c):
    if isinstance(c, (bool, int)):
        return c
    tag, body = c
    if tag == "tuple":
        return make_tuple(canonize_raw(m) for m in body)
    if tag == "set":
        return make_set(canonize_raw(m) for m in body)
    if tag == "mset":
        return make_mset(canonize_raw(m) for m in body)
    if tag == "seq":
        return make_seq(canonize_raw(m) for m in body)
    if tag == "func":
        return make_func((canonize_raw(p), canonize_raw(i)) for p, i in body)
    if tag == "part":
        return make_part([canonize_raw(m) for m in part] for part in body)
    raise ValueError(tag)
