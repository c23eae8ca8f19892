"""Ground domain descriptors.

A :class:`Domain` is the fully instantiated shape of a variable: all
attribute values are concrete integers and all nested domains are ground.
Domains drive value generation, neighbourhood synthesis, and structural
conformance checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Saturation bound for value-space cardinalities.  Anything at or above
# this is reported as "huge" rather than computed exactly.
HUGE = 10 ** 30

SIZE_ATTRS = ("size", "minSize", "maxSize")
PART_ATTRS = (
    "numParts", "minNumParts", "maxNumParts",
    "partSize", "minPartSize", "maxPartSize",
)
FLAG_ATTRS = ("injective", "total", "regular")
ALL_ATTRS = SIZE_ATTRS + PART_ATTRS + FLAG_ATTRS


class DomainError(ValueError):
    pass


def sat_mul(a: int, b: int) -> int:
    if a >= HUGE or b >= HUGE:
        return HUGE
    return min(a * b, HUGE)


def sat_add(a: int, b: int) -> int:
    return min(a + b, HUGE)


def sat_pow(a: int, b: int) -> int:
    if a >= 2 and b >= 100:
        return HUGE
    if a >= HUGE:
        return HUGE
    return min(a ** b, HUGE)


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
        if out >= HUGE:
            return HUGE
    return out


@dataclass(frozen=True)
class Domain:
    kind: str  # bool,int,enum,tuple,set,mset,sequence,function,partition
    ranges: tuple = ()          # int: ((lo, hi), ...)
    enum_name: str = ""
    enum_values: tuple = ()
    inner: tuple = ()           # compound kinds; function is (pre, img)
    attrs: tuple = ()           # sorted ((name, value), ...)

    def attr(self, name, default=None):
        for k, v in self.attrs:
            if k == name:
                return v
        return default

    # -- cardinality bounds of container values ------------------------

    def min_card(self) -> int:
        size = self.attr("size")
        if size is not None:
            return size
        if self.kind == "function":
            if self.attr("total"):
                return self.inner[0].value_count()
            return self.attr("minSize", 0)
        if self.kind == "partition":
            return self.inner[0].value_count()
        return self.attr("minSize", 0)

    def max_card(self) -> int:
        size = self.attr("size")
        if size is not None:
            return size
        m = self.attr("maxSize")
        if self.kind == "set" or (self.kind == "sequence" and self.attr("injective")):
            base = self.inner[0].value_count()
            return base if m is None else min(m, base)
        if self.kind == "function":
            if self.attr("total"):
                return self.inner[0].value_count()
            base = self.inner[0].value_count()
            return base if m is None else min(m, base)
        if self.kind == "partition":
            return self.inner[0].value_count()
        return m  # None means unbounded (mset / sequence without a bound)

    def part_count_bounds(self) -> tuple:
        n = self.attr("numParts")
        if n is not None:
            return n, n
        lo = self.attr("minNumParts", 1)
        hi = self.attr("maxNumParts", self.inner[0].value_count())
        return lo, hi

    def part_size_bounds(self) -> tuple:
        s = self.attr("partSize")
        if s is not None:
            return s, s
        lo = self.attr("minPartSize", 1)
        hi = self.attr("maxPartSize", self.inner[0].value_count())
        return lo, hi

    # -- value space ----------------------------------------------------

    def int_count(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def int_contains(self, v: int) -> bool:
        return any(lo <= v <= hi for lo, hi in self.ranges)

    def int_at(self, idx: int) -> int:
        """The idx-th member of the integer domain, in ascending order."""
        for lo, hi in self.ranges:
            n = hi - lo + 1
            if idx < n:
                return lo + idx
            idx -= n
        raise IndexError(idx)

    def value_count(self) -> int:
        """Saturating count of distinct values in this domain."""
        if self.kind == "bool":
            return 2
        if self.kind == "int":
            return min(self.int_count(), HUGE)
        if self.kind == "enum":
            return len(self.enum_values)
        if self.kind == "tuple":
            out = 1
            for d in self.inner:
                out = sat_mul(out, d.value_count())
            return out
        if self.kind in ("set", "mset", "sequence"):
            base = self.inner[0].value_count()
            lo, hi = self.min_card(), self.max_card()
            if hi is None:
                raise DomainError(f"{self.kind} domain has no cardinality bound")
            total = 0
            if hi - lo > 10000 or base >= HUGE:
                return HUGE
            for n in range(lo, hi + 1):
                if self.kind == "set":
                    total = sat_add(total, _binom(base, n))
                elif self.kind == "mset":
                    total = sat_add(total, _binom(base + n - 1, n))
                else:
                    total = sat_add(total, sat_pow(base, n))
                if total >= HUGE:
                    return HUGE
            return total
        if self.kind == "function":
            pre = self.inner[0].value_count()
            img = self.inner[1].value_count()
            if self.attr("total"):
                return sat_pow(img, pre)
            return sat_pow(img + 1, pre)  # upper-ish bound; each point mapped or not
        if self.kind == "partition":
            n = self.inner[0].value_count()
            if n > 25:
                return HUGE
            # Bell-number style bound via n^n, adequate as a finiteness witness.
            return sat_pow(n, n)
        raise DomainError(f"unknown kind {self.kind}")

    def is_finite(self) -> bool:
        try:
            self.value_count()
            return True
        except DomainError:
            return False

    # -- structural conformance (hash-free) -----------------------------

    def conforms(self, c) -> str | None:
        """Check a canonical value against this domain.

        Returns None when the value conforms, otherwise a human-readable
        description of the first violated requirement.  Comparison is
        purely structural.
        """
        k = self.kind
        if k == "bool":
            return None if isinstance(c, bool) else "expected bool"
        if k in ("int", "enum"):
            if isinstance(c, bool) or not isinstance(c, int):
                return f"expected {k}"
            if k == "enum":
                if not 0 <= c < len(self.enum_values):
                    return f"enum value {c} outside {self.enum_name}"
                return None
            if not self.int_contains(c):
                return f"integer {c} outside domain"
            return None
        if not isinstance(c, tuple) or isinstance(c, bool):
            return f"expected {k} value"
        tag, body = c
        if k == "tuple":
            if tag != "tuple" or len(body) != len(self.inner):
                return "tuple arity mismatch"
            for m, d in zip(body, self.inner):
                err = d.conforms(m)
                if err:
                    return err
            return None
        if k in ("set", "mset", "sequence"):
            want = {"set": "set", "mset": "mset", "sequence": "seq"}[k]
            if tag != want:
                return f"expected {k} value"
            err = self._check_card(len(body))
            if err:
                return err
            if k == "set" and _has_duplicates(body):
                return "set has duplicate members"
            if k == "sequence" and self.attr("injective") and _has_duplicates(body):
                return "injective sequence has duplicate members"
            elem = self.inner[0]
            for m in body:
                err = elem.conforms(m)
                if err:
                    return err
            return None
        if k == "function":
            if tag != "func":
                return "expected function value"
            pre_d, img_d = self.inner
            pres = [p for p, _ in body]
            if _has_duplicates(pres):
                return "function maps a preimage twice"
            if self.attr("total"):
                if len(body) != pre_d.value_count():
                    return "total function does not cover its preimage domain"
            else:
                err = self._check_card(len(body))
                if err:
                    return err
            if self.attr("injective") and _has_duplicates([i for _, i in body]):
                return "injective function repeats an image"
            for p, i in body:
                err = pre_d.conforms(p)
                if err:
                    return err
                err = img_d.conforms(i)
                if err:
                    return err
            return None
        if k == "partition":
            if tag != "part":
                return "expected partition value"
            base = self.inner[0]
            members = [m for part in body for m in part]
            if _has_duplicates(members):
                return "partition repeats an element"
            if len(members) != base.value_count():
                return "partition does not cover its base domain"
            for part in body:
                if not part:
                    return "partition has an empty part"
                for m in part:
                    err = base.conforms(m)
                    if err:
                        return err
            lo, hi = self.part_count_bounds()
            if not lo <= len(body) <= hi:
                return f"partition has {len(body)} parts outside [{lo}, {hi}] (numParts)"
            plo, phi = self.part_size_bounds()
            for part in body:
                if not plo <= len(part) <= phi:
                    return f"part of size {len(part)} outside [{plo}, {phi}] (partSize)"
            if self.attr("regular") and len({len(part) for part in body}) > 1:
                return "regular partition has parts of unequal size"
            return None
        raise DomainError(f"unknown kind {k}")

    def _check_card(self, n: int) -> str | None:
        size = self.attr("size")
        if size is not None and n != size:
            return f"cardinality {n} != size {size}"
        lo = self.attr("minSize")
        if lo is not None and n < lo:
            return f"cardinality {n} < minSize {lo}"
        hi = self.attr("maxSize")
        if hi is not None and n > hi:
            return f"cardinality {n} > maxSize {hi}"
        return None

    def validate_attrs(self) -> None:
        """Reject inconsistent attribute combinations."""
        size = self.attr("size")
        lo, hi = self.attr("minSize"), self.attr("maxSize")
        if size is not None and (lo is not None or hi is not None):
            raise DomainError("size excludes minSize/maxSize")
        if lo is not None and hi is not None and lo > hi:
            raise DomainError(f"minSize {lo} > maxSize {hi}")
        for name, v in self.attrs:
            if name not in ALL_ATTRS:
                raise DomainError(f"unknown attribute {name}")
            if name not in FLAG_ATTRS and v < 0:
                raise DomainError(f"attribute {name} must be a natural number")
        for d in self.inner:
            d.validate_attrs()


def _has_duplicates(items) -> bool:
    from .canon import sort_key

    ordered = sorted(items, key=sort_key)
    return any(a == b for a, b in zip(ordered, ordered[1:]))


def dint(*ranges) -> Domain:
    return Domain("int", ranges=tuple(ranges))


def dbool() -> Domain:
    return Domain("bool")


def denum(name: str, values) -> Domain:
    return Domain("enum", enum_name=name, enum_values=tuple(values))


def dset(inner: Domain, **attrs) -> Domain:
    return Domain("set", inner=(inner,), attrs=tuple(sorted(attrs.items())))


def dmset(inner: Domain, **attrs) -> Domain:
    return Domain("mset", inner=(inner,), attrs=tuple(sorted(attrs.items())))


def dseq(inner: Domain, **attrs) -> Domain:
    return Domain("sequence", inner=(inner,), attrs=tuple(sorted(attrs.items())))


def dtuple(*inner: Domain) -> Domain:
    return Domain("tuple", inner=tuple(inner))


def dfunc(pre: Domain, img: Domain, **attrs) -> Domain:
    return Domain("function", inner=(pre, img), attrs=tuple(sorted(attrs.items())))


def dpart(base: Domain, **attrs) -> Domain:
    return Domain("partition", inner=(base,), attrs=tuple(sorted(attrs.items())))
