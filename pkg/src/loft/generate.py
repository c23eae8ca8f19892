"""Resource-limited random value generation.

Random values are deliberately biased towards low cardinality: the
generator is handed an integer resource budget which every part of a
nested value draws down, and a container stops growing (or fails) when
the budget runs out.  Atoms cost 1; sets, multisets and sequences cost
1 to initialise; tuples, functions and partitions carry no container
cost.  The cost of a compound value includes every generation attempt,
successful or not.
"""

from __future__ import annotations

from .canon import hash_canon, make_func, make_mset, make_part, make_seq, make_set, make_tuple
from .domains import Domain
from .values import enumerate_domain, is_directly_indexable

R_MUL = 1.1
R_MIN = 500


class _Fail:
    def __repr__(self):
        return "FAIL"


FAIL = _Fail()


def calc_min_resource(d: Domain) -> int:
    """Minimum resource needed to build any value of ``d``."""
    k = d.kind
    if k in ("bool", "int", "enum"):
        return 1
    if k in ("set", "mset", "sequence"):
        return 1 + d.min_card() * calc_min_resource(d.inner[0])
    if k == "tuple":
        return sum(calc_min_resource(m) for m in d.inner)
    if k == "function":
        pre, img = d.inner
        if d.attr("total"):
            return pre.value_count() * calc_min_resource(img)
        return d.attr("minSize", 0) * (calc_min_resource(pre) + calc_min_resource(img))
    if k == "partition":
        return d.inner[0].value_count() * calc_min_resource(d.inner[0])
    raise ValueError(f"unknown kind {k}")


def generate_random(d: Domain, r_in, rng):
    """Attempt to generate a random canonical value of ``d``.

    Returns ``(value, consumed)`` on success or ``(FAIL, consumed)``
    when the resource budget is insufficient.  Failure is a normal
    return, not an exception.
    """
    if r_in <= 0:
        return FAIL, 0
    k = d.kind
    if k == "bool":
        return rng.random() < 0.5, 1
    if k == "int":
        return d.int_at(rng.randrange(d.int_count())), 1
    if k == "enum":
        return rng.randrange(len(d.enum_values)), 1
    if k in ("set", "mset", "sequence"):
        return _gen_container(d, r_in, rng)
    if k == "tuple":
        return _gen_fixed(d.inner, r_in, rng, make_tuple)
    if k == "function":
        return _gen_function(d, r_in, rng)
    if k == "partition":
        return _gen_partition(d, r_in, rng)
    raise ValueError(f"unknown kind {k}")


def _gen_container(d: Domain, r_in, rng):
    inner = d.inner[0]
    distinct = d.kind == "set" or (d.kind == "sequence" and d.attr("injective"))
    inner_min = calc_min_resource(inner)
    members = []
    seen = {}
    r = 1
    n_min = d.min_card()
    n_max = d.max_card()
    if n_max is None:
        raise ValueError(f"{d.kind} domain has no cardinality bound")
    n = rng.randint(n_min, n_max)
    while len(members) < n:
        r_res = max(0, n_min - len(members) - 1) * inner_min
        e, r_e = generate_random(inner, r_in - r_res - r, rng)
        r += r_e
        if e is FAIL:
            if len(members) < n_min:
                return FAIL, r
            break
        if distinct:
            h = hash_canon(e)
            if h in seen:
                continue  # duplicate attempt: resource spent, nothing added
            seen[h] = True
        members.append(e)
    if d.kind == "set":
        return make_set(members), r
    if d.kind == "mset":
        return make_mset(members), r
    return make_seq(members), r


def _gen_fixed(inners, r_in, rng, build):
    """Fixed-shape generation (tuples): mandatory members, no container cost."""
    remaining = [calc_min_resource(m) for m in inners]
    members = []
    r = 0
    for i, md in enumerate(inners):
        r_res = sum(remaining[i + 1:])
        e, r_e = generate_random(md, r_in - r_res - r, rng)
        r += r_e
        if e is FAIL:
            return FAIL, r
        members.append(e)
    return build(members), r


def _gen_function(d: Domain, r_in, rng):
    pre_d, img_d = d.inner
    img_min = calc_min_resource(img_d)
    if d.attr("total") and is_directly_indexable(pre_d):
        pres = enumerate_domain(pre_d)
        m = len(pres)
        images = []
        r = 0
        for i in range(m):
            r_res = (m - i - 1) * img_min
            e, r_e = generate_random(img_d, r_in - r_res - r, rng)
            r += r_e
            if e is FAIL:
                return FAIL, r
            images.append(e)
        if d.attr("injective") and len({hash_canon(x) for x in images}) != m:
            return FAIL, r  # rare; retry with a larger budget
        return make_func(zip(pres, images)), r
    # general case: a set of (preimage, image) pairs
    pair_min = calc_min_resource(pre_d) + img_min
    n_min = pre_d.value_count() if d.attr("total") else d.attr("minSize", 0)
    n_max = pre_d.value_count() if d.attr("total") else d.max_card()
    n = rng.randint(n_min, n_max)
    pairs = []
    seen = {}
    r = 0
    while len(pairs) < n:
        r_res = max(0, n_min - len(pairs) - 1) * pair_min
        p, r_p = generate_random(pre_d, r_in - r_res - r, rng)
        r += r_p
        if p is FAIL:
            if len(pairs) < n_min:
                return FAIL, r
            break
        if hash_canon(p) in seen:
            continue
        i, r_i = generate_random(img_d, r_in - r_res - r, rng)
        r += r_i
        if i is FAIL:
            if len(pairs) < n_min:
                return FAIL, r
            break
        seen[hash_canon(p)] = True
        pairs.append((p, i))
    return make_func(pairs), r


def _gen_partition(d: Domain, r_in, rng):
    base = d.inner[0]
    elem_min = calc_min_resource(base)
    m = base.value_count()
    # Pass one: a random sequence of all base elements, generated like an
    # injective sequence (duplicate attempts consume resource).
    order = []
    seen = {}
    r = 0
    while len(order) < m:
        r_res = (m - len(order) - 1) * elem_min
        e, r_e = generate_random(base, r_in - r_res - r, rng)
        r += r_e
        if e is FAIL:
            return FAIL, r
        h = hash_canon(e)
        if h in seen:
            continue
        seen[h] = True
        order.append(e)
    # Pass two (free): allocate elements to cells.
    lo_k, hi_k = d.part_count_bounds()
    lo_s, hi_s = d.part_size_bounds()
    if d.attr("regular"):
        counts = [k for k in range(max(1, lo_k), min(hi_k, m) + 1)
                  if m % k == 0 and lo_s <= m // k <= hi_s]
        if not counts:
            return FAIL, r
        k = counts[rng.randrange(len(counts))]
        size = m // k
        parts = [order[i * size:(i + 1) * size] for i in range(k)]
        return make_part(parts), r
    parts = []
    pos = 0
    for _ in range(max(1, lo_k)):
        if pos + lo_s > m:
            return FAIL, r
        parts.append(order[pos:pos + lo_s])
        pos += lo_s
    while pos < m:
        e = order[pos]
        remaining = m - pos - 1
        options = [i for i, p in enumerate(parts) if len(p) < hi_s]
        if len(parts) < hi_k and remaining >= lo_s - 1:
            options.append(-1)
        if not options:
            return FAIL, r
        choice = options[rng.randrange(len(options))]
        if choice == -1:
            parts.append(order[pos:pos + lo_s])
            pos += lo_s
        else:
            parts[choice].append(e)
            pos += 1
    if len(parts) < lo_k:
        return FAIL, r
    return make_part(parts), r


def generate_with_retry(d: Domain, rng, r_mul: float = R_MUL, r_min: int = R_MIN):
    """Generate a value of ``d``, growing the resource budget until success.

    Returns ``(value, total_consumed)`` where the total includes every
    failed attempt.
    """
    r_in = r_mul * calc_min_resource(d) + r_min
    total = 0
    while True:
        v, consumed = generate_random(d, r_in, rng)
        total += consumed
        if v is not FAIL:
            return v, total
        r_in *= r_mul
