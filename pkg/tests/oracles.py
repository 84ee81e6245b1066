"""Independent brute-force oracles used to certify the fast paths.

Everything here is deliberately naive: subset enumeration, permutation
search, unpruned DP.  The oracles share no code with the algorithms they
check (they only consume the public comparability primitives).
"""

from __future__ import annotations

import itertools
import random

from gridposet.grid import GridShape, Subset, digits_of, level_profile, ranks_of
from gridposet.poset import Poset, make_poset


def brute_width(p: Poset) -> int:
    """Maximum antichain by enumerating all subsets (n <= ~15)."""
    comp = [p.lt[i] | p.gt[i] for i in range(p.n)]
    best = 0
    for mask in range(1 << p.n):
        m = mask
        ok = True
        while m:
            i = (m & -m).bit_length() - 1
            if mask & comp[i]:
                ok = False
                break
            m &= m - 1
        if ok:
            best = max(best, mask.bit_count())
    return best


def brute_height(p: Poset) -> int:
    """Longest chain by DFS over the explicit relation."""
    best = 1

    def extend(chain_top: int, length: int):
        nonlocal best
        best = max(best, length)
        m = p.lt[chain_top]
        while m:
            j = (m & -m).bit_length() - 1
            extend(j, length + 1)
            m &= m - 1

    for i in range(p.n):
        extend(i, 1)
    return best


def brute_first_embedding(host: Poset, pattern: Poset):
    """Lexicographically first induced embedding by blunt enumeration."""
    for image in itertools.permutations(range(host.n), pattern.n):
        ok = True
        for s in range(pattern.n):
            for t in range(pattern.n):
                if s == t:
                    continue
                want = pattern.less(s, t)
                got = host.less(image[s], image[t])
                if want != got:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return image
    return None


def grid_leq(shape: GridShape, a: int, b: int) -> bool:
    da, db = digits_of(shape)[a], digits_of(shape)[b]
    return all(x <= y for x, y in zip(da, db))


def subset_has_induced(shape: GridShape, members: list[int], pattern: Poset) -> bool:
    """Unpruned check that some tuple of members induces the pattern."""
    for image in itertools.permutations(members, pattern.n):
        ok = True
        for s in range(pattern.n):
            for t in range(pattern.n):
                if s == t:
                    continue
                ls = grid_leq(shape, image[s], image[t]) and image[s] != image[t]
                if pattern.less(s, t) != ls:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def brute_max_p_free(shape: GridShape, pattern: Poset) -> int:
    """Exhaustive maximum P-free subset size (grids up to ~12 points)."""
    size = shape.size
    best = 0
    for mask in range(1 << size):
        count = mask.bit_count()
        if count <= best:
            continue
        members = [i for i in range(size) if mask >> i & 1]
        if not subset_has_induced(shape, members, pattern):
            best = count
    return best


def brute_l_chain_free(shape: GridShape, l: int) -> int:
    """Exact maximum subset with no chain of l points, by branch and
    bound over points ordered middle-levels-first (largest level sizes
    first, so the incumbent becomes strong early).

    The bound is the trivial fiber bound: the lines along the longest
    axis partition the grid into chains, so a valid subset meets each
    line in at most l-1 points and the reachable total is the sum of
    min(l-1 - taken, still available) over lines.
    """
    size = shape.size
    digits = digits_of(shape)
    ranks = ranks_of(shape)
    sizes = level_profile(shape).sizes
    order = sorted(range(size), key=lambda i: (-sizes[ranks[i]], ranks[i], i))
    best = 0
    chosen: list[int] = []

    axis = max(range(shape.n), key=lambda x: shape.sides[x])
    line_ids: dict = {}
    line_of = [0] * size
    for i in range(size):
        key = digits[i][:axis] + digits[i][axis + 1:]
        line_of[i] = line_ids.setdefault(key, len(line_ids))
    line_taken = [0] * len(line_ids)
    line_avail = [0] * len(line_ids)
    for i in range(size):
        line_avail[line_of[i]] += 1

    def longest_through(v: int) -> int:
        members = sorted(chosen + [v])
        vi = members.index(v)
        m = len(members)
        down = [1] * m
        up = [1] * m
        for i in range(m):
            di = digits[members[i]]
            for j in range(i):
                dj = digits[members[j]]
                if dj != di and all(x <= y for x, y in zip(dj, di)):
                    down[i] = max(down[i], down[j] + 1)
        for i in range(m - 1, -1, -1):
            di = digits[members[i]]
            for j in range(i + 1, m):
                dj = digits[members[j]]
                if di != dj and all(x <= y for x, y in zip(di, dj)):
                    up[i] = max(up[i], up[j] + 1)
        return down[vi] + up[vi] - 1

    def fiber_bound() -> int:
        return len(chosen) + sum(min(max(l - 1 - t, 0), a)
                                 for t, a in zip(line_taken, line_avail))

    def rec(t: int) -> None:
        nonlocal best
        if len(chosen) + (size - t) <= best or fiber_bound() <= best:
            return
        if t == size:
            best = max(best, len(chosen))
            return
        v = order[t]
        line = line_of[v]
        line_avail[line] -= 1
        if line_taken[line] < l - 1 and longest_through(v) <= l - 1:
            chosen.append(v)
            line_taken[line] += 1
            rec(t + 1)
            line_taken[line] -= 1
            chosen.pop()
        rec(t + 1)
        line_avail[line] += 1

    rec(0)
    return best


def all_posets_upto_iso(max_n: int) -> list[Poset]:
    """All posets with 1..max_n elements, one representative per
    isomorphism class, by filtering every antisymmetric transitive
    relation and canonicalizing over relabelings."""
    out: list[Poset] = []
    for n in range(1, max_n + 1):
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        seen: set = set()
        for bits in range(1 << len(pairs)):
            lt = [0] * n
            for t, (i, j) in enumerate(pairs):
                if bits >> t & 1:
                    lt[i] |= 1 << j
            ok = True
            for i in range(n):
                if not ok:
                    break
                m = lt[i]
                while m:
                    j = (m & -m).bit_length() - 1
                    if lt[j] >> i & 1 or (lt[j] & ~lt[i]):
                        ok = False
                        break
                    m &= m - 1
            if not ok:
                continue
            canon = min(
                tuple(sorted(
                    (perm[i], perm[j]) for i in range(n) for j in range(n)
                    if lt[i] >> j & 1))
                for perm in itertools.permutations(range(n)))
            if canon in seen:
                continue
            seen.add(canon)
            out.append(Poset(n, lt, _validated=True))
    return out


def random_poset(rng: random.Random, n: int) -> Poset:
    """Random poset via closure of random forward covers."""
    covers = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                covers.append((i, j))
    return make_poset(n, covers)


def canonical_shapes(max_side: int, max_n: int, max_points: int) -> list[tuple[int, ...]]:
    """Non-decreasing side tuples with a bounded product."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], lo: int, prod: int):
        if prefix:
            out.append(prefix)
        if len(prefix) == max_n:
            return
        for k in range(lo, max_side + 1):
            if prod * k > max_points:
                break
            rec(prefix + (k,), k, prod * k)

    rec((), 1, 1)
    return out
