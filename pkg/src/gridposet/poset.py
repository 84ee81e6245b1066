"""Finite abstract posets on elements 0..n-1.

The strict order is stored as a transitively closed comparability table,
one bitmask row per element (bit j of ``lt[i]`` set iff i < j).  Posets
here are small, so dense bit rows keep every comparability query O(1),
which is what the exhaustive searches below spend all their time on.

Provided operations:

* width via Dilworth's theorem (minimum chain cover by maximum bipartite
  matching, Hopcroft-Karp), certified by an explicit maximum antichain
  recovered through Koenig's theorem;
* height (longest chain) by dynamic programming;
* exact Dushnik-Miller dimension with a witness realizer, by iterative
  deepening over tuples of linear extensions, capped by Hiraguchi's
  inequality dim P <= min(|P|/2, width(P)) for |P| >= 4 (dim <= 2 for
  |P| <= 3);
* induced-subposet (copy) detection by backtracking, returning the
  lexicographically first embedding.

All witnesses are deterministic: ties are broken lexicographically on
element indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import BudgetExceeded, CycleError, DomainError, SizeMismatch

DEFAULT_DIMENSION_BUDGET = 10
DEFAULT_SEARCH_NODES = 2_000_000


class Poset:
    """Immutable finite strict order on 0..n-1 with closed bit rows."""

    __slots__ = ("n", "lt", "gt")

    def __init__(self, n: int, lt: Sequence[int], _validated: bool = False):
        if n < 1:
            raise DomainError("poset must have at least one element")
        lt = tuple(lt)
        if not _validated:
            _validate_strict(n, lt)
        self.n = n
        self.lt = lt
        self.gt = tuple(_transpose(n, lt))

    # -- queries -------------------------------------------------------

    def less(self, i: int, j: int) -> bool:
        return bool(self.lt[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return i == j or bool((self.lt[i] | self.gt[i]) >> j & 1)

    def is_chain(self) -> bool:
        n = self.n
        return sum(m.bit_count() for m in self.lt) == n * (n - 1) // 2

    def relation_pairs(self) -> list[tuple[int, int]]:
        """All strict pairs (i, j) with i < j in the order."""
        out = []
        for i in range(self.n):
            m = self.lt[i]
            while m:
                j = (m & -m).bit_length() - 1
                out.append((i, j))
                m &= m - 1
        return out

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Transitive reduction, sorted; canonical serialization of the poset."""
        covers = []
        for i, j in self.relation_pairs():
            # (i, j) is a cover iff no element sits strictly between
            if not (self.lt[i] & self.gt[j]):
                covers.append((i, j))
        return sorted(covers)

    def incomparable_pairs(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if not self.comparable(i, j):
                    out.append((i, j))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.n == other.n and self.lt == other.lt

    def __hash__(self) -> int:
        return hash((self.n, self.lt))

    def __repr__(self) -> str:
        return f"Poset(n={self.n}, covers={self.cover_pairs()})"


def _transpose(n: int, lt: Sequence[int]) -> list[int]:
    gt = [0] * n
    for i in range(n):
        m = lt[i]
        while m:
            j = (m & -m).bit_length() - 1
            gt[j] |= 1 << i
            m &= m - 1
    return gt


def _validate_strict(n: int, lt: Sequence[int]) -> None:
    full = (1 << n) - 1
    for i in range(n):
        row = lt[i]
        if row & ~full:
            raise DomainError("relation row mentions out-of-range element")
        if row >> i & 1:
            raise CycleError(f"element {i} is below itself")
    for i in range(n):
        m = lt[i]
        while m:
            j = (m & -m).bit_length() - 1
            if lt[j] >> i & 1:
                raise CycleError(f"elements {i} and {j} are mutually below each other")
            if lt[j] & ~lt[i]:
                raise DomainError("relation is not transitively closed")
            m &= m - 1


def make_poset(size: int, covers: Iterable[tuple[int, int]]) -> Poset:
    """Build the transitive closure of the pairs p<q; reject cycles.

    Raises IndexError for out-of-range indices and CycleError when the
    closure would force some element below itself.
    """
    if size < 1:
        raise DomainError("poset must have at least one element")
    lt = [0] * size
    for a, b in covers:
        if not (0 <= a < size and 0 <= b < size):
            raise IndexError(f"cover ({a}, {b}) out of range for size {size}")
        if a == b:
            raise CycleError(f"cover ({a}, {b}) relates an element to itself")
        lt[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for i in range(size):
            acc = lt[i]
            m = acc
            while m:
                j = (m & -m).bit_length() - 1
                acc |= lt[j]
                m &= m - 1
            if acc != lt[i]:
                lt[i] = acc
                changed = True
    for i in range(size):
        if lt[i] >> i & 1:
            raise CycleError("input relation contains a cycle")
    return Poset(size, lt, _validated=True)


def poset_from_less(size: int, less: Callable[[int, int], bool]) -> Poset:
    """Materialize a poset from a strict-order predicate (validated)."""
    lt = [0] * size
    for i in range(size):
        row = 0
        for j in range(size):
            if i != j and less(i, j):
                row |= 1 << j
        lt[i] = row
    return Poset(size, lt)


# -- named posets ------------------------------------------------------


def chain_poset(length: int) -> Poset:
    if length < 1:
        raise DomainError("chain length must be positive")
    return make_poset(length, [(i, i + 1) for i in range(length - 1)])


def antichain_poset(size: int) -> Poset:
    if size < 1:
        raise DomainError("antichain size must be positive")
    return make_poset(size, [])


def k_poset() -> Poset:
    """Three elements a, b, c with the single comparable pair a < b."""
    return make_poset(3, [(0, 1)])


def v_poset() -> Poset:
    """One minimum below two incomparable elements."""
    return make_poset(3, [(0, 1), (0, 2)])


def standard_example(n: int) -> Poset:
    """Singletons and co-singletons of an n-set ordered by inclusion.

    Elements 0..n-1 are the singletons {1}..{n}; elements n..2n-1 are the
    complements [n]-{1}..[n]-{n}.  Its dimension is exactly n, which makes
    it the canonical hard instance for the realizer search.  Needs n >= 3
    (below that the two layers collide as sets).
    """
    if n < 3:
        raise DomainError("standard example needs n >= 3")
    covers = [(i, n + j) for i in range(n) for j in range(n) if i != j]
    return make_poset(2 * n, covers)


_NAMED = {"K": k_poset, "V": v_poset}


def named_poset(name: str) -> Poset:
    """Resolve CLI poset names: chain<l>, antichain<a>, K, V, standard<n>."""
    if name in _NAMED:
        return _NAMED[name]()
    for prefix, builder in (("chain", chain_poset), ("antichain", antichain_poset),
                            ("standard", standard_example)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return builder(int(name[len(prefix):]))
    raise DomainError(f"unknown poset name: {name!r}")


# -- file format -------------------------------------------------------


def poset_to_doc(p: Poset) -> dict:
    return {"size": p.n, "covers": [list(c) for c in p.cover_pairs()]}


def poset_from_doc(doc: dict) -> Poset:
    return make_poset(int(doc["size"]), [tuple(c) for c in doc["covers"]])


def save_poset(path, p: Poset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(poset_to_doc(p), fh, sort_keys=True)
        fh.write("\n")


def load_poset(path) -> Poset:
    with open(path, "r", encoding="utf-8") as fh:
        return poset_from_doc(json.load(fh))


# -- width / height ----------------------------------------------------


def _hopcroft_karp(n_left: int, n_right: int, adj: Sequence[Sequence[int]]):
    """Maximum bipartite matching; deterministic (adjacency order fixed).

    Returns (size, match_left, match_right) with -1 for unmatched.
    """
    INF = float("inf")
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = []
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                size += 1
    return size, match_l, match_r


def max_antichain(p: Poset) -> tuple[int, ...]:
    """An explicit maximum antichain, via Dilworth + Koenig.

    The comparability relation i < j is read as a bipartite graph on two
    copies of the ground set; a maximum matching gives a minimum chain
    cover of size n - |M|, and the Koenig vertex cover complement yields
    an antichain of the same size.  Both certificates are checked before
    returning.
    """
    n = p.n
    adj = [[] for _ in range(n)]
    for i in range(n):
        m = p.lt[i]
        while m:
            j = (m & -m).bit_length() - 1
            adj[i].append(j)
            m &= m - 1
    msize, match_l, match_r = _hopcroft_karp(n, n, adj)

    # Koenig: alternating reachability from unmatched left vertices.
    in_zl = [match_l[u] == -1 for u in range(n)]
    in_zr = [False] * n
    queue = [u for u in range(n) if in_zl[u]]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in adj[u]:
            if match_l[u] == v:
                continue
            if not in_zr[v]:
                in_zr[v] = True
                w = match_r[v]
                if w != -1 and not in_zl[w]:
                    in_zl[w] = True
                    queue.append(w)
    antichain = tuple(i for i in range(n) if in_zl[i] and not in_zr[i])
    if len(antichain) != n - msize:
        raise AssertionError("Dilworth certificate mismatch")
    for a in range(len(antichain)):
        for b in range(a + 1, len(antichain)):
            if p.comparable(antichain[a], antichain[b]):
                raise AssertionError("antichain witness is not an antichain")
    return antichain


def width_poset(p: Poset) -> int:
    """Exact width (maximum antichain size)."""
    return len(max_antichain(p))


def height(p: Poset) -> int:
    """Longest chain size, by DP in a linear extension order."""
    order = sorted(range(p.n), key=lambda i: (p.gt[i].bit_count(), i))
    h = [1] * p.n
    for i in order:
        m = p.gt[i]
        while m:
            j = (m & -m).bit_length() - 1
            if h[j] + 1 > h[i]:
                h[i] = h[j] + 1
            m &= m - 1
    return max(h)


# -- realizers and dimension -------------------------------------------


@dataclass(frozen=True)
class Realizer:
    """A tuple of linear extensions, stored element -> position."""

    orders: tuple[tuple[int, ...], ...]

    @property
    def order_count(self) -> int:
        return len(self.orders)

    def sequences(self) -> tuple[tuple[int, ...], ...]:
        """Each order as the sequence of elements from bottom to top."""
        out = []
        for order in self.orders:
            seq = [0] * len(order)
            for elt, pos in enumerate(order):
                seq[pos] = elt
            out.append(tuple(seq))
        return tuple(out)

    @staticmethod
    def from_sequences(seqs: Iterable[Sequence[int]]) -> "Realizer":
        orders = []
        for seq in seqs:
            order = [0] * len(seq)
            for pos, elt in enumerate(seq):
                order[elt] = pos
            orders.append(tuple(order))
        return Realizer(tuple(orders))


def realizer_valid(p: Poset, r: Realizer) -> bool:
    """True iff every order is a linear extension of p and their
    intersection equals p's relation exactly."""
    if any(len(order) != p.n for order in r.orders):
        raise SizeMismatch("realizer size differs from poset size")
    if not r.orders:
        return False
    for order in r.orders:
        if sorted(order) != list(range(p.n)):
            return False
        for i, j in p.relation_pairs():
            if order[i] > order[j]:
                return False
    for i, j in p.incomparable_pairs():
        if all(order[i] < order[j] for order in r.orders):
            return False
        if all(order[j] < order[i] for order in r.orders):
            return False
    return True


def _iter_extensions(n: int, lt: Sequence[int], gt: Sequence[int],
                     bound: Optional[Sequence[int]] = None) -> Iterator[tuple[int, ...]]:
    """Linear extensions as element sequences, in lexicographic order.

    With ``bound`` given, only extensions >= bound (lexicographically) are
    produced; the generator skips the rest without enumerating them.
    """
    placed = [0] * n  # sequence under construction
    used = 0
    pending = list(gt)  # predecessors not yet placed, as masks

    def rec(depth: int, tight: bool) -> Iterator[tuple[int, ...]]:
        nonlocal used
        if depth == n:
            yield tuple(placed)
            return
        lo = bound[depth] if (tight and bound is not None) else 0
        for e in range(n):
            if used >> e & 1 or pending[e]:
                continue
            if e < lo:
                continue
            placed[depth] = e
            used |= 1 << e
            m = lt[e]
            while m:
                j = (m & -m).bit_length() - 1
                pending[j] &= ~(1 << e)
                m &= m - 1
            yield from rec(depth + 1, tight and e == lo)
            used &= ~(1 << e)
            m = lt[e]
            while m:
                j = (m & -m).bit_length() - 1
                pending[j] |= 1 << e
                m &= m - 1

    yield from rec(0, bound is not None)


def linear_extensions(p: Poset) -> Iterator[tuple[int, ...]]:
    """All linear extensions of p as element sequences, lexicographic."""
    return _iter_extensions(p.n, p.lt, p.gt)


def _closure_with(p: Poset, extra: Iterable[tuple[int, int]]) -> Optional[tuple[list[int], list[int]]]:
    """Closure of p's relation plus extra pairs; None if a cycle appears."""
    lt = list(p.lt)
    for a, b in extra:
        lt[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for i in range(p.n):
            acc = lt[i]
            m = acc
            while m:
                j = (m & -m).bit_length() - 1
                acc |= lt[j]
                m &= m - 1
            if acc != lt[i]:
                lt[i] = acc
                changed = True
    for i in range(p.n):
        if lt[i] >> i & 1:
            return None
    return lt, _transpose(p.n, lt)


def dimension(p: Poset, max_size: int = DEFAULT_DIMENSION_BUDGET) -> tuple[int, Realizer]:
    """Exact order dimension with a witness realizer.

    Iterative deepening over d = 1, 2, ... up to the Hiraguchi cap.  For
    each d the search runs over lexicographically sorted d-tuples of
    linear extensions (the lexicographically first valid tuple is always
    sorted, so nothing is lost), pruning on incomparable pairs whose two
    orientations can no longer all be covered.  The last slot is filled
    directly with the first extension of the poset augmented by all
    still-missing orientations.
    """
    if p.n > max_size:
        raise BudgetExceeded(f"dimension search budget is |P| <= {max_size}")
    if p.is_chain():
        seq = tuple(sorted(range(p.n), key=lambda i: (p.gt[i].bit_count(), i)))
        realizer = Realizer.from_sequences([seq])
        assert realizer_valid(p, realizer)
        return 1, realizer

    w = width_poset(p)
    cap = 2 if p.n <= 3 else min(p.n // 2, w)
    inc_pairs = p.incomparable_pairs()

    for d in range(2, cap + 1):
        found = _search_realizer(p, d, inc_pairs)
        if found is not None:
            realizer = Realizer.from_sequences(found)
            assert realizer_valid(p, realizer)
            return d, realizer
    raise AssertionError("no realizer within the Hiraguchi cap; dimension search is buggy")


def _search_realizer(p: Poset, d: int, inc_pairs) -> Optional[list[tuple[int, ...]]]:
    # missing orientation bookkeeping: for each incomparable pair {x, y}
    # both (x,y) and (y,x) must occur across the chosen extensions.
    chosen: list[tuple[int, ...]] = []
    chosen_pos: list[list[int]] = []

    def missing_orientations() -> list[tuple[int, int]]:
        missing = []
        for x, y in inc_pairs:
            if not any(pos[x] > pos[y] for pos in chosen_pos):
                missing.append((y, x))
            if not any(pos[x] < pos[y] for pos in chosen_pos):
                missing.append((x, y))
        return missing

    def rec(slot: int, lower: Optional[tuple[int, ...]]) -> Optional[list[tuple[int, ...]]]:
        left = d - slot
        missing = missing_orientations()
        if not missing:
            # pad with the lexicographically first extension
            first = next(_iter_extensions(p.n, p.lt, p.gt, bound=lower))
            return chosen + [first] * left
        per_pair: dict[tuple[int, int], int] = {}
        for a, b in missing:
            key = (min(a, b), max(a, b))
            per_pair[key] = per_pair.get(key, 0) + 1
        if max(per_pair.values()) > left:
            return None
        if left == 1:
            closed = _closure_with(p, missing)
            if closed is None:
                return None
            lt2, gt2 = closed
            for seq in _iter_extensions(p.n, lt2, gt2, bound=lower):
                return chosen + [seq]
            return None
        for seq in _iter_extensions(p.n, p.lt, p.gt, bound=lower):
            pos = [0] * p.n
            for t, e in enumerate(seq):
                pos[e] = t
            chosen.append(seq)
            chosen_pos.append(pos)
            result = rec(slot + 1, seq)
            chosen.pop()
            chosen_pos.pop()
            if result is not None:
                return result
        return None

    return rec(0, None)


# -- induced copies ----------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective map pattern element -> host element (an induced copy)."""

    mapping: tuple[int, ...]


def find_induced_embedding(host_n: int, host_lt: Sequence[int], host_gt: Sequence[int],
                           pattern: Poset, *, budget: int = DEFAULT_SEARCH_NODES,
                           require: Optional[tuple[int, int]] = None) -> Optional[tuple[int, ...]]:
    """Lexicographically first induced embedding of ``pattern`` into the
    host order given by bit rows, or None.

    ``require=(e, v)`` forces pattern element e onto host element v (used
    for incremental freeness checks).  Budget counts candidate tests.
    """
    pn = pattern.n
    if pn > host_n:
        return None
    host_cmp = [host_lt[i] | host_gt[i] for i in range(host_n)]
    host_up = [m.bit_count() for m in host_lt]
    host_dn = [m.bit_count() for m in host_gt]
    pat_up = [m.bit_count() for m in pattern.lt]
    pat_dn = [m.bit_count() for m in pattern.gt]
    mapping = [-1] * pn
    used = 0
    nodes = 0

    def rec(t: int) -> bool:
        nonlocal used, nodes
        if t == pn:
            return True
        if require is not None and t == require[0]:
            candidates: Iterable[int] = (require[1],)
        else:
            candidates = range(host_n)
        for v in candidates:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("induced-copy search budget exhausted")
            if used >> v & 1:
                continue
            if host_up[v] < pat_up[t] or host_dn[v] < pat_dn[t]:
                continue
            ok = True
            for s in range(t):
                u = mapping[s]
                if pattern.less(s, t):
                    if not (host_lt[u] >> v & 1):
                        ok = False
                        break
                elif pattern.less(t, s):
                    if not (host_gt[u] >> v & 1):
                        ok = False
                        break
                elif host_cmp[u] >> v & 1:
                    ok = False
                    break
            if not ok:
                continue
            mapping[t] = v
            used |= 1 << v
            if rec(t + 1):
                return True
            used &= ~(1 << v)
            mapping[t] = -1
        return False

    if rec(0):
        return tuple(mapping)
    return None


def enumerate_induced_copy_sets(host_n: int, host_lt: Sequence[int], host_gt: Sequence[int],
                                pattern: Poset, *, budget: int = DEFAULT_SEARCH_NODES) -> list[frozenset]:
    """All vertex sets of the host that induce a copy of ``pattern``.

    Embeddings that differ by a pattern automorphism hit the same set;
    results are deduplicated and returned sorted for determinism.
    """
    pn = pattern.n
    host_cmp = [host_lt[i] | host_gt[i] for i in range(host_n)]
    mapping = [-1] * pn
    used = 0
    nodes = 0
    sets: set[frozenset] = set()

    def rec(t: int) -> None:
        nonlocal used, nodes
        if t == pn:
            sets.add(frozenset(mapping))
            return
        for v in range(host_n):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("copy enumeration budget exhausted")
            if used >> v & 1:
                continue
            ok = True
            for s in range(t):
                u = mapping[s]
                if pattern.less(s, t):
                    if not (host_lt[u] >> v & 1):
                        ok = False
                        break
                elif pattern.less(t, s):
                    if not (host_gt[u] >> v & 1):
                        ok = False
                        break
                elif host_cmp[u] >> v & 1:
                    ok = False
                    break
            if ok:
                mapping[t] = v
                used |= 1 << v
                rec(t + 1)
                used &= ~(1 << v)
                mapping[t] = -1

    rec(0)
    return sorted(sets, key=sorted)


def contains_induced_copy(host: Poset, pattern: Poset, *,
                          budget: int = DEFAULT_SEARCH_NODES) -> Optional[Embedding]:
    """Lexicographically first induced copy of ``pattern`` in ``host``."""
    found = find_induced_embedding(host.n, host.lt, host.gt, pattern, budget=budget)
    return Embedding(found) if found is not None else None
