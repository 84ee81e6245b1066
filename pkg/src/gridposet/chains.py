"""Chain decompositions of grids.

``scd`` builds the classical symmetric chain decomposition of a product
of chains: the SCD of a single chain is itself, and the SCD of P x [k]
refines every chain of length c into min(c, k) symmetric chains of the
c x k grid (the bracket/peel step).  Every chain ends up rank-saturated
and spanning ranks [i, N-i], and the chain count equals the width.

``balanced_partition`` produces a partition of [k]^n into chains whose
sizes all lie in the window [ceil(k^n/4w), floor(k^n/w)] where w is the
width.  Three routes are tried, each output re-verified before return:

1. SCD, then merge undersized chains onto other chains' bottoms (chains
   need not be saturated, so rank gaps are legal), then cut oversized
   chains.  Note that merges can never fire when starting from an SCD:
   every SCD top has rank >= N/2 and every bottom rank <= N/2, so no top
   lies strictly below another bottom.  The route therefore succeeds
   exactly when the SCD has no undersized chains (the merge machinery is
   kept because it applies to partitions that do not come from an SCD).
2. Axis fibers: the k-point lines along the last axis partition [k]^n
   into chains of size exactly k, cut further if k exceeds the window.
3. Exact backtracking over windowed chain partitions for grids with at
   most 4096 points, under a node budget.

If all routes fail the function raises ConstructionFailed rather than
returning an unverified partition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ConstructionFailed, DomainError, InfeasibleCut
from .grid import GridShape, digits_of, level_profile, ranks_of, width_grid

EXACT_FALLBACK_POINTS = 4096
EXACT_FALLBACK_NODES = 2_000_000

Chain = tuple[int, ...]  # point indices, strictly increasing in grid order


@dataclass(frozen=True)
class ChainPartition:
    shape: GridShape
    chains: tuple[Chain, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.chains)


@dataclass
class PartitionReport:
    """Outcome of verify_partition; failures are reported, not raised."""

    is_partition: bool
    chains_valid: bool
    sizes_in_window: bool
    missing: list[int] = field(default_factory=list)
    duplicated: list[int] = field(default_factory=list)
    bad_chains: list[int] = field(default_factory=list)
    bad_sizes: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_partition and self.chains_valid and self.sizes_in_window


def corollary_window(shape: GridShape) -> tuple[int, int]:
    """Integer chain-size window [ceil(T/4w), floor(T/w)] for a grid of
    T points and width w, relaxed to [1, max(1, floor(T/w))] if the
    integer bounds cross on tiny grids."""
    total = shape.size
    w = width_grid(shape)
    low = -(-total // (4 * w))
    high = total // w
    if high < low:
        low, high = 1, max(1, high)
    return low, high


# -- symmetric chain decomposition --------------------------------------


def _scd_2d_paths(c: int, k: int) -> list[list[tuple[int, int]]]:
    """Symmetric chain decomposition of the c x k grid (0-based pairs).

    For c <= k, chain i walks row i from column 0 to column k-1-i, then
    climbs column k-1-i up to row c-1: sizes c+k-1-2i, spans [i, c+k-2-i].
    The c > k case is the transpose.
    """
    if c > k:
        return [[(r, s) for (s, r) in path] for path in _scd_2d_paths(k, c)]
    paths = []
    for i in range(c):
        path = [(i, s) for s in range(k - i)]
        path += [(r, k - 1 - i) for r in range(i + 1, c)]
        paths.append(path)
    return paths


def scd(shape: GridShape) -> ChainPartition:
    """Symmetric chain decomposition by the product construction."""
    sides = shape.sides
    chains: list[list[int]] = [list(range(sides[0]))]
    for k in sides[1:]:
        new_chains: list[list[int]] = []
        for chain in chains:
            c = len(chain)
            for path in _scd_2d_paths(c, k):
                new_chains.append([chain[r] * k + s for r, s in path])
        chains = new_chains
    chains.sort(key=lambda ch: ch[0])
    part = ChainPartition(shape, tuple(tuple(ch) for ch in chains))
    if len(part.chains) != width_grid(shape):
        raise AssertionError("SCD chain count differs from the grid width")
    return part


def verify_symmetric(shape: GridShape, partition: ChainPartition) -> bool:
    """True iff every chain is rank-saturated and spans ranks [i, N-i]."""
    ranks = ranks_of(shape)
    N = shape.num_levels
    for chain in partition.chains:
        rs = [ranks[i] for i in chain]
        if rs != list(range(rs[0], rs[0] + len(rs))):
            return False
        if rs[0] + rs[-1] != N:
            return False
    return True


# -- generic verification ------------------------------------------------


def verify_partition(shape: GridShape, partition: ChainPartition,
                     low: Optional[int] = None, high: Optional[int] = None) -> PartitionReport:
    """Check disjoint cover, strict increase along every chain, and the
    size window (when given).  Never raises; offenders are listed."""
    digits = digits_of(shape)
    seen = 0
    duplicated: list[int] = []
    bad_chains: list[int] = []
    bad_sizes: list[int] = []
    for ci, chain in enumerate(partition.chains):
        if not chain:
            bad_chains.append(ci)
            continue
        ok = True
        prev = chain[0]
        if not 0 <= prev < shape.size:
            bad_chains.append(ci)
            continue
        for cur in chain[1:]:
            if not 0 <= cur < shape.size:
                ok = False
                break
            da, db = digits[prev], digits[cur]
            if da == db or not all(x <= y for x, y in zip(da, db)):
                ok = False
                break
            prev = cur
        if not ok:
            bad_chains.append(ci)
        for idx in chain:
            if seen >> idx & 1:
                duplicated.append(idx)
            seen |= 1 << idx
        if low is not None and high is not None and not low <= len(chain) <= high:
            bad_sizes.append(ci)
    missing = []
    full = (1 << shape.size) - 1
    if seen != full:
        rem = full & ~seen
        while rem:
            missing.append((rem & -rem).bit_length() - 1)
            rem &= rem - 1
    return PartitionReport(
        is_partition=not missing and not duplicated,
        chains_valid=not bad_chains,
        sizes_in_window=not bad_sizes,
        missing=missing,
        duplicated=duplicated,
        bad_chains=bad_chains,
        bad_sizes=bad_sizes,
    )


# -- cutting and merging -------------------------------------------------


def cut_chain(chain: Sequence[int], low: int, high: int) -> list[Chain]:
    """Split into contiguous pieces with sizes in [low, high]: greedy
    largest-first, then rebalance so the last piece reaches ``low``."""
    if low < 1 or high < low:
        raise DomainError("cut window must satisfy 1 <= low <= high")
    size = len(chain)
    if size < low:
        raise InfeasibleCut(f"chain of size {size} is below the window")
    if -(-size // high) > size // low:
        raise InfeasibleCut(f"size {size} cannot split into pieces in [{low}, {high}]")
    sizes = []
    remaining = size
    while remaining:
        take = min(high, remaining)
        sizes.append(take)
        remaining -= take
    # borrow from earlier pieces until the last piece reaches low
    i = len(sizes) - 2
    while sizes and sizes[-1] < low:
        if i < 0:
            raise AssertionError("cut rebalancing failed despite feasibility")
        give = min(sizes[i] - low, low - sizes[-1])
        if give > 0:
            sizes[i] -= give
            sizes[-1] += give
        i -= 1
    out = []
    pos = 0
    for s in sizes:
        out.append(tuple(chain[pos:pos + s]))
        pos += s
    return out


def merge_undersized(shape: GridShape, chains: list[list[int]], low: int) -> bool:
    """One merge round: match undersized chains' tops to other chains'
    bottoms (top < bottom in grid order) and concatenate matched pairs.

    Uses a maximum bipartite matching, then applies a disjoint subset of
    it greedily in index order.  Returns True if anything merged.
    """
    digits = digits_of(shape)
    under = [i for i, ch in enumerate(chains) if len(ch) < low]
    if not under:
        return False
    edges: dict[int, list[int]] = {}
    for u in under:
        du = digits[chains[u][-1]]
        targets = []
        for v, ch in enumerate(chains):
            if v == u:
                continue
            dv = digits[ch[0]]
            if du != dv and all(x <= y for x, y in zip(du, dv)):
                targets.append(v)
        if targets:
            edges[u] = targets
    if not edges:
        return False
    match = _kuhn_matching(edges, len(chains))
    used: set[int] = set()
    merged_any = False
    for u in sorted(match):
        v = match[u]
        if u in used or v in used:
            continue
        chains[u] = chains[u] + chains[v]
        chains[v] = []
        used.update((u, v))
        merged_any = True
    chains[:] = [ch for ch in chains if ch]
    return merged_any


def _kuhn_matching(edges: dict[int, list[int]], n_right: int) -> dict[int, int]:
    match_r: dict[int, int] = {}
    match_l: dict[int, int] = {}

    def try_augment(u: int, visited: set[int]) -> bool:
        for v in edges.get(u, ()):
            if v in visited:
                continue
            visited.add(v)
            if v not in match_r or try_augment(match_r[v], visited):
                match_r[v] = u
                match_l[u] = v
                return True
        return False

    for u in sorted(edges):
        try_augment(u, set())
    return match_l


# -- balanced partition ---------------------------------------------------


def balanced_partition(shape: GridShape) -> ChainPartition:
    """Partition [k]^n into chains with sizes in the corollary window."""
    if not shape.is_uniform:
        raise DomainError("balanced_partition is defined for uniform [k]^n")
    low, high = corollary_window(shape)

    part = _route_scd_merge_cut(shape, low, high)
    if part is None:
        part = _route_axis_fibers(shape, low, high)
    if part is None and shape.size <= EXACT_FALLBACK_POINTS:
        part = _route_exact_search(shape, low, high)
    if part is None:
        raise ConstructionFailed(
            f"no route produced a chain partition of {shape.sides} in [{low}, {high}]")
    report = verify_partition(shape, part, low, high)
    if not report.ok:
        raise ConstructionFailed(f"constructed partition failed verification: {report}")
    return part


def _cut_all(shape: GridShape, chains: list[list[int]], low: int, high: int) -> Optional[ChainPartition]:
    out: list[Chain] = []
    for chain in chains:
        if len(chain) <= high:
            out.append(tuple(chain))
        else:
            try:
                out.extend(cut_chain(chain, low, high))
            except InfeasibleCut:
                return None
    return ChainPartition(shape, tuple(out))


def _route_scd_merge_cut(shape: GridShape, low: int, high: int) -> Optional[ChainPartition]:
    chains = [list(c) for c in scd(shape).chains]
    while any(len(c) < low for c in chains):
        if not merge_undersized(shape, chains, low):
            return None
    return _cut_all(shape, chains, low, high)


def _route_axis_fibers(shape: GridShape, low: int, high: int) -> Optional[ChainPartition]:
    k = shape.sides[-1]
    if k < low:
        return None
    lines = [list(range(b * k, b * k + k)) for b in range(shape.size // k)]
    if k <= high:
        return ChainPartition(shape, tuple(tuple(line) for line in lines))
    return _cut_all(shape, lines, low, high)


def _route_exact_search(shape: GridShape, low: int, high: int) -> Optional[ChainPartition]:
    """Backtracking over windowed chain partitions; honest last resort."""
    size = shape.size
    digits = digits_of(shape)
    nodes = 0
    chains: list[list[int]] = []

    def rec(idx: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > EXACT_FALLBACK_NODES:
            raise ConstructionFailed("exact partition search budget exhausted")
        if idx == size:
            return all(len(c) >= low for c in chains)
        deficit = sum(low - len(c) for c in chains if len(c) < low)
        if deficit > size - idx:
            return False
        d = digits[idx]
        for chain in chains:
            if len(chain) >= high:
                continue
            dt = digits[chain[-1]]
            if all(x <= y for x, y in zip(dt, d)):
                chain.append(idx)
                if rec(idx + 1):
                    return True
                chain.pop()
        chains.append([idx])
        if rec(idx + 1):
            return True
        chains.pop()
        return False

    try:
        if rec(0):
            return ChainPartition(shape, tuple(tuple(c) for c in chains))
    except ConstructionFailed:
        return None
    return None


# -- certificate file format ----------------------------------------------


def save_partition(path, partition: ChainPartition) -> None:
    """Write the certificate: a shape line, then one ascending index line
    per chain.  Bit-exact UTF-8, reloadable and re-verifiable."""
    lines = ["shape " + " ".join(str(k) for k in partition.shape.sides)]
    for chain in partition.chains:
        lines.append(" ".join(str(i) for i in chain))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_partition(path) -> ChainPartition:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("shape "):
        raise DomainError("partition certificate must start with a shape line")
    shape = GridShape(tuple(int(t) for t in lines[0].split()[1:]))
    chains = tuple(tuple(int(t) for t in ln.split()) for ln in lines[1:])
    return ChainPartition(shape, chains)


def partition_to_doc(partition: ChainPartition) -> dict:
    return {"sides": list(partition.shape.sides),
            "chains": [list(c) for c in partition.chains]}


def partition_from_doc(doc: dict) -> ChainPartition:
    shape = GridShape(tuple(int(k) for k in doc["sides"]))
    return ChainPartition(shape, tuple(tuple(int(i) for i in c) for c in doc["chains"]))
