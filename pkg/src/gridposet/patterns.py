"""d-dimensional 0-1 patterns and their containment order.

A pattern M of size m_1 x ... x m_d contains a pattern A of size
a_1 x ... x a_d if strictly increasing index rows i_{x,1} < ... < i_{x,a_x}
can be chosen on every axis x so that every 1 of A maps to a 1 of M.
Permutation patterns are the equal-sided patterns with at most one 1 per
axis-parallel hyperplane; a poset together with a realizer of d linear
extensions encodes into a d-dimensional permutation pattern with one 1
per element at its realizer coordinates.

``extremal_weight`` computes the exact maximum weight of an m x ... x m
host avoiding a fixed pattern, by branch and bound over cells in
lexicographic order: a branch dies only on certain containment, the
bound is remaining capacity, and the first optimum found is the witness
with lexicographically earliest ones.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BudgetExceeded, DimensionMismatch, DomainError, InvalidRealizer
from .grid import Subset
from .poset import Poset, Realizer, realizer_valid

DEFAULT_CELL_BUDGET = 25


@dataclass(frozen=True)
class Pattern:
    """Sparse 0-1 array: side lengths plus the set of 1-cells (1-based)."""

    dims: tuple[int, ...]
    ones: frozenset[tuple[int, ...]]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(m) for m in self.dims))
        object.__setattr__(self, "ones", frozenset(tuple(int(c) for c in o) for o in self.ones))
        if len(self.dims) < 1 or any(m < 1 for m in self.dims):
            raise DomainError("pattern dims must be positive")
        for cell in self.ones:
            if len(cell) != len(self.dims):
                raise DomainError("pattern cell has wrong arity")
            if any(not 1 <= c <= m for c, m in zip(cell, self.dims)):
                raise DomainError(f"pattern cell {cell} out of range")

    @property
    def dimension(self) -> int:
        return len(self.dims)

    @property
    def weight(self) -> int:
        return len(self.ones)

    def sorted_ones(self) -> list[tuple[int, ...]]:
        return sorted(self.ones)


@dataclass(frozen=True)
class ContainmentWitness:
    """Strictly increasing index rows, one per axis."""

    index_rows: tuple[tuple[int, ...], ...]


def contains_pattern(host: Pattern, a: Pattern) -> Optional[ContainmentWitness]:
    """Lexicographically first containment witness, or None if the host
    avoids ``a`` (rows compared as the concatenated index tuple)."""
    if host.dimension != a.dimension:
        raise DimensionMismatch("host and pattern dimension differ")
    if any(al > ml for al, ml in zip(a.dims, host.dims)):
        return None
    ones = a.sorted_ones()
    host_ones = host.ones

    def check(rows: Sequence[Sequence[int]]) -> bool:
        for cell in ones:
            mapped = tuple(rows[ax][cell[ax] - 1] for ax in range(len(rows)))
            if mapped not in host_ones:
                return False
        return True

    axis_choices = [list(itertools.combinations(range(1, m + 1), al))
                    for m, al in zip(host.dims, a.dims)]
    for rows in itertools.product(*axis_choices):
        if check(rows):
            return ContainmentWitness(tuple(tuple(r) for r in rows))
    return None


def is_permutation_pattern(a: Pattern, strict: bool = False) -> bool:
    """At most one 1 per axis-parallel hyperplane of an equal-sided
    pattern; with ``strict`` every hyperplane must hold exactly one."""
    if len(set(a.dims)) != 1:
        return False
    k = a.dims[0]
    for ax in range(a.dimension):
        counts = [0] * (k + 1)
        for cell in a.ones:
            counts[cell[ax]] += 1
        limit_ok = all(c <= 1 for c in counts[1:])
        if strict:
            limit_ok = all(c == 1 for c in counts[1:])
        if not limit_ok:
            return False
    return True


def poset_to_pattern(p: Poset, r: Realizer) -> Pattern:
    """Encode a poset with a d-order realizer as the a x ... x a pattern
    holding one 1 per element at its realizer coordinates."""
    if not realizer_valid(p, r):
        raise InvalidRealizer("realizer does not realize the poset")
    d = r.order_count
    ones = {tuple(r.orders[i][e] + 1 for i in range(d)) for e in range(p.n)}
    return Pattern((p.n,) * d, frozenset(ones))


def subset_to_pattern(s: Subset) -> Pattern:
    """Indicator pattern of a grid subset; weight equals |S|."""
    return Pattern(s.shape.sides, frozenset(s.points()))


# -- extremal weights -----------------------------------------------------


def _contains_using_cell(host_ones: set, dims: tuple[int, ...], a: Pattern,
                         cell: tuple[int, ...]) -> bool:
    """Does ``host_ones`` contain ``a`` by a witness that maps some 1 of
    ``a`` onto ``cell``?  Restricting to the fresh cell keeps incremental
    avoidance checks cheap."""
    d = a.dimension
    ones = a.sorted_ones()
    for anchor in ones:
        # axis rows must place index number anchor[ax] at cell[ax]
        axis_rows: list[list[tuple[int, ...]]] = []
        feasible = True
        for ax in range(d):
            before = anchor[ax] - 1
            after = a.dims[ax] - anchor[ax]
            lows = list(itertools.combinations(range(1, cell[ax]), before))
            highs = list(itertools.combinations(range(cell[ax] + 1, dims[ax] + 1), after))
            if not lows or not highs:
                feasible = False
                break
            axis_rows.append([lo + (cell[ax],) + hi for lo in lows for hi in highs])
        if not feasible:
            continue
        for rows in itertools.product(*axis_rows):
            if all(tuple(rows[ax][c[ax] - 1] for ax in range(d)) in host_ones
                   for c in ones):
                return True
    return False


def extremal_weight(m: int, a: Pattern, max_cells: int = DEFAULT_CELL_BUDGET) -> tuple[int, Pattern]:
    """Exact maximum weight of an m x ... x m host avoiding ``a``, with a
    witness host attaining it.

    Branch and bound over cells in lexicographic order, trying 1 before
    0, pruning on certain containment and on remaining capacity.  The
    first host attaining the final maximum is returned; by the search
    order it is the one whose sorted 1-cell list is lexicographically
    smallest among all maximum-weight avoiders.
    """
    if a.weight == 0:
        raise DomainError("weight-0 patterns are rejected as avoidance targets")
    if m < 1:
        raise DomainError("host side must be positive")
    d = a.dimension
    cells = m ** d
    if cells > max_cells:
        raise BudgetExceeded(f"host has {cells} > {max_cells} cells")
    cell_list = list(itertools.product(*(range(1, m + 1) for _ in range(d))))
    dims = (m,) * d
    best = -1
    best_ones: frozenset = frozenset()
    ones: set = set()

    def rec(t: int) -> None:
        nonlocal best, best_ones
        if len(ones) + (cells - t) <= best:
            return
        if t == cells:
            if len(ones) > best:
                best = len(ones)
                best_ones = frozenset(ones)
            return
        cell = cell_list[t]
        ones.add(cell)
        if not _contains_using_cell(ones, dims, a, cell):
            rec(t + 1)
        ones.discard(cell)
        rec(t + 1)

    rec(0)
    return best, Pattern(dims, best_ones)


# -- file format -----------------------------------------------------------


def pattern_to_doc(a: Pattern) -> dict:
    return {"dims": list(a.dims), "ones": [list(c) for c in a.sorted_ones()]}


def pattern_from_doc(doc: dict) -> Pattern:
    return Pattern(tuple(int(m) for m in doc["dims"]),
                   frozenset(tuple(int(c) for c in cell) for cell in doc["ones"]))


def save_pattern(path, a: Pattern) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pattern_to_doc(a), fh, sort_keys=True)
        fh.write("\n")


def load_pattern(path) -> Pattern:
    with open(path, "r", encoding="utf-8") as fh:
        return pattern_from_doc(json.load(fh))


def parse_inline_pattern(dims: str, ones: str) -> Pattern:
    """CLI inline syntax: --dims "3,3" --ones "1,2;2,3;3,1"."""
    dim_tuple = tuple(int(t) for t in dims.split(",") if t.strip())
    cells = frozenset(tuple(int(t) for t in group.split(","))
                      for group in ones.split(";") if group.strip())
    return Pattern(dim_tuple, cells)
