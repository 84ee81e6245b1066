"""Forbidden-induced-subposet machinery on grids.

``max_p_free`` is the exact oracle: the largest subset of a grid that
contains no induced copy of a pattern poset P.  All induced copies are
enumerated once (each is a constraint: a P-free set misses at least one
point of every copy), then the maximum is computed either by plain
branch and bound over points in rank-major order (small grids) or as an
integer program solved exactly by HiGHS via scipy.optimize.milp.  Both
engines return the same canonical witness: the inclusion vector that is
lexicographically greatest in the search order, recovered from the ILP
by greedy fixing.  Every result is re-checked for P-freeness before it
is returned.

``pipeline_bound`` runs the block-decomposition argument as an
algorithm: factor [k]^n into d = dim(P) coordinate blocks, take a
balanced chain partition of each factor, intersect them into blocks
(each a product of chains, hence order-isomorphic to a small
d-dimensional grid), cap each block either by the exact P-free maximum
of that small grid or by a supplied pattern constant, and sum the caps.
The result is a machine-checkable certificate whose total is a valid
upper bound for ``max_p_free``.

``max_l_chain_free`` is the exact maximum size of a subset with no chain
of l points: the sum of the l-1 largest level sizes.  On grids this is
exact, not just an upper bound: a symmetric chain decomposition gives
sum(min(|C|, l-1)) over chains, and symmetric saturated chains meet a
suitably centered window of l-1 levels in exactly min(|C|, l-1) points.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .chains import ChainPartition, balanced_partition, corollary_window, verify_partition
from .errors import BudgetExceeded, DomainError
from .grid import GridShape, Subset, digits_of, level_profile, ranks_of, width_grid
from .poset import (Poset, dimension, enumerate_induced_copy_sets,
                    find_induced_embedding, make_poset)

DEFAULT_POINT_BUDGET = 64
BRANCH_AND_BOUND_POINTS = 20
DEFAULT_COPY_NODES = 20_000_000


def _subset_order_rows(s: Subset) -> tuple[list[int], list[int], list[int]]:
    """Members of s plus bitmask rows of the induced grid order."""
    members = s.indices()
    digits = digits_of(s.shape)
    m = len(members)
    lt = [0] * m
    gt = [0] * m
    for a in range(m):
        da = digits[members[a]]
        for b in range(a + 1, m):
            db = digits[members[b]]
            if all(x <= y for x, y in zip(da, db)):
                lt[a] |= 1 << b
                gt[b] |= 1 << a
            elif all(x >= y for x, y in zip(da, db)):
                lt[b] |= 1 << a
                gt[a] |= 1 << b
    return members, lt, gt


def is_p_free(s: Subset, p: Poset, *, budget: int = DEFAULT_COPY_NODES) -> bool:
    """True iff no induced copy of p lives inside s under the grid order."""
    members, lt, gt = _subset_order_rows(s)
    return find_induced_embedding(len(members), lt, gt, p, budget=budget) is None


# -- exact maximum P-free subsets ------------------------------------------


def _grid_order_rows(shape: GridShape) -> tuple[list[int], list[int]]:
    digits = digits_of(shape)
    n = shape.size
    lt = [0] * n
    gt = [0] * n
    for a in range(n):
        da = digits[a]
        for b in range(a + 1, n):
            db = digits[b]
            if all(x <= y for x, y in zip(da, db)):
                lt[a] |= 1 << b
                gt[b] |= 1 << a
            elif all(x >= y for x, y in zip(da, db)):
                lt[b] |= 1 << a
                gt[a] |= 1 << b
    return lt, gt


def _search_order(shape: GridShape) -> list[int]:
    ranks = ranks_of(shape)
    return sorted(range(shape.size), key=lambda i: (ranks[i], i))


_MAX_FREE_MEMO: dict = {}


def max_p_free(shape: GridShape, p: Poset, *,
               max_points: int = DEFAULT_POINT_BUDGET,
               copy_budget: int = DEFAULT_COPY_NODES) -> tuple[int, Subset]:
    """Exact maximum size of a P-free subset of the grid, with witness.

    The witness is deterministic: the inclusion vector that is
    lexicographically greatest when points are visited in rank-major,
    then index, order (equivalently, the point set whose sorted list is
    lexicographically smallest among maximum P-free sets in that order).
    """
    size = shape.size
    if size > max_points:
        raise BudgetExceeded(f"grid has {size} > {max_points} points")
    memo_key = (shape.sides, p.lt)
    hit = _MAX_FREE_MEMO.get(memo_key)
    if hit is not None:
        value, indices = hit
        return value, Subset.from_indices(shape, indices)
    lt, gt = _grid_order_rows(shape)
    copies = enumerate_induced_copy_sets(size, lt, gt, p, budget=copy_budget)
    order = _search_order(shape)
    if not copies:
        value, chosen = size, list(range(size))
    elif size <= BRANCH_AND_BOUND_POINTS:
        value, chosen = _max_free_branch_bound(size, lt, gt, p, order)
    else:
        value, chosen = _max_free_milp(size, copies, p, order)
    witness = Subset.from_indices(shape, chosen)
    if len(witness) != value or not is_p_free(witness, p):
        raise AssertionError("max_p_free produced an invalid witness")
    _MAX_FREE_MEMO[memo_key] = (value, tuple(chosen))
    return value, witness


def _max_free_branch_bound(size: int, lt: Sequence[int], gt: Sequence[int],
                           p: Poset, order: Sequence[int]) -> tuple[int, list[int]]:
    best = -1
    best_set: list[int] = []
    chosen: list[int] = []

    def creates_copy(v: int) -> bool:
        # any new copy must use v
        members = chosen + [v]
        m = len(members)
        sub_lt = [0] * m
        sub_gt = [0] * m
        for a in range(m):
            for b in range(a + 1, m):
                u, w = members[a], members[b]
                if lt[u] >> w & 1:
                    sub_lt[a] |= 1 << b
                    sub_gt[b] |= 1 << a
                elif gt[u] >> w & 1:
                    sub_lt[b] |= 1 << a
                    sub_gt[a] |= 1 << b
        for e in range(p.n):
            if find_induced_embedding(m, sub_lt, sub_gt, p,
                                      require=(e, m - 1)) is not None:
                return True
        return False

    def rec(t: int) -> None:
        nonlocal best, best_set
        if len(chosen) + (size - t) <= best:
            return
        if t == size:
            if len(chosen) > best:
                best = len(chosen)
                best_set = list(chosen)
            return
        v = order[t]
        if not creates_copy(v):
            chosen.append(v)
            rec(t + 1)
            chosen.pop()
        rec(t + 1)

    rec(0)
    return best, sorted(best_set)


def _max_free_milp(size: int, copies: Sequence[frozenset], p: Poset,
                   order: Sequence[int]) -> tuple[int, list[int]]:
    """Exact optimum by integer programming, then the canonical witness.

    The witness is recovered by greedy fixing in the search order: point
    v joins iff some maximum P-free set contains v together with all
    previous fixings.  Each such question is a feasibility MILP (copy
    rows plus one cardinality row), so the answer is a mathematical fact
    about the instance and the witness does not depend on which optimal
    solution the solver happens to return; returned solutions are only
    used to skip probes whose feasibility they already witness.
    """
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix, vstack

    rows, cols = [], []
    for r, copy in enumerate(copies):
        for v in copy:
            rows.append(r)
            cols.append(v)
    A = csr_matrix(([1.0] * len(rows), (rows, cols)), shape=(len(copies), size))
    integrality = np.ones(size)

    res = milp(c=-np.ones(size), constraints=LinearConstraint(A, -np.inf, float(p.n - 1)),
               integrality=integrality, bounds=Bounds(np.zeros(size), np.ones(size)))
    if res.status != 0 or res.x is None:
        raise AssertionError("ILP solver failed on a feasible instance")
    total = round(-res.fun)
    adopted = np.round(res.x)

    # feasibility model: every copy misses a point and the total stays at
    # the optimum; probing x_v = 1 under accumulated fixings
    full = vstack([A, csr_matrix(np.ones((1, size)))]).tocsr()
    con_lb = np.concatenate([np.full(len(copies), -np.inf), [float(total)]])
    con_ub = np.concatenate([np.full(len(copies), float(p.n - 1)), [float(size)]])
    feas = LinearConstraint(full, con_lb, con_ub)
    zero_c = np.zeros(size)
    lb = np.zeros(size)
    ub = np.ones(size)
    for v in order:
        if adopted[v] == 1.0:
            lb[v] = 1.0  # current optimal solution witnesses this fixing
            continue
        lb[v] = 1.0
        probe = milp(c=zero_c, constraints=feas, integrality=integrality,
                     bounds=Bounds(lb, ub))
        if probe.status == 0 and probe.x is not None:
            adopted = np.round(probe.x)
        else:
            lb[v] = 0.0
            ub[v] = 0.0
    chosen = [v for v in range(size) if lb[v] == 1.0]
    if len(chosen) != total:
        raise AssertionError("greedy fixing lost the ILP optimum")
    return total, chosen


# -- chains of fixed length -------------------------------------------------


def max_l_chain_free(shape: GridShape, l: int) -> int:
    """Exact maximum size of a subset with no chain of l points: the sum
    of the l-1 largest level sizes."""
    if l < 2:
        raise DomainError("chain length l must be at least 2")
    sizes = sorted(level_profile(shape).sizes, reverse=True)
    return sum(sizes[:l - 1])


def erdos_bound(shape: GridShape, l: int) -> int:
    """The weaker classical bound (l-1) * width."""
    if l < 2:
        raise DomainError("chain length l must be at least 2")
    return (l - 1) * width_grid(shape)


# -- the block-decomposition bound pipeline ----------------------------------


@dataclass(frozen=True)
class FactorPart:
    """One factor [k]^(n_i) with its balanced chain partition."""

    sides: tuple[int, ...]
    width: int
    low: int
    high: int
    chains: tuple[tuple[int, ...], ...]

    @property
    def target_fraction(self) -> Fraction:
        """The ideal lower chain length k^(n_i) / (4 w_i)."""
        total = 1
        for k in self.sides:
            total *= k
        return Fraction(total, 4 * self.width)


@dataclass(frozen=True)
class BlockCap:
    j: tuple[int, ...]
    sizes: tuple[int, ...]
    cap: int
    method: str


@dataclass(frozen=True)
class BoundCertificate:
    """Machine-checkable record of a block-decomposition upper bound."""

    sides: tuple[int, ...]
    poset_size: int
    poset_covers: tuple[tuple[int, int], ...]
    dim: int
    cap_mode: str
    c_p: Optional[int]
    factors: tuple[FactorPart, ...]
    blocks: tuple[BlockCap, ...]
    total: int

    @property
    def shape(self) -> GridShape:
        return GridShape(self.sides)

    def poset(self) -> Poset:
        return make_poset(self.poset_size, self.poset_covers)


def pipeline_bound(shape: GridShape, p: Poset, cap_mode: str = "exact-search",
                   c_p: Optional[int] = None, *,
                   max_block_points: int = DEFAULT_POINT_BUDGET,
                   dimension_budget: int = 10) -> BoundCertificate:
    """Upper bound on max_p_free by factoring, partitioning, and capping.

    With ``cap_mode='exact-search'`` every block (order-isomorphic to the
    d-dimensional grid of its chain lengths) is capped by the exact
    P-free maximum of that grid; with ``cap_mode='pattern-cap'`` the cap
    is min(block size, floor(c_p * s^(d-1))) for block max side s, with
    the constant c_p supplied by the caller.
    """
    if not shape.is_uniform:
        raise DomainError("pipeline_bound is defined for uniform [k]^n")
    if cap_mode not in ("exact-search", "pattern-cap"):
        raise DomainError(f"unknown cap_mode {cap_mode!r}")
    if cap_mode == "pattern-cap":
        if c_p is None or c_p < 1:
            raise DomainError("pattern-cap mode needs a positive constant c_p")
    d, _ = dimension(p, max_size=dimension_budget)
    n = shape.n
    if n < d:
        raise DomainError(f"need n >= dim P ({n} < {d})")

    from .grid import factor

    fact = factor(shape, d)
    parts = []
    for fshape in fact.shapes:
        bp = balanced_partition(fshape)
        low, high = corollary_window(fshape)
        parts.append(FactorPart(sides=fshape.sides, width=width_grid(fshape),
                                low=low, high=high, chains=bp.chains))

    cap_memo: dict[tuple[int, ...], int] = {}

    def exact_cap(sizes: tuple[int, ...]) -> int:
        key = tuple(sorted(sizes, reverse=True))
        if key not in cap_memo:
            value, _ = max_p_free(GridShape(key), p, max_points=max_block_points)
            cap_memo[key] = value
        return cap_memo[key]

    blocks = []
    total = 0
    for j in itertools.product(*(range(len(part.chains)) for part in parts)):
        sizes = tuple(len(parts[i].chains[ji]) for i, ji in enumerate(j))
        block_size = 1
        for s in sizes:
            block_size *= s
        if cap_mode == "exact-search":
            cap = exact_cap(sizes)
        else:
            cap = min(block_size, c_p * max(sizes) ** (d - 1))
        blocks.append(BlockCap(j=j, sizes=sizes, cap=cap, method=cap_mode))
        total += cap

    return BoundCertificate(
        sides=shape.sides,
        poset_size=p.n,
        poset_covers=tuple(p.cover_pairs()),
        dim=d,
        cap_mode=cap_mode,
        c_p=c_p,
        factors=tuple(parts),
        blocks=tuple(blocks),
        total=total,
    )


@dataclass
class CertReport:
    """Structural re-verification of a stored certificate (no searches)."""

    factors_ok: bool
    blocks_ok: bool
    caps_ok: bool
    total_ok: bool
    problems: list[str]

    @property
    def ok(self) -> bool:
        return self.factors_ok and self.blocks_ok and self.caps_ok and self.total_ok


def verify_certificate(cert: BoundCertificate) -> CertReport:
    problems: list[str] = []
    factors_ok = True
    blocks_ok = True
    caps_ok = True

    if sum(len(f.sides) for f in cert.factors) != len(cert.sides):
        factors_ok = False
        problems.append("factor axis counts do not sum to n")
    n = len(cert.sides)
    d = cert.dim
    lo, hi = n // d, -(-n // d)
    for f in cert.factors:
        if not lo <= len(f.sides) <= hi:
            factors_ok = False
            problems.append(f"factor {f.sides} has unbalanced axis count")
        fshape = GridShape(f.sides)
        if f.width != width_grid(fshape):
            factors_ok = False
            problems.append(f"factor {f.sides} stores a wrong width")
        wlow, whigh = corollary_window(fshape)
        if (f.low, f.high) != (wlow, whigh):
            factors_ok = False
            problems.append(f"factor {f.sides} stores a wrong window")
        report = verify_partition(fshape, ChainPartition(fshape, f.chains), f.low, f.high)
        if not report.ok:
            factors_ok = False
            problems.append(f"factor {f.sides} partition fails verification")

    expected = set(itertools.product(*(range(len(f.chains)) for f in cert.factors)))
    seen = set()
    total_points = 0
    total_caps = 0
    for b in cert.blocks:
        if b.j in seen:
            blocks_ok = False
            problems.append(f"block {b.j} listed twice")
        seen.add(b.j)
        if b.j not in expected:
            blocks_ok = False
            problems.append(f"block {b.j} does not correspond to chain indices")
            continue
        sizes = tuple(len(cert.factors[i].chains[ji]) for i, ji in enumerate(b.j))
        if sizes != b.sizes:
            blocks_ok = False
            problems.append(f"block {b.j} stores wrong chain sizes")
        block_size = 1
        for s in sizes:
            block_size *= s
        total_points += block_size
        if b.cap < 0 or (b.method == "exact-search" and b.cap > block_size):
            caps_ok = False
            problems.append(f"block {b.j} cap out of range")
        if b.method == "pattern-cap":
            if cert.c_p is None:
                caps_ok = False
                problems.append("pattern-cap block without stored c_p")
            elif b.cap != min(block_size, cert.c_p * max(sizes) ** (d - 1)):
                caps_ok = False
                problems.append(f"block {b.j} cap does not match the formula")
        total_caps += b.cap
    if seen != expected:
        blocks_ok = False
        problems.append("blocks do not enumerate every chain-index tuple")
    grid_size = 1
    for k in cert.sides:
        grid_size *= k
    if total_points != grid_size:
        blocks_ok = False
        problems.append("block sizes do not sum to the grid size")
    total_ok = total_caps == cert.total
    if not total_ok:
        problems.append("stored total differs from the sum of caps")
    return CertReport(factors_ok, blocks_ok, caps_ok, total_ok, problems)


# -- certificate file format --------------------------------------------------


def certificate_to_doc(cert: BoundCertificate) -> dict:
    return {
        "kind": "bound-certificate",
        "sides": list(cert.sides),
        "poset": {"size": cert.poset_size,
                  "covers": [list(c) for c in cert.poset_covers]},
        "dim": cert.dim,
        "cap_mode": cert.cap_mode,
        "c_p": cert.c_p,
        "factors": [
            {"sides": list(f.sides), "width": f.width, "low": f.low,
             "high": f.high, "chains": [list(c) for c in f.chains]}
            for f in cert.factors
        ],
        "blocks": [
            {"j": list(b.j), "sizes": list(b.sizes), "cap": b.cap, "method": b.method}
            for b in cert.blocks
        ],
        "total": cert.total,
    }


def certificate_from_doc(doc: dict) -> BoundCertificate:
    return BoundCertificate(
        sides=tuple(int(k) for k in doc["sides"]),
        poset_size=int(doc["poset"]["size"]),
        poset_covers=tuple(tuple(c) for c in doc["poset"]["covers"]),
        dim=int(doc["dim"]),
        cap_mode=doc["cap_mode"],
        c_p=doc["c_p"],
        factors=tuple(
            FactorPart(sides=tuple(f["sides"]), width=int(f["width"]),
                       low=int(f["low"]), high=int(f["high"]),
                       chains=tuple(tuple(int(i) for i in c) for c in f["chains"]))
            for f in doc["factors"]
        ),
        blocks=tuple(
            BlockCap(j=tuple(b["j"]), sizes=tuple(b["sizes"]),
                     cap=int(b["cap"]), method=b["method"])
            for b in doc["blocks"]
        ),
        total=int(doc["total"]),
    )


def save_certificate(path, cert: BoundCertificate) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(certificate_to_doc(cert), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_certificate(path) -> BoundCertificate:
    with open(path, "r", encoding="utf-8") as fh:
        return certificate_from_doc(json.load(fh))
