"""Lubell mass of grid subsets and the log-k constructions.

The Lubell mass of S inside a graded poset with levels A_0..A_N is
sum_i |S n A_i| / |A_i|, kept as an exact rational throughout.  Every
level is an antichain, so |S| / width <= mass(S) always (checked on
every report), and the LYM property of grids says every antichain has
mass at most 1.

``claim1_construct`` builds the nested-antichain witness showing that
K-free subsets (K: three elements with a single comparable pair a < b)
can have mass growing like log k: stack the middle level of each dyadic
coordinate block [2^i, 2^(i+1))^n; distinct blocks are totally ordered,
so no induced copy of K fits, while each block contributes mass bounded
away from zero.

``claim2_blocks`` reports the dyadic level-block decomposition of the
lower half of the grid used to bound the mass of any P-free set by a
multiple of log k, with the two per-block inequalities it relies on
checked exactly: |A_(2^i - n)| >= (2^i / 2n^2)^(n-1) and
|A_(r - n)| <= binom(r, n-1).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, NotAntichain, NotPFree
from .extremal import is_p_free
from .grid import GridShape, Subset, level_profile, ranks_of, width_grid
from .poset import Poset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelMass:
    level: int
    count: int
    level_size: int
    mass: Fraction


@dataclass(frozen=True)
class BlockMass:
    label: str
    mass: Fraction


@dataclass(frozen=True)
class MassReport:
    total: Fraction
    per_level: tuple[LevelMass, ...]
    per_block: Optional[tuple[BlockMass, ...]] = None


def lubell_mass(s: Subset, blocks: Optional[Sequence[tuple[str, Subset]]] = None) -> MassReport:
    """Exact Lubell mass with a per-level breakdown.

    Optional ``blocks`` (label, subset) pairs add per-block masses of the
    intersections S n block.  The trivial inequality |S|/w <= mass is
    asserted; a violation would mean the level bookkeeping is broken.
    """
    shape = s.shape
    sizes = level_profile(shape).sizes
    ranks = ranks_of(shape)
    counts: dict[int, int] = {}
    for i in s.indices():
        counts[ranks[i]] = counts.get(ranks[i], 0) + 1
    per_level = tuple(
        LevelMass(level, counts[level], sizes[level],
                  Fraction(counts[level], sizes[level]))
        for level in sorted(counts)
    )
    total = sum((lm.mass for lm in per_level), Fraction(0))
    if len(s) * 1 > total * width_grid(shape):
        raise AssertionError("trivial inequality |S|/w <= mass violated: bug")
    per_block = None
    if blocks is not None:
        per_block = tuple(
            BlockMass(label, lubell_mass(Subset(shape, s.mask & b.mask)).total)
            for label, b in blocks
        )
    return MassReport(total=total, per_level=per_level, per_block=per_block)


def chain_mass_formula(k: int) -> Fraction:
    """Mass of a maximal chain of [k]^2: 1/k + 2 * H_(k-1), exact."""
    if k < 1:
        raise DomainError("k must be positive")
    harmonic = sum((Fraction(1, i) for i in range(1, k)), Fraction(0))
    return Fraction(1, k) + 2 * harmonic


def lym_check(s: Subset) -> bool:
    """Mass of an antichain must be at most 1.  A False return would mean
    the level machinery is broken, so it is logged loudly as well."""
    if not s.is_antichain():
        raise NotAntichain("lym_check requires an antichain")
    total = lubell_mass(s).total
    if total > 1:
        log.error("LYM violated on %r: mass %s > 1; this indicates a bug", s, total)
        return False
    return True


# -- the K-free log-k construction -------------------------------------------


@dataclass(frozen=True)
class Claim1Block:
    index: int
    coord_lo: int       # block coordinates live in [coord_lo, coord_hi)
    coord_hi: int
    target_sum: int
    level: int
    count: int
    level_size: int


@dataclass(frozen=True)
class Claim1Result:
    shape: GridShape
    subset: Subset
    blocks: tuple[Claim1Block, ...]

    def block_subsets(self) -> list[tuple[str, Subset]]:
        out = []
        for b in self.blocks:
            pts = [p for p in itertools.product(range(b.coord_lo, b.coord_hi),
                                                repeat=self.shape.n)
                   if sum(p) == b.target_sum]
            out.append((f"B{b.index}", Subset.from_points(self.shape, pts)))
        return out


def claim1_construct(k: int, n: int) -> Claim1Result:
    """Union of middle levels of the dyadic blocks [2^i, 2^(i+1))^n for
    i = 0 .. floor(log2 k) - 2; K-free with mass one summand per block."""
    if n < 2 or k < 2:
        raise DomainError("construction needs k >= 2 and n >= 2")
    shape = GridShape.uniform(k, n)
    sizes = level_profile(shape).sizes
    s_blocks = k.bit_length() - 1 - 1  # floor(log2 k) - 1
    blocks = []
    points: list[tuple[int, ...]] = []
    for i in range(s_blocks):
        lo, hi = 1 << i, 1 << (i + 1)
        target = (3 * (1 << i) - 1) * n // 2
        members = [p for p in itertools.product(range(lo, hi), repeat=n)
                   if sum(p) == target]
        points.extend(members)
        level = target - n
        blocks.append(Claim1Block(index=i, coord_lo=lo, coord_hi=hi,
                                  target_sum=target, level=level,
                                  count=len(members), level_size=sizes[level]))
    subset = Subset.from_points(shape, points)
    return Claim1Result(shape=shape, subset=subset, blocks=tuple(blocks))


# -- dyadic level blocks of the lower half ------------------------------------


@dataclass(frozen=True)
class Claim2Block:
    index: int
    sum_lo: int          # nominal coordinate-sum range [sum_lo, sum_hi]
    sum_hi: int
    level_lo: Optional[int]   # clamped level range; None when empty
    level_hi: Optional[int]
    size: int
    empty: bool
    clipped: bool        # nominal bottom 2^i lies below the minimum sum n
    bottom_level_size: Optional[int]
    bottom_bound_ok: Optional[bool]
    top_level_size: Optional[int]
    top_binom: Optional[int]
    top_bound_ok: Optional[bool]
    mass: Optional[Fraction] = None


@dataclass(frozen=True)
class Claim2Report:
    k: int
    n: int
    qminus_size: int
    qminus_max_sum: int
    s: int
    blocks: tuple[Claim2Block, ...]
    uncovered_sums: tuple[int, int]


def claim2_blocks(k: int, n: int, subset: Optional[Subset] = None) -> Claim2Report:
    """Dyadic blocks C_i = {points with 2^i <= coordinate sum < 2^(i+1)}
    of the lower half of [k]^n, reported as level ranges with exact
    per-block inequality checks.  Degenerate blocks (below the minimum
    coordinate sum n) are reported explicitly and carry no checks."""
    if n < 2 or k < 2:
        raise DomainError("block report needs k >= 2 and n >= 2")
    shape = GridShape.uniform(k, n)
    sizes = level_profile(shape).sizes
    qmax = (k + 1) * n // 2  # largest coordinate sum in the lower half
    qminus_size = sum(sizes[lev] for lev in range(0, qmax - n + 1))
    # floor(log2((k+1)n/2)) computed exactly: (k+1)n/2 may be half-integral
    s = _floor_log2_half((k + 1) * n)
    mass_by_level = None
    if subset is not None:
        if subset.shape != shape:
            raise DomainError("subset shape does not match (k, n)")
        ranks = ranks_of(shape)
        mass_by_level = {}
        for i in subset.indices():
            mass_by_level[ranks[i]] = mass_by_level.get(ranks[i], 0) + 1
    blocks = []
    for i in range(s):
        lo, hi_excl = 1 << i, 1 << (i + 1)
        sum_hi = min(hi_excl - 1, qmax)
        clipped = lo < n
        level_lo = max(lo, n) - n
        level_hi = sum_hi - n
        empty = level_hi < level_lo
        size = 0 if empty else sum(sizes[lev] for lev in range(level_lo, level_hi + 1))
        bottom_size = bottom_ok = top_size = top_binom = top_ok = None
        if not clipped and not empty:
            bottom_size = sizes[lo - n]
            # |A_(2^i - n)| >= (2^i / 2n^2)^(n-1), cleared of denominators
            bottom_ok = bottom_size * (2 * n * n) ** (n - 1) >= (1 << (i * (n - 1)))
            r = min(hi_excl - 1, qmax)
            top_size = sizes[r - n]
            top_binom = math.comb(r, n - 1)
            top_ok = top_size <= top_binom
        mass = None
        if mass_by_level is not None and not empty:
            mass = sum((Fraction(mass_by_level.get(lev, 0), sizes[lev])
                        for lev in range(level_lo, level_hi + 1)), Fraction(0))
        blocks.append(Claim2Block(index=i, sum_lo=lo, sum_hi=sum_hi,
                                  level_lo=None if empty else level_lo,
                                  level_hi=None if empty else level_hi,
                                  size=size, empty=empty, clipped=clipped,
                                  bottom_level_size=bottom_size,
                                  bottom_bound_ok=bottom_ok,
                                  top_level_size=top_size,
                                  top_binom=top_binom,
                                  top_bound_ok=top_ok,
                                  mass=mass))
    return Claim2Report(k=k, n=n, qminus_size=qminus_size, qminus_max_sum=qmax,
                        s=s, blocks=tuple(blocks),
                        uncovered_sums=(1 << s, qmax))


def _floor_log2_half(twice: int) -> int:
    """floor(log2(twice / 2)) for a positive integer ``twice``, exact."""
    if twice < 2:
        raise DomainError("value must be at least 1")
    return (twice // 2).bit_length() - 1 if twice % 2 == 0 else _floor_log2_odd(twice)


def _floor_log2_odd(twice: int) -> int:
    # twice/2 = m + 1/2 with m = twice // 2; floor(log2(m + 1/2)) equals
    # floor(log2 m) except when m = 0 (value 1/2 -> -1, outside our use)
    m = twice // 2
    if m == 0:
        raise DomainError("value below 1 has no usable dyadic index")
    return m.bit_length() - 1


# -- conjecture explorer -------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    mass: Fraction
    log2_k: object       # int when k is a power of two, float otherwise
    ratio: object        # Fraction when exact, float otherwise
    exact: bool


def conjecture_ratio(p: Poset, k: int, n: int, s: Subset) -> RatioReport:
    """Mass of a P-free subset and its ratio to log2 k.

    The ratio is exact (a Fraction) when k is a power of two; otherwise
    it is a float and flagged as approximate.
    """
    if k < 2:
        raise DomainError("ratio needs k >= 2")
    shape = GridShape.uniform(k, n)
    if s.shape != shape:
        raise DomainError("subset does not live in [k]^n")
    if not is_p_free(s, p):
        raise NotPFree("subset contains an induced copy of the poset")
    mass = lubell_mass(s).total
    if k & (k - 1) == 0:
        e = k.bit_length() - 1
        return RatioReport(mass=mass, log2_k=e, ratio=mass / e, exact=True)
    approx = math.log2(k)
    return RatioReport(mass=mass, log2_k=approx, ratio=float(mass) / approx, exact=False)


# -- text export ---------------------------------------------------------------


def mass_report_to_text(report: MassReport) -> str:
    """Plain table: level, count, level size, contribution num/den."""
    lines = ["level\tcount\tlevel_size\tmass"]
    for lm in report.per_level:
        lines.append(f"{lm.level}\t{lm.count}\t{lm.level_size}\t"
                     f"{lm.mass.numerator}/{lm.mass.denominator}")
    lines.append(f"total\t\t\t{report.total.numerator}/{report.total.denominator}")
    if report.per_block is not None:
        for bm in report.per_block:
            lines.append(f"block {bm.label}\t\t\t{bm.mass.numerator}/{bm.mass.denominator}")
    return "\n".join(lines) + "\n"
