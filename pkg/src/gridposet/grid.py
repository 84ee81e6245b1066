"""The grid poset [k1] x ... x [kn] under pointwise order.

Points carry 1-based coordinates and are encoded as mixed-radix indices
(first axis most significant, coordinate 1 maps to digit 0), so index
order coincides with lexicographic order on coordinates and iteration is
deterministic everywhere.

Level sizes |A_i| (points of coordinate sum n+i) come from convolving the
polynomials 1 + x + ... + x^(k_i - 1) with exact big integers; the width
of the grid equals the largest level size because grids satisfy the
normalized matching property (the tests certify this against a Dilworth
oracle on every small shape rather than trusting the formula blindly).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, DomainError, ShapeMismatch
from .poset import Poset, poset_from_less


@dataclass(frozen=True)
class GridShape:
    """Side lengths k_1, ..., k_n of a grid."""

    sides: tuple[int, ...]

    def __post_init__(self):
        if len(self.sides) < 1:
            raise DomainError("grid needs at least one axis")
        if any(k < 1 for k in self.sides):
            raise DomainError("grid sides must be positive")
        object.__setattr__(self, "sides", tuple(int(k) for k in self.sides))

    @staticmethod
    def uniform(k: int, n: int) -> "GridShape":
        if n < 1:
            raise DomainError("grid needs at least one axis")
        return GridShape((k,) * n)

    @property
    def n(self) -> int:
        return len(self.sides)

    @property
    def size(self) -> int:
        out = 1
        for k in self.sides:
            out *= k
        return out

    @property
    def num_levels(self) -> int:
        """Top rank N = sum(k_i - 1); levels are 0..N."""
        return sum(k - 1 for k in self.sides)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.sides)) == 1

    def strides(self) -> tuple[int, ...]:
        out = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            out[i] = out[i + 1] * self.sides[i + 1]
        return tuple(out)

    def point_to_index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.n:
            raise ShapeMismatch("coordinate count does not match shape")
        idx = 0
        for a, k, s in zip(coords, self.sides, self.strides()):
            if not 1 <= a <= k:
                raise DomainError(f"coordinate {a} out of range 1..{k}")
            idx += (a - 1) * s
        return idx

    def index_to_point(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.size:
            raise DomainError("point index out of range")
        coords = []
        for s in self.strides():
            d, idx = divmod(idx, s)
            coords.append(d + 1)
        return tuple(coords)

    def iter_points(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(1, k + 1) for k in self.sides))


class Comparison(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def compare(shape: GridShape, p: Sequence[int], q: Sequence[int]) -> Comparison:
    """Pointwise-order verdict for two points of the same shape."""
    if len(p) != shape.n or len(q) != shape.n:
        raise ShapeMismatch("points do not belong to this shape")
    le = all(a <= b for a, b in zip(p, q))
    ge = all(a >= b for a, b in zip(p, q))
    if le and ge:
        return Comparison.EQUAL
    if le:
        return Comparison.LESS
    if ge:
        return Comparison.GREATER
    return Comparison.INCOMPARABLE


def rank(shape: GridShape, p: Sequence[int]) -> int:
    """Rank of a point: coordinate sum minus n (bottom has rank 0)."""
    if len(p) != shape.n:
        raise ShapeMismatch("point does not belong to this shape")
    return sum(p) - shape.n


@lru_cache(maxsize=8)
def _digit_table(shape: GridShape) -> list[tuple[int, ...]]:
    """0-based digit tuples for every index, in index order."""
    return list(itertools.product(*(range(k) for k in shape.sides)))


@lru_cache(maxsize=8)
def _rank_table(shape: GridShape) -> list[int]:
    return [sum(d) for d in _digit_table(shape)]


def digits_of(shape: GridShape) -> list[tuple[int, ...]]:
    return _digit_table(shape)


def ranks_of(shape: GridShape) -> list[int]:
    return _rank_table(shape)


def index_leq(shape: GridShape, a: int, b: int) -> bool:
    """Pointwise <= on encoded points."""
    da = _digit_table(shape)[a]
    db = _digit_table(shape)[b]
    return all(x <= y for x, y in zip(da, db))


@dataclass(frozen=True)
class LevelProfile:
    """Exact level sizes of a grid plus the width they determine."""

    sizes: tuple[int, ...]
    width: int
    width_rank: int


@lru_cache(maxsize=256)
def level_profile(shape: GridShape) -> LevelProfile:
    """Level sizes by polynomial convolution, exact integers.

    Asserts the structural invariants (sum, rank symmetry, unimodality)
    that the chain machinery later relies on.
    """
    poly = [1]
    for k in shape.sides:
        out = [0] * (len(poly) + k - 1)
        for i, c in enumerate(poly):
            for j in range(k):
                out[i + j] += c
        poly = out
    sizes = tuple(poly)
    width = max(sizes)
    width_rank = sizes.index(width)
    if sum(sizes) != shape.size:
        raise AssertionError("level sizes do not sum to the grid size")
    if sizes != sizes[::-1]:
        raise AssertionError("level sizes are not rank-symmetric")
    for i in range(width_rank):
        if sizes[i] > sizes[i + 1]:
            raise AssertionError("level sizes are not unimodal")
    return LevelProfile(sizes, width, width_rank)


def width_grid(shape: GridShape) -> int:
    """Width of the grid = largest level size."""
    return level_profile(shape).width


def theta_ratio(k: int, n: int) -> Fraction:
    """Diagnostic ratio w^2 * n / k^(2n-2), exact.

    The width of [k]^n grows like k^(n-1)/sqrt(n); squaring keeps the
    diagnostic rational.  Bounded above and below over a sweep of (k, n)
    iff the growth estimate holds with bounded constants.
    """
    if k < 2:
        raise DomainError("theta_ratio needs k >= 2")
    w = width_grid(GridShape.uniform(k, n))
    return Fraction(w * w * n, k ** (2 * n - 2))


@dataclass(frozen=True)
class Factorization:
    """Splitting of [k]^n into consecutive coordinate blocks."""

    shape: GridShape
    shapes: tuple[GridShape, ...]
    slices: tuple[tuple[int, int], ...]

    def split_point(self, coords: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(coords[a:b]) for a, b in self.slices)

    def join_point(self, parts: Sequence[Sequence[int]]) -> tuple[int, ...]:
        out: list[int] = []
        for part in parts:
            out.extend(part)
        return tuple(out)

    def split_index(self, idx: int) -> tuple[int, ...]:
        point = self.shape.index_to_point(idx)
        return tuple(s.point_to_index(part)
                     for s, part in zip(self.shapes, self.split_point(point)))

    def join_index(self, part_indices: Sequence[int]) -> int:
        parts = [s.index_to_point(i) for s, i in zip(self.shapes, part_indices)]
        return self.shape.point_to_index(self.join_point(parts))


def factor(shape: GridShape, d: int) -> Factorization:
    """Split [k]^n into d grids [k]^(n_i), n_i in {floor(n/d), ceil(n/d)},
    larger parts first, with the coordinate-block bijection exposed."""
    if not shape.is_uniform:
        raise DomainError("factor is defined for uniform shapes [k]^n only")
    n = shape.n
    if not 1 <= d <= n:
        raise DomainError(f"cannot factor n={n} axes into d={d} parts")
    q, r = divmod(n, d)
    parts = [q + 1] * r + [q] * (d - r)
    k = shape.sides[0]
    shapes = tuple(GridShape.uniform(k, ni) for ni in parts)
    slices = []
    start = 0
    for ni in parts:
        slices.append((start, start + ni))
        start += ni
    return Factorization(shape, shapes, tuple(slices))


def check_normalized_matching(shape: GridShape, i: int, j: int,
                              max_level: int = 15) -> bool:
    """Exhaustive normalized-matching check between levels i and j.

    For every X inside level A_i the fraction |X|/|A_i| must not exceed
    |G(X)|/|A_j|, where G(X) collects the A_j elements comparable to some
    member of X.  Exhaustive over subsets of A_i, so |A_i| is budgeted.
    """
    N = shape.num_levels
    if not (0 <= i <= N and 0 <= j <= N):
        raise DomainError("level index out of range")
    ranks = _rank_table(shape)
    digits = _digit_table(shape)
    level_i = [t for t in range(shape.size) if ranks[t] == i]
    level_j = [t for t in range(shape.size) if ranks[t] == j]
    if len(level_i) > max_level:
        raise BudgetExceeded(f"level has {len(level_i)} > {max_level} elements")
    ai, aj = len(level_i), len(level_j)
    # neighbor mask inside A_j for each element of A_i
    nbr = []
    for a in level_i:
        da = digits[a]
        m = 0
        for t, b in enumerate(level_j):
            db = digits[b]
            if all(x <= y for x, y in zip(da, db)) or all(x >= y for x, y in zip(da, db)):
                m |= 1 << t
        nbr.append(m)
    for mask in range(1, 1 << ai):
        gamma = 0
        x = mask
        while x:
            t = (x & -x).bit_length() - 1
            gamma |= nbr[t]
            x &= x - 1
        if mask.bit_count() * aj > gamma.bit_count() * ai:
            return False
    return True


# -- subsets -----------------------------------------------------------


class Subset:
    """Compact bit-indexed subset of a grid."""

    __slots__ = ("shape", "mask", "_count")

    def __init__(self, shape: GridShape, mask: int):
        if mask < 0 or mask >> shape.size:
            raise DomainError("subset mask has bits outside the grid")
        self.shape = shape
        self.mask = mask
        self._count = mask.bit_count()

    @staticmethod
    def from_indices(shape: GridShape, indices: Iterable[int]) -> "Subset":
        mask = 0
        for i in indices:
            if not 0 <= i < shape.size:
                raise DomainError(f"point index {i} out of range")
            mask |= 1 << i
        return Subset(shape, mask)

    @staticmethod
    def from_points(shape: GridShape, points: Iterable[Sequence[int]]) -> "Subset":
        return Subset.from_indices(shape, (shape.point_to_index(p) for p in points))

    @staticmethod
    def full(shape: GridShape) -> "Subset":
        return Subset(shape, (1 << shape.size) - 1)

    def __len__(self) -> int:
        return self._count

    def __contains__(self, idx: int) -> bool:
        return bool(self.mask >> idx & 1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subset) and self.shape == other.shape
                and self.mask == other.mask)

    def __hash__(self) -> int:
        return hash((self.shape, self.mask))

    def indices(self) -> list[int]:
        out = []
        m = self.mask
        while m:
            out.append((m & -m).bit_length() - 1)
            m &= m - 1
        return out

    def points(self) -> list[tuple[int, ...]]:
        return [self.shape.index_to_point(i) for i in self.indices()]

    def is_antichain(self) -> bool:
        digits = _digit_table(self.shape)
        members = self.indices()
        ranks = _rank_table(self.shape)
        if len({ranks[i] for i in members}) <= 1:
            return True  # single level is always an antichain
        for a in range(len(members)):
            da = digits[members[a]]
            for b in range(a + 1, len(members)):
                db = digits[members[b]]
                if all(x <= y for x, y in zip(da, db)) or all(x >= y for x, y in zip(da, db)):
                    return False
        return True

    def __repr__(self) -> str:
        return f"Subset(sides={self.shape.sides}, count={len(self)})"


def materialize_poset(shape: GridShape) -> Poset:
    """The grid as an abstract Poset (for oracle-scale cross-checks)."""
    digits = _digit_table(shape)

    def less(i: int, j: int) -> bool:
        di, dj = digits[i], digits[j]
        return di != dj and all(x <= y for x, y in zip(di, dj))

    return poset_from_less(shape.size, less)


# -- subset file format --------------------------------------------------


def subset_to_doc(s: Subset) -> dict:
    return {"sides": list(s.shape.sides), "indices": s.indices()}


def subset_from_doc(doc: dict) -> Subset:
    shape = GridShape(tuple(int(k) for k in doc["sides"]))
    return Subset.from_indices(shape, (int(i) for i in doc["indices"]))


def save_subset(path, s: Subset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(subset_to_doc(s), fh, sort_keys=True)
        fh.write("\n")


def load_subset(path) -> Subset:
    with open(path, "r", encoding="utf-8") as fh:
        return subset_from_doc(json.load(fh))
