"""Integer partitions and Young-diagram combinatorics.

Partitions index both the spherical principal series of GL_n(F_q) and the
irreducible characters of S_n; the Kostka matrix ties the two together.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import accumulate
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import InvalidInputError, ResourceLimitError

logger = logging.getLogger(__name__)

DEFAULT_WEIGHT_CAP = 20


class DominanceRelation(str, Enum):
    """Outcome of comparing two partitions of the same weight."""

    STRICTLY_DOMINATES = "strictly-dominates"
    EQUAL = "equal"
    STRICTLY_DOMINATED = "strictly-dominated"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, order=False)
class Partition:
    """A weakly decreasing tuple of positive integers."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        for i, part in enumerate(parts):
            if part < 1:
                raise InvalidInputError(f"Partition parts must be positive: {parts}")
            if i and part > parts[i - 1]:
                raise InvalidInputError(
                    f"Partition parts must be weakly decreasing: {parts}"
                )
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "Partition":
        if not isinstance(data, (list, tuple)):
            raise InvalidInputError(f"Partition JSON must be an array, got {data!r}")
        return cls(tuple(data))

    def to_json(self) -> List[int]:
        return list(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def first_row(self) -> int:
        return self.parts[0] if self.parts else 0

    @property
    def first_row_multiplicity(self) -> int:
        """Number of rows equal to the first row (m_{d_1})."""
        return sum(1 for p in self.parts if p == self.first_row) if self.parts else 0

    def part(self, i: int) -> int:
        return self.parts[i] if i < len(self.parts) else 0

    def conjugate(self) -> "Partition":
        return Partition(
            tuple(sum(1 for p in self.parts if p > j) for j in range(self.first_row))
        )

    def contains(self, other: "Partition") -> bool:
        if other.length > self.length:
            return False
        return all(self.part(i) >= p for i, p in enumerate(other.parts))

    def prepend_row(self, row: int) -> "Partition":
        if row == 0:
            return self
        return Partition((row,) + self.parts)

    def flag_degree(self) -> int:
        """d_L = sum_{i<j} d_i d_j, the degree of the flag count."""
        total = self.weight
        return (total * total - sum(p * p for p in self.parts)) // 2

    def __str__(self) -> str:
        return "{" + ",".join(str(p) for p in self.parts) + "}"

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


EMPTY = Partition(())


def canonical_key(p: Partition) -> Tuple[int, ...]:
    """Sort key: descending dominance refined lexicographically."""
    return tuple(-x for x in p.parts)


def sort_canonical(partitions: Iterable[Partition]) -> List[Partition]:
    return sorted(partitions, key=canonical_key)


def _check_weight(n: int, cap: Optional[int]) -> None:
    if n < 0:
        raise InvalidInputError(f"Partition weight must be nonnegative, got {n}")
    limit = DEFAULT_WEIGHT_CAP if cap is None else cap
    if n > limit:
        raise ResourceLimitError("partition_weight", limit, n)


def partitions_of(n: int, cap: Optional[int] = None) -> List[Partition]:
    """All partitions of n in canonical order."""
    _check_weight(n, cap)
    return [Partition(p) for p in _generate(n, n)]


def _generate(n: int, largest: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _generate(n - first, first):
            yield (first,) + rest


def compare_dominance(a: Partition, b: Partition) -> DominanceRelation:
    """Compare two partitions of equal weight by prefix sums.

    Raises:
        InvalidInputError: If the weights differ
    """
    if a.weight != b.weight:
        raise InvalidInputError(
            f"Dominance needs equal weights: {a} has {a.weight}, {b} has {b.weight}"
        )
    if a == b:
        return DominanceRelation.EQUAL
    width = max(a.length, b.length)
    sums_a = list(accumulate(a.part(i) for i in range(width)))
    sums_b = list(accumulate(b.part(i) for i in range(width)))
    a_ge = all(x >= y for x, y in zip(sums_a, sums_b))
    b_ge = all(y >= x for x, y in zip(sums_a, sums_b))
    if a_ge:
        return DominanceRelation.STRICTLY_DOMINATES
    if b_ge:
        return DominanceRelation.STRICTLY_DOMINATED
    return DominanceRelation.INCOMPARABLE


def dominates_or_equal(a: Partition, b: Partition) -> bool:
    return compare_dominance(a, b) in (
        DominanceRelation.STRICTLY_DOMINATES,
        DominanceRelation.EQUAL,
    )


def is_skew_row(big: Partition, small: Partition) -> bool:
    """True iff big/small is a horizontal strip.

    Containment plus the interlacing big[i+1] <= small[i] is the same as
    every column of big being at most one box longer than in small.
    """
    if not big.contains(small):
        return False
    return all(big.part(i + 1) <= small.part(i) for i in range(big.length))


def pieri_expand(d: Partition, m: int) -> List[Partition]:
    """All D~ with D~/d a horizontal strip of m boxes, canonical order."""
    if m < 0:
        raise InvalidInputError(f"Pieri box count must be nonnegative, got {m}")
    results: List[Partition] = []
    rows = d.length + 1

    def place(i: int, remaining: int, acc: Tuple[int, ...]) -> None:
        if i == rows:
            if remaining == 0:
                results.append(Partition(tuple(x for x in acc if x > 0)))
            return
        base = d.part(i)
        ceiling = remaining if i == 0 else min(remaining, d.part(i - 1) - base)
        for extra in range(ceiling, -1, -1):
            place(i + 1, remaining - extra, acc + (base + extra,))

    place(0, m, ())
    return sort_canonical(set(results))


def remove_horizontal_strips(e: Partition, size: int) -> Iterator[Partition]:
    """All mu with e/mu a horizontal strip of the given size."""
    rows = e.length

    def walk(i: int, remaining: int, acc: Tuple[int, ...]) -> Iterator[Partition]:
        if i == rows:
            if remaining == 0:
                yield Partition(tuple(x for x in acc if x > 0))
            return
        top = e.part(i)
        floor = e.part(i + 1)
        for row in range(top, floor - 1, -1):
            taken = top - row
            if taken > remaining:
                break
            yield from walk(i + 1, remaining - taken, acc + (row,))

    yield from walk(0, size, ())


@lru_cache(maxsize=None)
def _kostka(shape: Tuple[int, ...], content: Tuple[int, ...]) -> int:
    if not content:
        return 1 if not shape else 0
    last = content[-1]
    total = 0
    for mu in remove_horizontal_strips(Partition(shape), last):
        total += _kostka(mu.parts, content[:-1])
    return total


def kostka(e: Partition, d: Partition) -> int:
    """Number of semistandard tableaux of shape e and content d.

    Raises:
        InvalidInputError: If the weights differ
    """
    if e.weight != d.weight:
        raise InvalidInputError(
            f"Kostka number needs equal weights: {e} has {e.weight}, {d} has {d.weight}"
        )
    return _kostka(e.parts, d.parts)


@dataclass(frozen=True)
class TransitionData:
    """Kostka matrix K and its inverse M over the partitions of n.

    ``kostka[(E, D)]`` is the multiplicity of the irreducible indexed by E
    inside the permutation module indexed by D; ``inverse`` satisfies
    rho_D = sum_{D'} inverse[(D', D)] I_{D'}.
    """

    n: int
    partitions: Tuple[Partition, ...]
    kostka: Dict[Tuple[Partition, Partition], int]
    inverse: Dict[Tuple[Partition, Partition], int]

    def kostka_row(self, e: Partition) -> List[int]:
        return [self.kostka[(e, d)] for d in self.partitions]

    def inverse_column(self, d: Partition) -> Dict[Partition, int]:
        return {
            dp: self.inverse[(dp, d)]
            for dp in self.partitions
            if self.inverse[(dp, d)] != 0
        }


@lru_cache(maxsize=32)
def _transition(n: int) -> TransitionData:
    parts = tuple(partitions_of(n, cap=n))
    size = len(parts)
    k = [[_kostka(parts[i].parts, parts[j].parts) for j in range(size)] for i in range(size)]
    # K is upper unitriangular in canonical order; back-substitute column by column.
    m = [[0] * size for _ in range(size)]
    for j in range(size):
        m[j][j] = 1
        for i in range(j - 1, -1, -1):
            m[i][j] = -sum(k[i][t] * m[t][j] for t in range(i + 1, j + 1))
    kostka_map = {(parts[i], parts[j]): k[i][j] for i in range(size) for j in range(size)}
    inverse_map = {(parts[i], parts[j]): m[i][j] for i in range(size) for j in range(size)}
    logger.debug(f"Built transition matrix for n={n} over {size} partitions")
    return TransitionData(n, parts, kostka_map, inverse_map)


def transition_matrix(n: int, cap: Optional[int] = None) -> TransitionData:
    """Kostka matrix and its integer inverse for all partitions of n.

    Raises:
        ResourceLimitError: If n exceeds the partition weight cap
    """
    if n < 0:
        raise InvalidInputError(f"Transition matrix needs n >= 0, got {n}")
    _check_weight(n, cap)
    return _transition(n)
