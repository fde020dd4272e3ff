"""S_n oracle on permutation matrices: Young modules, Kostka and Pieri checks.

sigma_D is recognised as the one constituent of the Young module Y_D that
occurs in no Y_{D'} with D' strictly dominating D.
"""

import logging
from collections import Counter
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..errors import InvalidInputError, VerificationError
from ..matgroup import GroupKind
from ..partitions import (
    DominanceRelation,
    Partition,
    compare_dominance,
    partitions_of,
)
from .dixon import CharacterTable

logger = logging.getLogger(__name__)


def cycle_type(matrix: np.ndarray) -> Partition:
    """Cycle type of the permutation whose matrix sends e_i to e_{perm[i]}."""
    perm = [int(np.argmax(matrix[:, i])) for i in range(matrix.shape[0])]
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return Partition(tuple(sorted(lengths, reverse=True)))


def centralizer_order(mu: Partition) -> int:
    """z_mu = prod_i i^{m_i} m_i!."""
    result = 1
    for part, mult in Counter(mu.parts).items():
        result *= part**mult * factorial(mult)
    return result


@lru_cache(maxsize=None)
def _young(rows: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not any(rows) else 0
    head, rest = cycles[0], cycles[1:]
    total = 0
    for i, room in enumerate(rows):
        if room >= head:
            total += _young(rows[:i] + (room - head,) + rows[i + 1 :], rest)
    return total


def young_character(d: Partition, mu: Partition) -> int:
    """Permutation character of Y_D at a permutation of cycle type mu."""
    if d.weight != mu.weight:
        raise InvalidInputError(f"{d} and {mu} have different weights")
    return _young(d.parts, mu.parts)


def _check_symmetric(ct: CharacterTable) -> None:
    if ct.group.kind != GroupKind.SYM:
        raise InvalidInputError(f"Expected a symmetric group table, got {ct.group.kind.value}")


def class_cycle_types(ct: CharacterTable) -> List[Partition]:
    _check_symmetric(ct)
    return [cycle_type(ct.group.matrices[r]) for r in ct.classes.representatives]


def young_class_function(ct: CharacterTable, d: Partition) -> np.ndarray:
    return np.array([young_character(d, mu) for mu in class_cycle_types(ct)], dtype=object)


def identify_irreps(ct: CharacterTable) -> Dict[Partition, int]:
    """Partition label of every S_n irrep.

    Raises:
        VerificationError: If some Y_D has no unique new constituent
    """
    _check_symmetric(ct)
    n = ct.group.n
    constituents: Dict[Partition, set] = {}
    labels: Dict[Partition, int] = {}
    for d in partitions_of(n):
        mults = ct.decompose(young_class_function(ct, d))
        constituents[d] = {i for i, m in enumerate(mults) if m}
        older = set()
        for other, members in constituents.items():
            if compare_dominance(other, d) == DominanceRelation.STRICTLY_DOMINATES:
                older |= members
        new = constituents[d] - older
        if len(new) != 1:
            raise VerificationError(f"Young module {d} has new constituents {sorted(new)}")
        labels[d] = new.pop()
    return labels


def kostka_from_oracle(ct: CharacterTable, labels: Dict[Partition, int], e: Partition, d: Partition) -> int:
    """Multiplicity of sigma_e in Y_d read off the character table."""
    return ct.decompose(young_class_function(ct, d))[labels[e]]


def _splits(mu: Partition, k: int):
    counts = sorted(Counter(mu.parts).items(), reverse=True)
    for choice in product(*[range(c + 1) for _, c in counts]):
        if sum(part * a for (part, _), a in zip(counts, choice)) != k:
            continue
        alpha, beta = [], []
        for (part, c), a in zip(counts, choice):
            alpha += [part] * a
            beta += [part] * (c - a)
        yield Partition(tuple(alpha)), Partition(tuple(beta))


def induced_young_product(
    big: CharacterTable,
    small: CharacterTable,
    small_labels: Dict[Partition, int],
    d: Partition,
    m: int,
) -> np.ndarray:
    """Ind from S_k x S_m to S_{k+m} of sigma_d times the trivial character."""
    small_types = class_cycle_types(small)
    small_values = {
        mu: small.integer_value(small_labels[d], c) for c, mu in enumerate(small_types)
    }
    k = d.weight
    values = []
    for mu in class_cycle_types(big):
        total = 0
        for alpha, beta in _splits(mu, k):
            weight = centralizer_order(mu) // (centralizer_order(alpha) * centralizer_order(beta))
            total += weight * small_values[alpha]
        values.append(total)
    return np.array(values, dtype=object)


def pieri_from_oracle(
    d: Partition,
    m: int,
    table_for: Callable[[int], CharacterTable],
) -> List[Partition]:
    """Constituents of Ind(sigma_d x 1) by exact inner products on S_{k+m}.

    ``table_for(n)`` supplies the S_n character table.

    Raises:
        VerificationError: If the induced module is not multiplicity free
    """
    n = d.weight + m
    big = table_for(n)
    big_labels = identify_irreps(big)
    if m == 0:
        return [d]
    if d.weight == 0:
        function = young_class_function(big, Partition.of(m))
    else:
        small = table_for(d.weight)
        function = induced_young_product(big, small, identify_irreps(small), d, m)
    mults = big.decompose(function)
    by_index = {i: p for p, i in big_labels.items()}
    if any(x > 1 for x in mults):
        raise VerificationError(f"Ind of sigma_{d} with {m} boxes is not multiplicity free")
    result = [by_index[i] for i, x in enumerate(mults) if x]
    return sorted(result, key=lambda p: tuple(-x for x in p.parts))
