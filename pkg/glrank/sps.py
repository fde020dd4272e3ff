"""Spherical principal series rho_D and the parabolic permutation modules I_D.

Dimensions and transvection characters of I_D are flag counts; those of
rho_D follow by the inverse Kostka matrix.
"""

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional

from .errors import InvalidInputError
from .partitions import (
    DominanceRelation,
    Partition,
    compare_dominance,
    transition_matrix,
)
from .qseries import ONE, ZERO, QPoly, exact_ratio, gauss_binomial, leading_ratio, q_multinomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CharacterRatio:
    """chi(T)/dim as c / q^exponent + o(...), with the exact value when asked.

    ``exponent`` is None exactly when the character vanishes at T.
    """

    constant: Fraction
    exponent: Optional[int]
    exact: Optional[Fraction] = None

    def to_json(self) -> Dict[str, Optional[str]]:
        return {
            "constant": str(self.constant),
            "exponent": self.exponent,
            "exact": None if self.exact is None else str(self.exact),
        }


@dataclass(frozen=True)
class SpsRep:
    diagram: Partition
    dim: QPoly
    char_at_T: QPoly

    @property
    def n(self) -> int:
        return self.diagram.weight


class OrderComparison(str, Enum):
    STRICTLY_SMALLER = "strictly-smaller"
    SAME_ORDER = "same-order"
    LARGER = "larger"


@dataclass(frozen=True)
class RelativeOrder:
    """Order of chi_{I_{d'}}(T) against chi_{I_d}(T), both over dim(I_d)."""

    comparison: OrderComparison
    degree_gap: int
    coefficient_ratio: Fraction


def dim_induced(d: Partition) -> QPoly:
    """dim I_D = [GL_n : P_D]."""
    return q_multinomial(d)


def _g(m: int, a: int) -> QPoly:
    return gauss_binomial(m, a)


@lru_cache(maxsize=None)
def _fixed_flags(parts: tuple, n: int) -> QPoly:
    # Split by the first subspace V_1: either V_1 contains Im(T-I), and T acts
    # trivially on V/V_1, or V_1 sits in ker(T-I) avoiding Im(T-I), and T acts
    # on V/V_1 as a transvection again.
    if not parts:
        return ONE
    d1, rest = parts[0], parts[1:]
    avoiding = _g(n - 1, d1) - _g(n - 2, d1 - 1)
    containing = _g(n - 1, d1 - 1)
    tail = _fixed_flags(rest, n - d1) if not avoiding.is_zero() else ZERO
    return avoiding * tail + containing * q_multinomial(Partition(rest))


def fixed_flags(d: Partition) -> QPoly:
    """Number of flags of type d fixed by a transvection, i.e. chi_{I_d}(T).

    Raises:
        InvalidInputError: If the weight is below 2 (no transvection exists)
    """
    if d.weight < 2:
        raise InvalidInputError(
            f"fixed_flags needs weight >= 2, got {d} of weight {d.weight}"
        )
    return _fixed_flags(d.parts, d.weight)


class _SpsCache:
    """Partition-keyed memo: concurrent readers, serialized inserts."""

    def __init__(self):
        self._items: Dict[Partition, SpsRep] = {}
        self._lock = threading.Lock()

    def get(self, d: Partition) -> Optional[SpsRep]:
        return self._items.get(d)

    def put(self, rep: SpsRep) -> SpsRep:
        with self._lock:
            return self._items.setdefault(rep.diagram, rep)

    def clear(self):
        with self._lock:
            self._items.clear()


_cache = _SpsCache()


def sps_rep(d: Partition, cap: Optional[int] = None) -> SpsRep:
    """dim and chi(T) of rho_D through the inverse Kostka matrix.

    For weight below 2 there is no transvection and the identity value is
    reported, which is what the block folding in ``pcf`` expects.

    Raises:
        ResourceLimitError: If the weight exceeds the partition cap
    """
    cached = _cache.get(d)
    if cached is not None:
        return cached
    data = transition_matrix(d.weight, cap)
    dim = ZERO
    char = ZERO
    for dp, coefficient in data.inverse_column(d).items():
        dim = dim + coefficient * dim_induced(dp)
        if d.weight >= 2:
            char = char + coefficient * fixed_flags(dp)
    if d.weight < 2:
        char = dim
    return _cache.put(SpsRep(d, dim, char))


def cr_sps(d: Partition, q_value: Optional[int] = None) -> CharacterRatio:
    """Leading term (and exact value at q_value) of chi_{rho_D}(T)/dim.

    Raises:
        InvalidInputError: If the weight is below 2
    """
    if d.weight < 2:
        raise InvalidInputError(f"Character ratio at T needs weight >= 2, got {d}")
    rep = sps_rep(d)
    constant, exponent = leading_ratio(rep.char_at_T, rep.dim)
    exact = exact_ratio(rep.char_at_T, rep.dim, q_value) if q_value else None
    if exponent is None:
        logger.info(f"rho_{d} vanishes at the transvection")
    return CharacterRatio(constant, exponent, exact)


def fixed_flag_leading(d: Partition) -> CharacterRatio:
    """Leading term of chi_{I_D}(T)/dim(I_D).

    For d_1 >= 2 this is m_{d_1} / q^{n-d_1}; for d_1 = 1 the exact count
    gives n-1 instead of n and the value is only logged.
    """
    constant, exponent = leading_ratio(fixed_flags(d), dim_induced(d))
    if d.first_row == 1:
        logger.info(
            f"Complete-flag type {d}: leading fixed-flag ratio {constant}/q^{exponent}"
        )
    return CharacterRatio(constant, exponent)


def cr_induced_relative(d: Partition, d_prime: Partition) -> RelativeOrder:
    """Compare chi_{I_{d'}}(T)/dim(I_d) against chi_{I_d}(T)/dim(I_d).

    Raises:
        InvalidInputError: Unless d_prime strictly dominates d
    """
    if compare_dominance(d_prime, d) != DominanceRelation.STRICTLY_DOMINATES:
        raise InvalidInputError(f"{d_prime} does not strictly dominate {d}")
    own = fixed_flags(d).leading()
    other = fixed_flags(d_prime).leading()
    gap = int(own.degree - other.degree)
    ratio = Fraction(other.coefficient, own.coefficient)
    if gap > 0:
        comparison = OrderComparison.STRICTLY_SMALLER
    elif gap == 0:
        comparison = OrderComparison.SAME_ORDER
    else:
        comparison = OrderComparison.LARGER
    return RelativeOrder(comparison, gap, ratio)
