"""Tensor rank of oracle irreps straight from the definitions.

strict rank: first k with chi inside omega^{tensor k}, omega the
permutation representation on F_q^n. rank: the same after the best
determinant twist. Both are cross-checked against invariant and
eigenvector counts for H_k, the pointwise stabiliser of the first k
coordinate vectors.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from ..errors import InvalidInputError, VerificationError
from ..matgroup import GroupKind, MatrixFq
from .dixon import CharacterTable, linear_characters, twist_index

logger = logging.getLogger(__name__)


class HkVariant(str, Enum):
    INVARIANT = "invariant"
    EIGEN = "eigen"


def omega_tensor_character(g: MatrixFq, k: int) -> int:
    """Trace of g on the k-fold tensor power of the permutation module on F_q^n."""
    if k < 0:
        raise InvalidInputError(f"Tensor power must be nonnegative, got {k}")
    return g.field.q ** (k * g.fixed_space_dim())


def _omega_on_classes(ct: CharacterTable, k: int) -> np.ndarray:
    fixed = ct.group.fixed_space_dims[ct.classes.representatives]
    q = ct.group.field.q
    return np.array([q ** (k * int(f)) for f in fixed], dtype=object)


def _check_matrix_group(ct: CharacterTable) -> None:
    if ct.group.kind not in (GroupKind.GL, GroupKind.SL):
        raise InvalidInputError(f"Tensor rank needs a GL or SL table, got {ct.group.kind.value}")


def strict_rank(ct: CharacterTable, i: int) -> int:
    """Least k with <chi_i, omega^k> > 0."""
    _check_matrix_group(ct)
    for k in range(ct.group.n + 1):
        if ct.inner_with_integers(i, _omega_on_classes(ct, k)) > 0:
            return k
    raise VerificationError(f"chi_{i} never occurs in omega^n")


def rank(ct: CharacterTable, i: int) -> int:
    """Minimum strict rank over the determinant twists of chi_i."""
    _check_matrix_group(ct)
    if ct.group.kind == GroupKind.SL:
        return strict_rank(ct, i)
    twists = twist_index(ct)
    orbit = {twists[(i, j)] for j in linear_characters(ct)}
    return min(strict_rank(ct, t) for t in orbit)


def stabilizer_mask(ct: CharacterTable, k: int) -> np.ndarray:
    """Elements fixing e_1, ..., e_k, i.e. of block shape [[I_k, *], [0, A]]."""
    n = ct.group.n
    mats = ct.group.matrices
    eye = np.eye(n, dtype=np.int64)
    return np.all(mats[:, :, :k] == eye[None, :, :k], axis=(1, 2))


def rank_via_Hk(
    ct: CharacterTable, i: int, variant: HkVariant = HkVariant.INVARIANT
) -> int:
    """Least k such that H_k has an invariant vector (or a det-character eigenvector).

    The eigenvector variant sums chi_i against every character of H_k that
    factors through det(A); det(A) equals the determinant of the element.
    """
    _check_matrix_group(ct)
    variant = HkVariant(variant)
    field = ct.field
    gf = ct.group.field
    q1 = gf.q - 1
    labels = ct.classes.labels
    dets = ct.group.determinants
    for k in range(ct.group.n + 1):
        members = np.nonzero(stabilizer_mask(ct, k))[0]
        logs = gf.log[dets[members]]
        counts = np.zeros((ct.num_classes, q1), dtype=np.int64)
        np.add.at(counts, (labels[members], logs), 1)
        twists = range(q1) if variant == HkVariant.EIGEN else [0]
        for c in twists:
            total = field.zero()
            for t in range(q1):
                column = counts[:, t]
                if not column.any():
                    continue
                summed = column @ ct.values[i]
                phase = field.root_power(-(c * t) * (field.e // q1))
                total = total + field.multiply(summed, phase)
            if total.any():
                return k
    raise VerificationError(f"chi_{i} has no H_n-invariant vector")


@dataclass(frozen=True)
class RankRow:
    index: int
    dim: int
    char_at_T: str
    strict_rank: int
    rank: int
    rank_via_Hk: int
    rank_via_Hk_eigen: int

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "dim": self.dim,
            "char_at_T": self.char_at_T,
            "strict_rank": self.strict_rank,
            "rank": self.rank,
            "rank_via_Hk": self.rank_via_Hk,
            "rank_via_Hk_eigen": self.rank_via_Hk_eigen,
        }


@dataclass(frozen=True)
class RankReport:
    group: str
    rows: List[RankRow]

    def verify(self) -> None:
        """rank <= strict rank and both H_k readings agree with the definitions.

        Raises:
            VerificationError: On the first disagreement
        """
        for row in self.rows:
            if row.rank > row.strict_rank:
                raise VerificationError(f"{self.group}: rank > strict rank for irrep {row.index}")
            if row.rank_via_Hk != row.strict_rank:
                raise VerificationError(
                    f"{self.group}: H_k invariants give {row.rank_via_Hk}, "
                    f"strict rank is {row.strict_rank} for irrep {row.index}"
                )
            if row.rank_via_Hk_eigen != row.rank:
                raise VerificationError(
                    f"{self.group}: H_k eigenvectors give {row.rank_via_Hk_eigen}, "
                    f"rank is {row.rank} for irrep {row.index}"
                )

    def to_json(self) -> dict:
        return {"group": self.group, "irreps": [row.to_json() for row in self.rows]}


def rank_report(ct: CharacterTable) -> RankReport:
    rows = []
    has_T = ct.group.n >= 2
    for i in range(ct.num_irreps):
        chi_T = ct.field.format(ct.char_at_T(i)) if has_T else str(ct.dims[i])
        rows.append(
            RankRow(
                index=i,
                dim=ct.dims[i],
                char_at_T=chi_T,
                strict_rank=strict_rank(ct, i),
                rank=rank(ct, i),
                rank_via_Hk=rank_via_Hk(ct, i, HkVariant.INVARIANT),
                rank_via_Hk_eigen=rank_via_Hk(ct, i, HkVariant.EIGEN),
            )
        )
    return RankReport(ct.group.cache_key, rows)


@dataclass(frozen=True)
class FiltrationReport:
    """sizes[k-1] = number of irreps occurring in omega^{tensor k}."""

    group: str
    sizes: List[int]
    total: int

    @property
    def strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.sizes, self.sizes[1:]))

    def verify(self) -> None:
        if not self.strictly_increasing or self.sizes[-1] != self.total:
            raise VerificationError(
                f"{self.group}: tensor-rank filtration {self.sizes} is not a strict chain to {self.total}"
            )

    def to_json(self) -> dict:
        return {"group": self.group, "sizes": self.sizes, "total": self.total}


def filtration_check(ct: CharacterTable, strict_ranks: Optional[List[int]] = None) -> FiltrationReport:
    if ct.group.kind != GroupKind.GL:
        raise InvalidInputError(f"The tensor-rank filtration is checked on GL tables, got {ct.group.kind.value}")
    ranks = strict_ranks or [strict_rank(ct, i) for i in range(ct.num_irreps)]
    sizes = [sum(1 for r in ranks if r <= k) for k in range(1, ct.group.n + 1)]
    return FiltrationReport(ct.group.cache_key, sizes, ct.num_irreps)
