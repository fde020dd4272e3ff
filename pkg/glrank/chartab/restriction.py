"""Restriction of GL_n(F_q) irreps to SL_n(F_q) by exact inner products.

GL/SL is cyclic, so every restriction is multiplicity free, its
constituents form one orbit, the number of constituents equals the number
of determinant twists fixing the GL irrep, and GL irreps over the same
SL irrep are twists of each other.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Set, Tuple

import numpy as np

from ..errors import InternalError, InvalidInputError, VerificationError
from ..matgroup import GroupKind
from .dixon import CharacterTable, linear_characters, twist_index

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RestrictionRow:
    gl_index: int
    dim: int
    stabilizer: int
    constituents: Tuple[int, ...]
    multiplicities: Tuple[int, ...]

    @property
    def irreducible(self) -> bool:
        return self.multiplicities == (1,)

    def to_json(self) -> dict:
        return {
            "gl_index": self.gl_index,
            "dim": self.dim,
            "stabilizer": self.stabilizer,
            "constituents": list(self.constituents),
            "multiplicities": list(self.multiplicities),
            "irreducible": self.irreducible,
        }


@dataclass
class RestrictionReport:
    gl_group: str
    sl_group: str
    q: int
    rows: List[RestrictionRow]
    twist_orbits: List[Tuple[int, ...]]
    fibers: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def reducible_fraction(self) -> Fraction:
        reducible = sum(1 for r in self.rows if not r.irreducible)
        return Fraction(reducible, len(self.rows))

    def verify(self) -> None:
        """Multiplicity freeness, twist stabiliser counts and orbit-shaped fibers.

        Raises:
            VerificationError: On the first violated restriction law
        """
        orbit_of = {i: orbit for orbit in self.twist_orbits for i in orbit}
        for row in self.rows:
            if any(m != 1 for m in row.multiplicities):
                raise VerificationError(
                    f"Restriction of GL irrep {row.gl_index} is not multiplicity free"
                )
            if len(row.constituents) != row.stabilizer:
                raise VerificationError(
                    f"GL irrep {row.gl_index} has {len(row.constituents)} constituents "
                    f"but twist stabiliser {row.stabilizer}"
                )
            if row.irreducible != (row.stabilizer == 1):
                raise VerificationError(f"Twist criterion fails for GL irrep {row.gl_index}")
        by_index = {r.gl_index: r for r in self.rows}
        for sl_index, over in self.fibers.items():
            orbit = orbit_of[over[0]]
            if set(over) != set(orbit):
                raise VerificationError(
                    f"GL irreps over SL irrep {sl_index} are not one twist orbit: {over}"
                )
            expected = (self.q - 1) // by_index[over[0]].stabilizer
            if len(over) != expected:
                raise VerificationError(
                    f"Fiber over SL irrep {sl_index} has {len(over)} members, expected {expected}"
                )
        spectra: Dict[Tuple[int, ...], int] = {}
        for row in self.rows:
            first = spectra.setdefault(row.constituents, row.gl_index)
            if orbit_of[first] != orbit_of[row.gl_index]:
                raise VerificationError(
                    f"GL irreps {first} and {row.gl_index} share a spectrum without being twists"
                )

    def to_json(self) -> dict:
        return {
            "gl_group": self.gl_group,
            "sl_group": self.sl_group,
            "rows": [r.to_json() for r in self.rows],
            "twist_orbits": [list(o) for o in self.twist_orbits],
            "reducible_fraction": str(self.reducible_fraction),
        }


def _twist_orbits(gl: CharacterTable) -> List[Tuple[int, ...]]:
    twists = twist_index(gl)
    linear = linear_characters(gl)
    seen: Set[int] = set()
    orbits = []
    for i in range(gl.num_irreps):
        if i in seen:
            continue
        orbit = tuple(sorted({twists[(i, j)] for j in linear}))
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def restrict_to_sl(gl: CharacterTable, sl: CharacterTable) -> RestrictionReport:
    """Decompose every GL irrep on SL classes.

    Raises:
        InvalidInputError: If the tables are not GL_n and SL_n over one field
    """
    if gl.group.kind != GroupKind.GL or sl.group.kind != GroupKind.SL:
        raise InvalidInputError("restrict_to_sl needs a GL table and an SL table")
    if gl.group.n != sl.group.n or gl.group.field != sl.group.field:
        raise InvalidInputError(
            f"Incompatible groups {gl.group.cache_key} and {sl.group.cache_key}"
        )
    ambient = gl.field
    sl_reps = sl.group.codes[sl.classes.representatives]
    gl_classes = gl.classes.labels[gl.group.index_of(sl_reps)]
    restricted = gl.values[:, gl_classes, :]
    sl_values = np.stack(
        [
            np.stack([ambient.promote(sl.values[j, c], sl.field) for c in range(sl.num_classes)])
            for j in range(sl.num_irreps)
        ]
    )
    pairing = ambient.weighted_pairing(
        restricted, ambient.conj_many(sl_values), sl.classes.sizes
    )
    orbits = _twist_orbits(gl)
    stabilizer = {i: len(linear_characters(gl)) // len(o) for o in orbits for i in o}
    rows = []
    fibers: Dict[int, List[int]] = {}
    for i in range(gl.num_irreps):
        constituents = []
        multiplicities = []
        for j in range(sl.num_irreps):
            value = pairing[i, j]
            if not ambient.is_rational(value) or value[0] % sl.order:
                raise InternalError(f"<Res chi_{i}, psi_{j}> is not an integer")
            m = int(value[0]) // sl.order
            if m:
                constituents.append(j)
                multiplicities.append(m)
                fibers.setdefault(j, []).append(i)
        rows.append(
            RestrictionRow(i, gl.dims[i], stabilizer[i], tuple(constituents), tuple(multiplicities))
        )
    report = RestrictionReport(
        gl.group.cache_key,
        sl.group.cache_key,
        gl.group.field.q,
        rows,
        orbits,
        {j: tuple(v) for j, v in fibers.items()},
    )
    logger.info(
        f"{gl.group.cache_key} -> {sl.group.cache_key}: reducible fraction {report.reducible_fraction}"
    )
    return report
