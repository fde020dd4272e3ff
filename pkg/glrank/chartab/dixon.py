"""Dixon-Schneider character tables of enumerated groups.

Class structure constants are reduced modulo a prime l = 1 (mod exponent);
common eigenvectors of the class matrices give the central characters,
and discrete Fourier inversion over each cyclic subgroup lifts the values
back to exact elements of Z[zeta_e].
"""

import hashlib
import json
import logging
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import isprime, primitive_root
from tqdm import tqdm

from ..errors import InternalError, InvalidInputError, ResourceLimitError, VerificationError
from ..matgroup import ConjugacyClasses, GroupKind, GroupTable, transvection
from .cyclotomic import CyclotomicField, get_cyclotomic_field

logger = logging.getLogger(__name__)

DEFAULT_CLASS_CAP = 400
TABLE_MAGIC = b"GLCT"
TABLE_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIIII")


def modular_prime(order: int, exponent: int, attempts: int = 100000) -> int:
    """Smallest prime l = 1 (mod exponent) with l > 2 sqrt(order).

    Raises:
        InternalError: If no such prime turns up within the search window
    """
    t = 1
    for _ in range(attempts):
        candidate = exponent * t + 1
        if candidate * candidate > 4 * order and isprime(candidate):
            return candidate
        t += 1
    raise InternalError(
        f"No prime = 1 mod {exponent} above 2*sqrt({order}) in {attempts} steps"
    )


def class_structure_constants(
    table: GroupTable,
    classes: ConjugacyClasses,
    progress: bool = False,
    workers: int = 1,
) -> np.ndarray:
    """a[j, k, l] = #{x in C_j : x^{-1} z_l in C_k} for a fixed z_l in C_l."""
    r = len(classes)
    everything_inv = table.inverses

    def column(l: int) -> np.ndarray:
        z = np.full(table.order, classes.representatives[l])
        y = table.multiply(everything_inv, z)
        counts = np.zeros((r, r), dtype=np.int64)
        np.add.at(counts, (classes.labels, classes.labels[y]), 1)
        return counts

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        columns = list(
            tqdm(
                pool.map(column, range(r)),
                total=r,
                desc="class constants",
                disable=not progress,
            )
        )
    return np.stack(columns, axis=-1)


# Modular linear algebra


def _rref_mod(a: np.ndarray, l: int) -> Tuple[np.ndarray, List[int]]:
    work = np.array(a, dtype=np.int64) % l
    rows, cols = work.shape
    pivots: List[int] = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        nonzero = np.nonzero(work[r:, j])[0]
        if len(nonzero) == 0:
            continue
        p = r + nonzero[0]
        work[[r, p]] = work[[p, r]]
        work[r] = (work[r] * pow(int(work[r, j]), -1, l)) % l
        factors = work[:, j].copy()
        factors[r] = 0
        work = (work - np.outer(factors, work[r])) % l
        pivots.append(j)
        r += 1
    return work[:r], pivots


def _nullspace_mod(a: np.ndarray, l: int) -> np.ndarray:
    reduced, pivots = _rref_mod(a, l)
    cols = a.shape[1]
    free = [j for j in range(cols) if j not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, p in enumerate(pivots):
            basis[t, p] = (-reduced[i, f]) % l
    return basis


def _charpoly_mod(a: np.ndarray, l: int) -> List[int]:
    """Characteristic polynomial (high to low) by Faddeev-LeVerrier."""
    d = a.shape[0]
    if d >= l:
        raise InternalError(f"Faddeev-LeVerrier needs dimension {d} < prime {l}")
    coefficients = [1]
    m = np.zeros_like(a)
    eye = np.eye(d, dtype=np.int64)
    for k in range(1, d + 1):
        m = (a @ m + coefficients[-1] * eye) % l
        trace = int(np.trace(a @ m % l)) % l
        coefficients.append((-trace * pow(k, -1, l)) % l)
    return coefficients


def _roots_mod(coefficients: List[int], l: int) -> List[int]:
    xs = np.arange(l, dtype=np.int64)
    values = np.zeros(l, dtype=np.int64)
    for c in coefficients:
        values = (values * xs + c) % l
    return [int(x) for x in np.nonzero(values == 0)[0]]


def _split_spaces(structure: np.ndarray, l: int, progress: bool) -> List[np.ndarray]:
    r = structure.shape[0]
    spaces = [np.eye(r, dtype=np.int64)]
    for j in tqdm(range(1, r), desc="eigenspaces", disable=not progress):
        if all(len(b) == 1 for b in spaces):
            break
        m = structure[j] % l
        refined = []
        for basis in spaces:
            if len(basis) == 1:
                refined.append(basis)
                continue
            _, pivots = _rref_mod(basis, l)
            restricted = ((basis @ m.T) % l)[:, pivots]
            eigenvalues = _roots_mod(_charpoly_mod(restricted, l), l)
            pieces = []
            for value in eigenvalues:
                shifted = (restricted.T - value * np.eye(len(basis), dtype=np.int64)) % l
                coords = _nullspace_mod(shifted, l)
                vectors, _ = _rref_mod(coords @ basis % l, l)
                pieces.append(vectors)
            if sum(len(p) for p in pieces) != len(basis):
                raise InternalError(
                    f"Class matrix {j} is not diagonalisable mod {l} on a {len(basis)}-dim space"
                )
            refined.extend(pieces)
        spaces = refined
    if any(len(b) != 1 for b in spaces):
        raise InternalError(f"Class algebra did not split mod {l}")
    return [b[0] for b in spaces]


@dataclass
class CharacterTable:
    """Exact irreducible characters of an enumerated group.

    ``values[i, c]`` is the coefficient vector of chi_i on class c.
    """

    group: GroupTable
    classes: ConjugacyClasses
    field: CyclotomicField
    values: np.ndarray
    dims: List[int]

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def num_irreps(self) -> int:
        return len(self.dims)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def value(self, i: int, c: int) -> np.ndarray:
        return self.values[i, c]

    def integer_value(self, i: int, c: int) -> Optional[int]:
        v = self.values[i, c]
        return int(v[0]) if self.field.is_rational(v) else None

    def class_of(self, ordinal: int) -> int:
        return int(self.classes.labels[ordinal])

    @cached_property
    def transvection_class(self) -> int:
        if self.group.kind == GroupKind.SYM or self.group.n < 2:
            raise InvalidInputError(f"{self.group.cache_key} has no transvection class")
        return self.class_of(self.group.ordinal(transvection(self.group.n, self.group.field)))

    def char_at_T(self, i: int) -> np.ndarray:
        return self.values[i, self.transvection_class]

    def inner_with_integers(self, i: int, function: np.ndarray) -> int:
        """<chi_i, f> for an integer-valued real class function f.

        Raises:
            InternalError: If the result is not a rational integer
        """
        weights = np.asarray(function, dtype=object) * self.classes.sizes.astype(object)
        total = self.field.zero().astype(object)
        for c, w in enumerate(weights):
            total = total + w * self.values[i, c].astype(object)
        if any(total[1:]):
            raise InternalError(f"Inner product of chi_{i} is irrational: {total.tolist()}")
        value, remainder = divmod(int(total[0]), self.order)
        if remainder:
            raise InternalError(f"Inner product of chi_{i} is not an integer")
        return value

    def decompose(self, function: np.ndarray) -> List[int]:
        """Multiplicity of every irrep in an integer-valued class function."""
        return [self.inner_with_integers(i, function) for i in range(self.num_irreps)]

    def gram(self) -> np.ndarray:
        conj = self.field.conj_many(self.values)
        return self.field.weighted_pairing(self.values, conj, self.classes.sizes)

    def check_orthogonality(self) -> None:
        """Row orthogonality, column orthogonality and sum of squared dimensions.

        Raises:
            VerificationError: On any failed relation
        """
        gram = self.gram()
        expected = np.zeros_like(gram)
        expected[np.arange(self.num_irreps), np.arange(self.num_irreps), 0] = self.order
        if not np.array_equal(gram, expected):
            raise VerificationError(f"Row orthogonality fails for {self.group.cache_key}")
        columns = np.transpose(self.values, (1, 0, 2))
        conj = self.field.conj_many(columns)
        col_gram = self.field.weighted_pairing(columns, conj, np.ones(self.num_irreps))
        for c in range(self.num_classes):
            for d in range(self.num_classes):
                want = self.order // int(self.classes.sizes[c]) if c == d else 0
                if not np.array_equal(col_gram[c, d], self.field.rational(want)):
                    raise VerificationError(
                        f"Column orthogonality fails at classes {c}, {d} of {self.group.cache_key}"
                    )
        if sum(d * d for d in self.dims) != self.order:
            raise VerificationError(f"Squared dimensions do not sum to {self.order}")

    def to_json(self) -> dict:
        return {
            "group": self.group.cache_key,
            "order": self.order,
            "exponent": self.field.e,
            "classes": [
                {
                    "representative": int(self.group.codes[rep]),
                    "size": int(size),
                    "element_order": int(order),
                }
                for rep, size, order in zip(
                    self.classes.representatives, self.classes.sizes, self.classes.orders
                )
            ],
            "dims": list(self.dims),
            "values": [
                [[int(x) for x in self.values[i, c]] for c in range(self.num_classes)]
                for i in range(self.num_irreps)
            ],
        }

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(
            TABLE_MAGIC,
            TABLE_FORMAT_VERSION,
            self.field.e,
            self.num_irreps,
            self.num_classes,
            self.field.phi,
        )
        reps = self.group.codes[self.classes.representatives].astype("<i8").tobytes()
        return header + reps + self.values.astype("<i8").tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes, group: GroupTable) -> "CharacterTable":
        try:
            magic, version, e, irreps, num_classes, phi = _HEADER.unpack_from(payload, 0)
        except struct.error as err:
            raise InvalidInputError(f"Truncated character table: {err}")
        if magic != TABLE_MAGIC or version != TABLE_FORMAT_VERSION:
            raise InvalidInputError(f"Unknown character table format {magic!r} v{version}")
        offset = _HEADER.size
        reps = np.frombuffer(payload, dtype="<i8", count=num_classes, offset=offset)
        offset += 8 * num_classes
        values = np.frombuffer(
            payload, dtype="<i8", count=irreps * num_classes * phi, offset=offset
        ).astype(np.int64)
        classes = group.conjugacy_classes()
        if not np.array_equal(group.codes[classes.representatives], reps):
            raise InvalidInputError("Cached character table does not match the group classes")
        values = values.reshape(irreps, num_classes, phi)
        dims = [int(v) for v in values[:, 0, 0]]
        return cls(group, classes, get_cyclotomic_field(e), values, dims)

    def checksum(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()


def _power_classes(table: GroupTable, classes: ConjugacyClasses) -> np.ndarray:
    """P[c, j] = class of rep_c^j for 0 <= j < max element order."""
    longest = int(classes.orders.max())
    reps = classes.representatives
    result = np.zeros((len(reps), longest), dtype=np.int64)
    current = np.full(len(reps), table.identity_index)
    for j in range(longest):
        result[:, j] = classes.labels[current]
        current = table.multiply(current, reps)
    return result


def character_table(
    table: GroupTable,
    class_cap: Optional[int] = None,
    progress: bool = False,
    workers: int = 1,
) -> CharacterTable:
    """Exact character table, irreps sorted by dimension then value vectors.

    Raises:
        ResourceLimitError: If the group has more classes than the cap
        InternalError: If the modular computation fails an exactness check
    """
    limit = DEFAULT_CLASS_CAP if class_cap is None else class_cap
    classes = table.conjugacy_classes(progress=progress)
    r = len(classes)
    if r > limit:
        raise ResourceLimitError("class_count", limit, r)
    e = table.exponent
    field = get_cyclotomic_field(e)
    l = modular_prime(table.order, e)
    logger.info(f"Dixon-Schneider on {table.cache_key}: {r} classes, exponent {e}, prime {l}")

    structure = class_structure_constants(table, classes, progress, workers)
    eigenvectors = _split_spaces(structure, l, progress)
    sizes = [int(s) for s in classes.sizes]
    inverse_class = classes.labels[table.inverses[classes.representatives]]
    powers = _power_classes(table, classes)
    z = pow(int(primitive_root(l)), (l - 1) // e, l)

    rows: List[Tuple[int, np.ndarray]] = []
    for w in eigenvectors:
        w = (w * pow(int(w[0]), -1, l)) % l
        norm = sum(int(w[c]) * int(w[inverse_class[c]]) * pow(sizes[c], -1, l) for c in range(r))
        target = (table.order * pow(norm % l, -1, l)) % l
        dim = next(
            (d for d in range(1, math.isqrt(table.order) + 1) if (d * d - target) % l == 0),
            None,
        )
        if dim is None:
            raise InternalError(f"No degree d <= sqrt|G| with d^2 = {target} mod {l}")
        chi_mod = [(dim * int(w[c]) * pow(sizes[c], -1, l)) % l for c in range(r)]
        rows.append((dim, _lift(chi_mod, dim, classes, powers, field, z, l)))

    rows.sort(key=lambda item: (item[0], tuple(item[1].reshape(-1).tolist())))
    values = np.stack([v for _, v in rows])
    return CharacterTable(table, classes, field, values, [d for d, _ in rows])


def _lift(
    chi_mod: List[int],
    dim: int,
    classes: ConjugacyClasses,
    powers: np.ndarray,
    field: CyclotomicField,
    z: int,
    l: int,
) -> np.ndarray:
    e = field.e
    out = np.zeros((len(classes), field.phi), dtype=np.int64)
    for c in range(len(classes)):
        o = int(classes.orders[c])
        zo = pow(z, e // o, l)
        samples = [chi_mod[int(powers[c, j])] for j in range(o)]
        counts = np.zeros(e, dtype=np.int64)
        inv_o = pow(o, -1, l)
        for k in range(o):
            total = sum(s * pow(zo, (-j * k) % o, l) for j, s in enumerate(samples))
            m = (total * inv_o) % l
            if m > dim:
                raise InternalError(f"Eigenvalue multiplicity {m} exceeds degree {dim}")
            counts[(k * (e // o)) % e] += m
        if counts.sum() != dim:
            raise InternalError(f"Eigenvalue multiplicities sum to {counts.sum()}, not {dim}")
        out[c] = field.from_exponent_counts(counts)
    return out


def linear_characters(ct: CharacterTable) -> List[int]:
    """Indices of the degree-one characters trivial on every det = 1 class."""
    dets = ct.group.determinants[ct.classes.representatives]
    one = ct.field.rational(1)
    return [
        i
        for i in range(ct.num_irreps)
        if ct.dims[i] == 1
        and all(np.array_equal(ct.values[i, c], one) for c in range(ct.num_classes) if dets[c] == 1)
    ]


def twist_index(ct: CharacterTable) -> Dict[Tuple[int, int], int]:
    """(i, j) -> index of chi_i tensor chi_j for j a linear character."""
    lookup = {tuple(ct.values[i].reshape(-1).tolist()): i for i in range(ct.num_irreps)}
    result = {}
    for j in linear_characters(ct):
        for i in range(ct.num_irreps):
            product = np.stack(
                [ct.field.multiply(ct.values[i, c], ct.values[j, c]) for c in range(ct.num_classes)]
            )
            key = tuple(product.reshape(-1).tolist())
            if key not in lookup:
                raise InternalError(f"Twist of chi_{i} by chi_{j} is not an irrep")
            result[(i, j)] = lookup[key]
    return result
