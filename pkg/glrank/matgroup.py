"""Finite fields GF(p^m), matrices over them and enumerated small matrix groups.

Field elements are integers 0..q-1 whose base-p digits are the coefficients
of a polynomial reduced modulo a fixed monic irreducible. All arithmetic
goes through precomputed numpy tables so whole batches of matrices can be
multiplied, encoded and row-reduced at once.
"""

import hashlib
import itertools
import logging
import struct
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem
from tqdm import tqdm

from .errors import InternalError, InvalidInputError, ResourceLimitError
from .qseries import gl_order, prime_power

logger = logging.getLogger(__name__)

DEFAULT_FIELD_CAP = 64
DEFAULT_GROUP_CAP = 200000
DEFAULT_TRANSVECTION_CAP = 200000

GROUP_MAGIC = b"GLRK"
GROUP_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHBBHB")


class GroupKind(str, Enum):
    GL = "GL"
    SL = "SL"
    SYM = "SYM"


_KIND_CODES = {GroupKind.GL: 0, GroupKind.SL: 1, GroupKind.SYM: 2}


def _first_irreducible(p: int, m: int) -> Tuple[int, ...]:
    """Lexicographically first monic irreducible of degree m, high to low."""
    for tail in itertools.product(range(p), repeat=m):
        candidate = [1] + list(tail)
        if gf_irreducible_p(candidate, p, ZZ):
            return tuple(candidate)
    raise InternalError(f"No irreducible polynomial of degree {m} over F_{p}")


class FqField:
    """GF(q) with full addition, multiplication, negation and inverse tables."""

    def __init__(self, q: int, cap: Optional[int] = None):
        limit = DEFAULT_FIELD_CAP if cap is None else cap
        p, m = prime_power(q)
        if q > limit:
            raise ResourceLimitError("field_order", limit, q)
        self.p = p
        self.m = m
        self.q = q
        self.modulus = _first_irreducible(p, m)
        self._build_tables()

    def _to_poly(self, a: int) -> List[int]:
        digits = []
        for _ in range(self.m):
            digits.append(a % self.p)
            a //= self.p
        while digits and digits[-1] == 0:
            digits.pop()
        return list(reversed(digits))

    def _from_poly(self, poly: Sequence[int]) -> int:
        value = 0
        for c in poly:
            value = value * self.p + int(c)
        return value

    def _build_tables(self):
        q, p = self.q, self.p
        digits = np.array(
            [[(a // p**i) % p for i in range(self.m)] for a in range(q)], dtype=np.int64
        )
        weights = p ** np.arange(self.m, dtype=np.int64)
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        self.add_table = (summed @ weights).astype(np.int64)
        self.neg_table = (((-digits) % p) @ weights).astype(np.int64)

        polys = [self._to_poly(a) for a in range(q)]
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(1, q):
            for b in range(a, q):
                product = gf_rem(gf_mul(polys[a], polys[b], p, ZZ), list(self.modulus), p, ZZ)
                mul[a, b] = mul[b, a] = self._from_poly(product)
        self.mul_table = mul

        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv_table = inv

        self.generator = self._primitive_element()
        self.antilog = np.zeros(q - 1, dtype=np.int64)
        self.log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            self.antilog[k] = x
            self.log[x] = k
            x = int(mul[x, self.generator])

    def _primitive_element(self) -> int:
        order = self.q - 1
        if order == 1:
            return 1
        primes = list(factorint(order))
        for g in range(2, self.q):
            if all(self._pow_plain(g, order // r) != 1 for r in primes):
                return g
        raise InternalError(f"No primitive element found in GF({self.q})")

    def _pow_plain(self, a: int, k: int) -> int:
        result = 1
        for _ in range(k):
            result = int(self.mul_table[result, a])
        return result

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.q, self.modulus) == (
            other.q,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.q, self.modulus))

    def __repr__(self):
        return f"FqField(q={self.q}, modulus={self.modulus})"

    @property
    def modulus_hash(self) -> str:
        return hashlib.sha256(bytes(self.modulus)).hexdigest()[:12]

    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise InvalidInputError("Zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def power(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k else 1
        return int(self.antilog[(self.log[a] * k) % (self.q - 1)])

    # Batched helpers on integer arrays of field elements

    def dot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Row-wise dot products along the last axis."""
        products = self.mul_table[u, v]
        acc = products[..., 0]
        for i in range(1, products.shape[-1]):
            acc = self.add_table[acc, products[..., i]]
        return acc

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Broadcast matrix product over stacks of square or rectangular matrices."""
        if self.m == 1:
            return np.matmul(a, b) % self.p
        products = self.mul_table[a[..., :, :, None], b[..., None, :, :]]
        acc = products[..., 0, :]
        for t in range(1, products.shape[-2]):
            acc = self.add_table[acc, products[..., t, :]]
        return acc

    def batched_rank(self, mats: np.ndarray) -> np.ndarray:
        """Rank of every matrix in a (N, r, c) stack by vectorised elimination."""
        work = np.array(mats, dtype=np.int64, copy=True)
        count, rows, cols = work.shape
        used = np.zeros((count, rows), dtype=bool)
        rank = np.zeros(count, dtype=np.int64)
        for j in range(cols):
            candidates = (work[:, :, j] != 0) & ~used
            has_pivot = candidates.any(axis=1)
            if not has_pivot.any():
                continue
            idx = np.nonzero(has_pivot)[0]
            pivot = candidates[idx].argmax(axis=1)
            pivot_rows = work[idx, pivot, :]
            scale = self.inv_table[pivot_rows[:, j]]
            pivot_rows = self.mul_table[scale[:, None], pivot_rows]
            factors = work[idx, :, j]
            subtract = self.mul_table[factors[:, :, None], pivot_rows[:, None, :]]
            work[idx] = self.add_table[work[idx], self.neg_table[subtract]]
            used[idx, pivot] = True
            rank[idx] += 1
        return rank


def group_key(kind: GroupKind, n: int, field: FqField) -> str:
    """Cache key shared by a group table and everything derived from it."""
    return f"{GroupKind(kind).value}-{n}-{field.p}-{field.m}-{field.modulus_hash}"


@lru_cache(maxsize=16)
def get_field(q: int, cap: Optional[int] = None) -> FqField:
    return FqField(q, cap)


def _rref(rows: List[List[int]], field: FqField) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form and pivot columns of a small matrix."""
    work = [list(r) for r in rows]
    pivots = []
    r = 0
    width = len(work[0]) if work else 0
    for j in range(width):
        pivot = next((i for i in range(r, len(work)) if work[i][j]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        scale = field.inv(work[r][j])
        work[r] = [field.mul(scale, x) for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][j]:
                f = work[i][j]
                work[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(work[i], work[r])]
        pivots.append(j)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


@dataclass(frozen=True)
class MatrixFq:
    """An n x n matrix over GF(q), entries stored row-major."""

    field: FqField
    n: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if len(entries) != self.n * self.n:
            raise InvalidInputError(f"Expected {self.n * self.n} entries, got {len(entries)}")
        if any(not 0 <= e < self.field.q for e in entries):
            raise InvalidInputError(f"Entries must lie in 0..{self.field.q - 1}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, n: int, field: FqField) -> "MatrixFq":
        return cls(field, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], field: FqField) -> "MatrixFq":
        return cls(field, len(rows), tuple(x for row in rows for x in row))

    @classmethod
    def from_array(cls, array: np.ndarray, field: FqField) -> "MatrixFq":
        return cls(field, array.shape[0], tuple(int(x) for x in array.reshape(-1)))

    @classmethod
    def decode(cls, code: int, n: int, field: FqField) -> "MatrixFq":
        entries = []
        for _ in range(n * n):
            entries.append(code % field.q)
            code //= field.q
        return cls(field, n, tuple(entries))

    def encode(self) -> int:
        return sum(e * self.field.q**i for i, e in enumerate(self.entries))

    def rows(self) -> List[List[int]]:
        return [list(self.entries[i * self.n : (i + 1) * self.n]) for i in range(self.n)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.n, self.n)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.n + j]

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        if self.field != other.field or self.n != other.n:
            raise InvalidInputError("Matrix product needs the same field and size")
        return MatrixFq.from_array(self.field.matmul(self.to_array(), other.to_array()), self.field)

    def minus_identity(self) -> "MatrixFq":
        f = self.field
        rows = self.rows()
        for i in range(self.n):
            rows[i][i] = f.sub(rows[i][i], 1)
        return MatrixFq.from_rows(rows, f)

    def rank(self) -> int:
        return len(_rref(self.rows(), self.field)[1]) if self.n else 0

    def det(self) -> int:
        f = self.field
        work = self.rows()
        det = 1
        for j in range(self.n):
            pivot = next((i for i in range(j, self.n) if work[i][j]), None)
            if pivot is None:
                return 0
            if pivot != j:
                work[j], work[pivot] = work[pivot], work[j]
                det = f.neg(det)
            det = f.mul(det, work[j][j])
            scale = f.inv(work[j][j])
            for i in range(j + 1, self.n):
                if work[i][j]:
                    factor = f.mul(work[i][j], scale)
                    work[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(work[i], work[j])]
        return det

    def fixed_space_dim(self) -> int:
        """dim ker(g - I)."""
        return self.n - self.minus_identity().rank()

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        f = self.field
        result = []
        for row in self.rows():
            acc = 0
            for a, x in zip(row, vector):
                acc = f.add(acc, f.mul(a, x))
            result.append(acc)
        return tuple(result)


def fixed_space_dim(g: MatrixFq) -> int:
    return g.fixed_space_dim()


def transvection(n: int, field: FqField) -> MatrixFq:
    """The identity with an extra 1 in position (1, 2).

    Raises:
        InvalidInputError: If n < 2
    """
    if n < 2:
        raise InvalidInputError(f"Transvections need n >= 2, got {n}")
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rows[0][1] = 1
    return MatrixFq.from_rows(rows, field)


def all_vectors(n: int, field: FqField) -> np.ndarray:
    """Every vector of F_q^n, row i holding the base-q digits of i."""
    codes = np.arange(field.q**n, dtype=np.int64)
    return np.stack([(codes // field.q**i) % field.q for i in range(n)], axis=1)


def transvection_class_size(n: int, q_value: int) -> int:
    return (q_value**n - 1) * (q_value ** (n - 1) - 1) // (q_value - 1)


def transvection_arrays(n: int, field: FqField, cap: Optional[int] = None) -> np.ndarray:
    """All I + v w^T with v normalised, w != 0 and w.v = 0, as an (N, n, n) array.

    Raises:
        ResourceLimitError: If the class is larger than the cap
    """
    if n < 2:
        raise InvalidInputError(f"Transvections need n >= 2, got {n}")
    limit = DEFAULT_TRANSVECTION_CAP if cap is None else cap
    size = transvection_class_size(n, field.q)
    if size > limit:
        raise ResourceLimitError("transvections", limit, size)
    vectors = all_vectors(n, field)[1:]
    first_nonzero = vectors[np.arange(len(vectors)), (vectors != 0).argmax(axis=1)]
    normalised = vectors[first_nonzero == 1]
    v_idx, w_idx = np.meshgrid(
        np.arange(len(normalised)), np.arange(len(vectors)), indexing="ij"
    )
    v = normalised[v_idx.reshape(-1)]
    w = vectors[w_idx.reshape(-1)]
    keep = field.dot(v, w) == 0
    v, w = v[keep], w[keep]
    outer = field.mul_table[v[:, :, None], w[:, None, :]]
    eye = np.eye(n, dtype=np.int64)
    result = field.add_table[outer, eye[None, :, :]]
    if len(result) != size:
        raise InternalError(f"Found {len(result)} transvections, expected {size}")
    return result


def enumerate_transvections(
    n: int, field: FqField, cap: Optional[int] = None
) -> List[MatrixFq]:
    """The full conjugacy class of the transvection in GL_n(F_q)."""
    return [MatrixFq.from_array(a, field) for a in transvection_arrays(n, field, cap)]


# Subspaces and flags


Subspace = Tuple[Tuple[int, ...], ...]


def enumerate_subspaces(n: int, k: int, field: FqField) -> List[Subspace]:
    """All k-dimensional subspaces of F_q^n, each as its RREF basis."""
    if not 0 <= k <= n:
        return []
    if k == 0:
        return [()]
    result = []
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(pivots[i] + 1, n) if j not in pivots]
        for values in itertools.product(range(field.q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, col in enumerate(pivots):
                rows[i][col] = 1
            for (i, j), value in zip(free, values):
                rows[i][j] = value
            result.append(tuple(tuple(r) for r in rows))
    return result


def span(basis: Subspace, field: FqField) -> FrozenSet[Tuple[int, ...]]:
    n = len(basis[0]) if basis else 0
    vectors = set()
    for coefficients in itertools.product(range(field.q), repeat=len(basis)):
        v = [0] * n
        for c, row in zip(coefficients, basis):
            v = [field.add(x, field.mul(c, y)) for x, y in zip(v, row)]
        vectors.add(tuple(v))
    return frozenset(vectors)


def enumerate_flags(d: Sequence[int], field: FqField) -> List[Tuple[FrozenSet, ...]]:
    """Flags V_1 < V_2 < ... with dim V_i / V_{i-1} = d_i, as nested span sets."""
    n = sum(d)
    dims = list(itertools.accumulate(d))[:-1]
    layers = {k: [span(s, field) for s in enumerate_subspaces(n, k, field)] for k in dims}
    flags: List[Tuple[FrozenSet, ...]] = [()]
    for k in dims:
        flags = [
            flag + (space,)
            for flag in flags
            for space in layers[k]
            if not flag or flag[-1] <= space
        ]
    return flags


def count_fixed_flags(d: Sequence[int], g: MatrixFq) -> int:
    """Number of flags of type d with g V_i = V_i for every i."""
    count = 0
    for flag in enumerate_flags(d, g.field):
        if all({g.apply(v) for v in space} == space for space in flag):
            count += 1
    return count


def count_subspaces(n: int, k: int, field: FqField) -> int:
    return len(enumerate_subspaces(n, k, field))


# Enumerated groups


@dataclass(frozen=True)
class ConjugacyClasses:
    """Classes ordered identity first, then by element order, size and least code."""

    labels: np.ndarray
    representatives: np.ndarray
    sizes: np.ndarray
    orders: np.ndarray

    def __len__(self) -> int:
        return len(self.representatives)

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.labels == c)[0]


class GroupTable:
    """An enumerated matrix group with canonical sorted encodings."""

    def __init__(self, kind: GroupKind, n: int, field: FqField, codes: np.ndarray):
        self.kind = GroupKind(kind)
        self.n = n
        self.field = field
        order = np.argsort(codes, kind="stable")
        self.codes = np.asarray(codes, dtype=np.int64)[order]
        self.matrices = self.decode(self.codes)
        self._weights = field.q ** np.arange(n * n, dtype=np.int64)
        self._classes: Optional[ConjugacyClasses] = None

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def order(self) -> int:
        return len(self.codes)

    @property
    def cache_key(self) -> str:
        return group_key(self.kind, self.n, self.field)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        q = self.field.q
        flat = np.stack(
            [(codes // q**i) % q for i in range(self.n * self.n)], axis=-1
        ).astype(np.int64)
        return flat.reshape(codes.shape + (self.n, self.n))

    def encode(self, mats: np.ndarray) -> np.ndarray:
        flat = mats.reshape(mats.shape[:-2] + (self.n * self.n,))
        return flat @ self._weights

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        """Ordinals of encoded elements; anything outside the group is an error."""
        codes = np.asarray(codes, dtype=np.int64)
        idx = np.searchsorted(self.codes, codes)
        idx = np.minimum(idx, len(self.codes) - 1)
        if not np.array_equal(self.codes[idx], codes):
            raise InternalError(f"Element outside {self.kind.value}_{self.n}(F_{self.field.q})")
        return idx

    def element(self, ordinal: int) -> MatrixFq:
        return MatrixFq.from_array(self.matrices[ordinal], self.field)

    def ordinal(self, g: MatrixFq) -> int:
        return int(self.index_of(np.array([g.encode()]))[0])

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Ordinals of the products of paired ordinals."""
        product = self.field.matmul(self.matrices[a], self.matrices[b])
        return self.index_of(self.encode(product))

    @cached_property
    def identity_index(self) -> int:
        return self.ordinal(MatrixFq.identity(self.n, self.field))

    @cached_property
    def element_orders(self) -> np.ndarray:
        everything = np.arange(self.order)
        orders = np.zeros(self.order, dtype=np.int64)
        current = everything.copy()
        step = 1
        while (orders == 0).any():
            done = (current == self.identity_index) & (orders == 0)
            orders[done] = step
            current = self.multiply(current, everything)
            step += 1
        return orders

    def powers(self, exponents: np.ndarray, base: Optional[np.ndarray] = None) -> np.ndarray:
        """Ordinals of g^e for g in base (default: every element)."""
        base = np.arange(self.order) if base is None else np.asarray(base)
        exponents = np.asarray(exponents, dtype=np.int64).copy()
        exponents = np.broadcast_to(exponents, base.shape).copy()
        result = np.full(base.shape, self.identity_index)
        square = base.copy()
        while (exponents > 0).any():
            odd = (exponents & 1).astype(bool)
            if odd.any():
                result[odd] = self.multiply(result[odd], square[odd])
            exponents >>= 1
            if (exponents > 0).any():
                square = self.multiply(square, square)
        return result

    @cached_property
    def inverses(self) -> np.ndarray:
        return self.powers(self.element_orders - 1)

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(np.unique(self.element_orders)))

    @cached_property
    def fixed_space_dims(self) -> np.ndarray:
        eye = np.eye(self.n, dtype=np.int64)
        shifted = self.field.add_table[self.matrices, self.field.neg_table[eye][None]]
        return self.n - self.field.batched_rank(shifted)

    @cached_property
    def determinants(self) -> np.ndarray:
        return np.array(
            [self.element(i).det() for i in range(self.order)], dtype=np.int64
        )

    def generators(self) -> np.ndarray:
        """Ordinals of a generating set (elementary matrices plus a diagonal)."""
        n, f = self.n, self.field
        gens = []
        if self.kind == GroupKind.SYM:
            for i in range(n - 1):
                perm = list(range(n))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                gens.append(_permutation_matrix(perm))
        else:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    for a in range(1, f.q):
                        m = np.eye(n, dtype=np.int64)
                        m[i, j] = a
                        gens.append(m)
            if self.kind == GroupKind.GL and f.q > 2:
                m = np.eye(n, dtype=np.int64)
                m[0, 0] = f.generator
                gens.append(m)
        if not gens:
            return np.array([self.identity_index])
        return self.index_of(self.encode(np.stack(gens)))

    def conjugacy_classes(self, progress: bool = False) -> ConjugacyClasses:
        if self._classes is None:
            self._classes = _compute_classes(self, progress)
        return self._classes

    def to_bytes(self) -> bytes:
        f = self.field
        header = _HEADER.pack(
            GROUP_MAGIC,
            GROUP_FORMAT_VERSION,
            _KIND_CODES[self.kind],
            self.n,
            f.p,
            f.m,
        )
        modulus = bytes(f.modulus)
        return (
            header
            + struct.pack("<B", len(modulus))
            + modulus
            + struct.pack("<Q", self.order)
            + self.codes.astype("<i8").tobytes()
        )

    @classmethod
    def from_bytes(cls, payload: bytes) -> "GroupTable":
        try:
            magic, version, kind_code, n, p, m = _HEADER.unpack_from(payload, 0)
            offset = _HEADER.size
            (length,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            modulus = tuple(payload[offset : offset + length])
            offset += length
            (count,) = struct.unpack_from("<Q", payload, offset)
            offset += 8
        except struct.error as e:
            raise InvalidInputError(f"Truncated group table: {e}")
        if magic != GROUP_MAGIC or version != GROUP_FORMAT_VERSION:
            raise InvalidInputError(f"Unknown group table format {magic!r} v{version}")
        field = get_field(p**m)
        if field.modulus != modulus:
            raise InvalidInputError(f"Group table modulus {modulus} != {field.modulus}")
        kind = next(k for k, code in _KIND_CODES.items() if code == kind_code)
        codes = np.frombuffer(payload, dtype="<i8", count=count, offset=offset)
        return cls(kind, n, field, codes.astype(np.int64))


def _permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    m = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(perm):
        m[j, i] = 1
    return m


def _compute_classes(table: GroupTable, progress: bool) -> ConjugacyClasses:
    gens = table.generators()
    gen_inverses = table.inverses[gens]
    everything = np.arange(table.order)
    perms = []
    for g, g_inv in tqdm(
        list(zip(gens, gen_inverses)), desc="conjugation", disable=not progress
    ):
        left = table.multiply(np.full(table.order, g), everything)
        perms.append(table.multiply(left, np.full(table.order, g_inv)))
    # union-find by label propagation with pointer jumping
    labels = everything.copy()
    while True:
        previous = labels.copy()
        for perm in perms:
            np.minimum.at(labels, perm, labels.copy())
            labels = np.minimum(labels, labels[perm])
        labels = labels[labels]
        if np.array_equal(labels, previous):
            break
    roots, inverse, sizes = np.unique(labels, return_inverse=True, return_counts=True)
    orders = table.element_orders[roots]
    identity = table.identity_index
    keys = [
        (0 if root == identity else 1, int(order), int(size), int(root))
        for root, order, size in zip(roots, orders, sizes)
    ]
    ranking = sorted(range(len(roots)), key=lambda i: keys[i])
    position = np.empty(len(roots), dtype=np.int64)
    position[ranking] = np.arange(len(roots))
    logger.debug(f"{table.cache_key}: {len(roots)} conjugacy classes")
    return ConjugacyClasses(
        labels=position[inverse],
        representatives=roots[ranking],
        sizes=sizes[ranking],
        orders=orders[ranking],
    )


def conjugacy_class_of(g: MatrixFq, table: GroupTable) -> List[MatrixFq]:
    classes = table.conjugacy_classes()
    label = classes.labels[table.ordinal(g)]
    return [table.element(i) for i in classes.members(label)]


def _check_order(kind: GroupKind, n: int, q_value: int, cap: Optional[int]) -> int:
    limit = DEFAULT_GROUP_CAP if cap is None else cap
    if kind == GroupKind.SYM:
        size = 1
        for i in range(2, n + 1):
            size *= i
    else:
        size = gl_order(n)(q_value)
        if kind == GroupKind.SL:
            size //= q_value - 1
    if size > limit:
        raise ResourceLimitError("group_order", limit, size)
    return size


def enumerate_group(
    kind: GroupKind,
    n: int,
    field: FqField,
    cap: Optional[int] = None,
    progress: bool = False,
) -> GroupTable:
    """Every element of GL_n, SL_n (over field) or S_n (as permutation matrices).

    Raises:
        ResourceLimitError: If the group order exceeds the cap
    """
    kind = GroupKind(kind)
    if n < 1:
        raise InvalidInputError(f"Group dimension must be positive, got {n}")
    expected = _check_order(kind, n, field.q, cap)
    if field.q ** (n * n) >= 2**63:
        raise InvalidInputError(
            f"Encodings of {n}x{n} matrices over F_{field.q} do not fit in 63 bits"
        )
    if kind == GroupKind.SYM:
        mats = np.stack(
            [_permutation_matrix(p) for p in itertools.permutations(range(n))]
        )
        table = GroupTable(kind, n, field, _encode(mats, field, n))
    else:
        vectors = all_vectors(n, field)
        prefixes = np.zeros((1, 0, n), dtype=np.int64)
        for level in tqdm(range(n), desc=f"{kind.value}_{n}({field.q})", disable=not progress):
            count = len(prefixes)
            grown = np.concatenate(
                [
                    np.repeat(prefixes, len(vectors), axis=0),
                    np.tile(vectors, (count, 1))[:, None, :],
                ],
                axis=1,
            )
            prefixes = grown[field.batched_rank(grown) == level + 1]
        if kind == GroupKind.SL:
            prefixes = prefixes[_batched_det_is_one(prefixes, field)]
        table = GroupTable(kind, n, field, _encode(prefixes, field, n))
    if table.order != expected:
        raise InternalError(f"Enumerated {table.order} elements, expected {expected}")
    logger.debug(f"Enumerated {table.cache_key} with {table.order} elements")
    return table


def _encode(mats: np.ndarray, field: FqField, n: int) -> np.ndarray:
    weights = field.q ** np.arange(n * n, dtype=np.int64)
    return mats.reshape(len(mats), n * n) @ weights


def _batched_det_is_one(mats: np.ndarray, field: FqField) -> np.ndarray:
    return np.array(
        [MatrixFq.from_array(m, field).det() == 1 for m in mats], dtype=bool
    )


def eigenvalue_one_mass(table: GroupTable) -> Fraction:
    """Fraction of elements with no nonzero fixed vector."""
    return Fraction(int((table.fixed_space_dims == 0).sum()), table.order)


def transvection_ordinals(table: GroupTable) -> np.ndarray:
    """Ordinals of the transvection class inside an enumerated GL or SL table."""
    return np.sort(table.index_of(table.encode(transvection_arrays(table.n, table.field))))


def group_summary(table: GroupTable) -> Dict[str, object]:
    classes = table.conjugacy_classes()
    return {
        "kind": table.kind.value,
        "n": table.n,
        "q": table.field.q,
        "order": table.order,
        "classes": len(classes),
        "exponent": table.exponent,
    }
