"""Cusp-form parametrization of GL_n(F_q) irreps and everything computed from it.

An irrep is an unsplit part (cuspidals of size >= 2 with isobaric shapes),
a split part (non-trivial GL_1 characters with SPS shapes) and the SPS
shape carried by the trivial character. Dimensions and transvection
characters are exact polynomials in q obtained by folding block data with
the two-Grassmannian formula for induced characters.
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import divisors, factorint

from .errors import (
    InvalidInputError,
    NoRankConstituentError,
    ResourceLimitError,
    UnsupportedError,
)
from .matgroup import GroupKind
from .partitions import EMPTY, Partition, partitions_of, pieri_expand
from .qseries import ONE, LeadingTerm, QPoly, exact_ratio, gauss_binomial, leading_ratio
from .sps import CharacterRatio, sps_rep

logger = logging.getLogger(__name__)

DEFAULT_IRREP_CAP = 20000


# Data model


@dataclass(frozen=True)
class CuspidalSlot:
    """A cuspidal irrep of GL_size; the label is opaque but canonical."""

    size: int
    label: str

    def __post_init__(self):
        if self.size < 1:
            raise InvalidInputError(f"Cuspidal size must be positive, got {self.size}")
        object.__setattr__(self, "label", str(self.label))


@dataclass(frozen=True)
class UnsplitEntry:
    slot: CuspidalSlot
    multiplicity: int
    shape: Partition

    def __post_init__(self):
        if self.slot.size < 2:
            raise InvalidInputError(
                f"Unsplit cuspidals need size >= 2, got {self.slot.size}"
            )
        if self.multiplicity < 1 or self.shape.weight != self.multiplicity:
            raise InvalidInputError(
                f"Isobaric shape {self.shape} must have weight {self.multiplicity}"
            )

    @property
    def size(self) -> int:
        return self.slot.size * self.multiplicity

    def sort_key(self) -> Tuple:
        return (self.slot.size, len(self.slot.label), self.slot.label)


@dataclass(frozen=True)
class SplitEntry:
    chi: int
    shape: Partition

    def __post_init__(self):
        if self.chi < 1:
            raise InvalidInputError(
                f"Split characters must be non-trivial (index >= 1), got {self.chi}"
            )
        if self.shape.weight < 1:
            raise InvalidInputError("Split entries need a non-empty shape")


@dataclass(frozen=True)
class UnsplitPart:
    entries: Tuple[UnsplitEntry, ...] = ()

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=UnsplitEntry.sort_key))
        slots = [e.slot for e in entries]
        if len(set(slots)) != len(slots):
            raise InvalidInputError(f"Unsplit cuspidals must be distinct: {slots}")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return sum(e.size for e in self.entries)


@dataclass(frozen=True)
class SplitPart:
    entries: Tuple[SplitEntry, ...] = ()

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda e: e.chi))
        chis = [e.chi for e in entries]
        if len(set(chis)) != len(chis):
            raise InvalidInputError(f"Split characters must be distinct: {chis}")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return sum(e.shape.weight for e in self.entries)


@dataclass(frozen=True)
class PcfIrrep:
    """An irrep of GL_n(F_q) in unsplit / split / trivial-block form."""

    n: int
    unsplit: UnsplitPart = field(default_factory=UnsplitPart)
    split: SplitPart = field(default_factory=SplitPart)
    trivial_shape: Partition = EMPTY

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError(f"n must be nonnegative, got {self.n}")
        total = self.unsplit.size + self.split.size + self.trivial_shape.weight
        if total != self.n:
            raise InvalidInputError(
                f"Block sizes add up to {total}, expected n={self.n}"
            )

    @classmethod
    def sps(cls, shape: Partition) -> "PcfIrrep":
        return cls(shape.weight, trivial_shape=shape)

    @classmethod
    def cuspidal(cls, size: int, label: str = "1") -> "PcfIrrep":
        slot = CuspidalSlot(size, label)
        if size == 1:
            raise InvalidInputError("Size-1 cuspidals are GL_1 characters")
        return cls(size, unsplit=UnsplitPart((UnsplitEntry(slot, 1, Partition.of(1)),)))

    @classmethod
    def from_json(cls, data: dict) -> "PcfIrrep":
        try:
            unsplit = UnsplitPart(
                tuple(
                    UnsplitEntry(
                        CuspidalSlot(int(e["size"]), str(e["label"])),
                        int(e["mult"]),
                        Partition.from_json(e["shape"]),
                    )
                    for e in data.get("unsplit", [])
                )
            )
            split = SplitPart(
                tuple(
                    SplitEntry(int(e["chi"]), Partition.from_json(e["shape"]))
                    for e in data.get("split", [])
                )
            )
            trivial = Partition.from_json(data.get("trivial_shape", []))
            return cls(int(data["n"]), unsplit, split, trivial)
        except (KeyError, TypeError, AttributeError) as e:
            raise InvalidInputError(f"Invalid PcfIrrep JSON: {e}")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "unsplit": [
                {
                    "size": e.slot.size,
                    "label": e.slot.label,
                    "mult": e.multiplicity,
                    "shape": e.shape.to_json(),
                }
                for e in self.unsplit.entries
            ],
            "split": [
                {"chi": e.chi, "shape": e.shape.to_json()} for e in self.split.entries
            ],
            "trivial_shape": self.trivial_shape.to_json(),
        }

    def sps_shapes(self) -> List[Partition]:
        shapes = [e.shape for e in self.split.entries]
        if self.trivial_shape.weight:
            shapes.append(self.trivial_shape)
        return shapes


def validate_for_q(r: PcfIrrep, q_value: int) -> None:
    """Check labels against a concrete field size.

    Raises:
        InvalidInputError: If a split index or cuspidal label is out of range
    """
    for e in r.split.entries:
        if e.chi > q_value - 2:
            raise InvalidInputError(
                f"Split character {e.chi} out of range 1..{q_value - 2} for q={q_value}"
            )
    for e in r.unsplit.entries:
        if e.slot.label not in set(cuspidal_labels(e.slot.size, q_value)):
            raise InvalidInputError(
                f"{e.slot.label!r} is not a size-{e.slot.size} cuspidal label at q={q_value}"
            )


# Tensor rank and the eta correspondence


def tensor_corank(r: PcfIrrep) -> int:
    return max((shape.first_row for shape in r.sps_shapes()), default=0)


def strict_tensor_corank(r: PcfIrrep) -> int:
    return r.trivial_shape.first_row


def tensor_rank(r: PcfIrrep) -> int:
    return r.n - tensor_corank(r)


def strict_tensor_rank(r: PcfIrrep) -> int:
    return r.n - strict_tensor_corank(r)


def eta(tau: PcfIrrep, n: int) -> PcfIrrep:
    """The strict-rank-k irrep of GL_n attached to an irrep of GL_k.

    Raises:
        InvalidInputError: If tau lives on a larger group than GL_n
        NoRankConstituentError: If strict rank(tau) < 2k - n
    """
    k = tau.n
    if k > n:
        raise InvalidInputError(f"eta needs k <= n, got k={k}, n={n}")
    if strict_tensor_corank(tau) > n - k:
        raise NoRankConstituentError(
            f"Strict tensor rank {strict_tensor_rank(tau)} of tau is below 2k-n={2 * k - n}"
        )
    return PcfIrrep(n, tau.unsplit, tau.split, tau.trivial_shape.prepend_row(n - k))


def decompose_induced(tau: PcfIrrep, n: int) -> List[PcfIrrep]:
    """Constituents of Ind from P_{k,n-k} of tau tensor trivial, multiplicity free."""
    if tau.n > n:
        raise InvalidInputError(f"Induction needs tau.n <= n, got {tau.n} > {n}")
    return [
        PcfIrrep(n, tau.unsplit, tau.split, shape)
        for shape in pieri_expand(tau.trivial_shape, n - tau.n)
    ]


# Dimensions and transvection characters


@dataclass(frozen=True)
class _Block:
    size: int
    dim: QPoly
    char: QPoly


def _q_minus_one(j: int) -> QPoly:
    return QPoly({j: 1, 0: -1})


@lru_cache(maxsize=None)
def isobaric_dim(size: int, multiplicity: int, shape: Tuple[int, ...]) -> QPoly:
    """Dimension of the constituent of Ind(kappa^{multiplicity}) indexed by shape.

    The SPS dimension of GL_m(F_{q^size}) transported by q -> q^size, times
    the product of (q^j - 1) over j <= size*m not divisible by size. The
    one-row shape gives the smallest constituent.
    """
    result = sps_rep(Partition(shape)).dim.substitute_q_power(size)
    for j in range(1, size * multiplicity + 1):
        if j % size:
            result = result * _q_minus_one(j)
    return result


def cuspidal_dim(size: int) -> QPoly:
    return isobaric_dim(size, 1, (1,))


@lru_cache(maxsize=None)
def _block(signature: Tuple) -> _Block:
    if signature[0] == "sps":
        shape = Partition(signature[1])
        rep = sps_rep(shape)
        return _Block(shape.weight, rep.dim, rep.char_at_T)
    _, size, multiplicity, shape = signature
    dim = isobaric_dim(size, multiplicity, shape)
    u = size * multiplicity
    # every rank-u irrep of GL_u has chi(T)/dim = -1/(q^{u-1}-1)
    char = -dim.exquo(_q_minus_one(u - 1))
    return _Block(u, dim, char)


def combine_blocks(a: _Block, b: _Block) -> _Block:
    """Parabolic induction of a (on the subspace) times b (on the quotient).

    T-fixed subspaces W of dimension a either lie in ker(T-I) avoiding
    Im(T-I), lie in ker(T-I) containing Im(T-I), or contain Im(T-I) without
    lying in ker(T-I); T acts on W and V/W accordingly.
    """
    n = a.size + b.size
    inside = gauss_binomial(n - 2, a.size - 1)
    avoiding = gauss_binomial(n - 1, a.size) - inside
    outside = gauss_binomial(n - 1, a.size - 1) - inside
    dim = gauss_binomial(n, a.size) * a.dim * b.dim
    char = avoiding * a.dim * b.char + inside * a.dim * b.dim + outside * a.char * b.dim
    return _Block(n, dim, char)


def block_signature(r: PcfIrrep) -> Tuple:
    items = [
        ("iso", e.slot.size, e.multiplicity, e.shape.parts) for e in r.unsplit.entries
    ]
    items += [("sps", shape.parts) for shape in r.sps_shapes()]
    return tuple(sorted(items))


@lru_cache(maxsize=None)
def _fold(signature: Tuple) -> _Block:
    blocks = [_block(s) for s in signature]
    if not blocks:
        return _Block(0, ONE, ONE)
    acc = blocks[0]
    for b in blocks[1:]:
        acc = combine_blocks(acc, b)
    return acc


def dim(r: PcfIrrep) -> QPoly:
    """Exact dimension of r as a polynomial in q."""
    return _fold(block_signature(r)).dim


def char_at_T(r: PcfIrrep) -> QPoly:
    """Exact character value of r at a transvection (identity when n < 2)."""
    return _fold(block_signature(r)).char


def cr_at_T(r: PcfIrrep, q_value: Optional[int] = None) -> CharacterRatio:
    """chi_r(T)/dim(r) as c/q^e + o(...), exact at q_value when given."""
    folded = _fold(block_signature(r))
    constant, exponent = leading_ratio(folded.char, folded.dim)
    exact = exact_ratio(folded.char, folded.dim, q_value) if q_value else None
    if exponent is None:
        logger.info(f"Character ratio vanishes identically for {r.to_json()}")
    return CharacterRatio(constant, exponent, exact)


def sl_character_ratio_transfer(
    r: PcfIrrep, q_value: Optional[int] = None
) -> CharacterRatio:
    """Ratio for the SL_n constituents of r; equal to the GL ratio when n >= 3.

    Raises:
        UnsupportedError: For n < 3, where the transvection class splits in SL_n
    """
    if r.n < 3:
        raise UnsupportedError(
            f"SL ratio transfer needs n >= 3 (the SL_2 transvection class splits), got n={r.n}"
        )
    return cr_at_T(r, q_value)


# Bounds and counts


@dataclass(frozen=True)
class DimBounds:
    n: int
    k: int
    upper: LeadingTerm
    lower: LeadingTerm
    upper_witness: PcfIrrep
    lower_witness: PcfIrrep

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rank": self.k,
            "upper": self.upper.to_json(),
            "lower": self.lower.to_json(),
            "upper_witness": self.upper_witness.to_json(),
            "lower_witness": self.lower_witness.to_json(),
        }


def _isobaric_two_witness(n: int, k: int) -> Tuple[PcfIrrep, int]:
    entries = []
    if k % 2 == 0:
        half = k // 2
        entries.append(UnsplitEntry(CuspidalSlot(2, "1"), half, Partition.of(half)))
        degree = k * (n - k) + k * k // 4
    else:
        entries.append(UnsplitEntry(CuspidalSlot(3, "1"), 1, Partition.of(1)))
        half = (k - 3) // 2
        if half:
            entries.append(UnsplitEntry(CuspidalSlot(2, "1"), half, Partition.of(half)))
        degree = k * (n - k) + (k - 3) ** 2 // 4 + 3 * (k - 2)
    witness = PcfIrrep(
        n, UnsplitPart(tuple(entries)), trivial_shape=Partition(((n - k),) if n > k else ())
    )
    return witness, degree


def dim_bounds(n: int, k: int) -> DimBounds:
    """Extreme dimensions of tensor-rank-k irreps of GL_n with witnesses.

    Raises:
        InvalidInputError: If k is outside 0..n
        NoRankConstituentError: For GL_1 with k = 1
    """
    if n < 1 or not 0 <= k <= n:
        raise InvalidInputError(f"dim_bounds needs n >= 1 and 0 <= k <= n, got n={n}, k={k}")
    if n == 1 and k == 1:
        raise NoRankConstituentError("GL_1 has no irreps of tensor rank 1")
    if k < n:
        upper_witness = PcfIrrep.sps(Partition((n - k,) + (1,) * k))
        upper = k * (n - k) + k * (k - 1) // 2
    else:
        upper_witness = PcfIrrep.cuspidal(n)
        upper = n * (n - 1) // 2
    if k == 0:
        lower_witness, lower = PcfIrrep.sps(Partition.of(n)), 0
    elif 2 * k < n:
        lower_witness, lower = PcfIrrep.sps(Partition.of(n - k, k)), k * (n - k)
    elif 3 * k < 2 * n:
        shape = Partition(tuple(p for p in (n - k, n - k, 2 * k - n) if p))
        lower_witness, lower = PcfIrrep.sps(shape), (n - k) * (3 * k - n)
    else:
        lower_witness, lower = _isobaric_two_witness(n, k)
    return DimBounds(
        n, k, LeadingTerm(upper, 1), LeadingTerm(lower, 1), upper_witness, lower_witness
    )


@dataclass(frozen=True)
class CountLeading:
    """Leading term of #(irreps of tensor rank k); ``constant`` names an unknown c_k."""

    group: GroupKind
    n: int
    k: int
    degree: Optional[int]
    coefficient: Optional[int]
    constant: Optional[str] = None
    note: Optional[str] = None

    def __str__(self) -> str:
        if self.degree is None:
            return "0"
        head = self.constant if self.constant else str(self.coefficient)
        return f"{head}*q^{self.degree}"

    def to_json(self) -> dict:
        return {
            "group": self.group.value,
            "n": self.n,
            "rank": self.k,
            "degree": self.degree,
            "coefficient": self.coefficient,
            "constant": self.constant,
            "note": self.note,
            "term": str(self),
        }


def count_leading(n: int, k: int, group: GroupKind = GroupKind.GL) -> CountLeading:
    """Leading term of the number of rank-k irreps of GL_n or SL_n.

    Raises:
        UnsupportedError: For SL with n < 3
    """
    group = GroupKind(group)
    if n < 1 or not 0 <= k <= n:
        raise InvalidInputError(f"count_leading needs 0 <= k <= n, got n={n}, k={k}")
    rule = f"c_{n - 1} + c_{n} = 1, both in (0,1)"
    if group == GroupKind.SL:
        if n < 3:
            raise UnsupportedError(f"Rank counts for SL_n need n >= 3, got n={n}")
        if k <= n - 2:
            return CountLeading(group, n, k, k, 1)
        return CountLeading(group, n, k, n - 1, None, f"c_{k}", rule)
    if group != GroupKind.GL:
        raise InvalidInputError(f"count_leading supports GL and SL, got {group.value}")
    if n == 1:
        if k == 0:
            return CountLeading(group, n, k, 1, 1, note="exactly q-1 characters")
        return CountLeading(group, n, k, None, 0, note="GL_1 has no rank-1 irreps")
    if k <= n - 2:
        return CountLeading(group, n, k, k + 1, 1)
    return CountLeading(group, n, k, n, None, f"c_{k}", rule)


# Concrete cuspidal labels at a given q


def _mobius(n: int) -> int:
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def cuspidal_count(size: int, q_value: int) -> int:
    """Number of cuspidal irreps of GL_size(F_q) (Frobenius orbits of length size)."""
    if size < 1:
        raise InvalidInputError(f"Cuspidal size must be positive, got {size}")
    total = sum(_mobius(size // d) * (q_value**d - 1) for d in divisors(size))
    return total // size


def _orbit(j: int, size: int, q_value: int) -> List[int]:
    modulus = q_value**size - 1
    orbit = []
    x = j % modulus
    while x not in orbit:
        orbit.append(x)
        x = (x * q_value) % modulus
    return orbit


def canonical_label(j: int, size: int, q_value: int) -> str:
    if size == 1:
        return str(j % (q_value - 1))
    return str(min(_orbit(j, size, q_value)))


@lru_cache(maxsize=None)
def _labels(size: int, q_value: int) -> Tuple[str, ...]:
    if size == 1:
        return tuple(str(j) for j in range(q_value - 1))
    labels = []
    for j in range(q_value**size - 1):
        orbit = _orbit(j, size, q_value)
        if len(orbit) == size and j == min(orbit):
            labels.append(str(j))
    return tuple(labels)


def cuspidal_labels(size: int, q_value: int) -> List[str]:
    """Canonical labels: the least exponent in each Frobenius orbit of length size."""
    return list(_labels(size, q_value))


# Determinant twists


def _support(r: PcfIrrep) -> List[Tuple[int, int, int, Partition]]:
    items = [(1, 0, s.weight, s) for s in [r.trivial_shape] if s.weight]
    items += [(1, e.chi, e.shape.weight, e.shape) for e in r.split.entries]
    for e in r.unsplit.entries:
        try:
            label = int(e.slot.label)
        except ValueError:
            raise InvalidInputError(f"Cannot twist opaque cuspidal label {e.slot.label!r}")
        items.append((e.slot.size, label, e.multiplicity, e.shape))
    return items


def _from_support(n: int, items: Sequence[Tuple[int, int, int, Partition]]) -> PcfIrrep:
    trivial = EMPTY
    split = []
    unsplit = []
    for size, label, mult, shape in items:
        if size == 1 and label == 0:
            trivial = shape
        elif size == 1:
            split.append(SplitEntry(label, shape))
        else:
            unsplit.append(UnsplitEntry(CuspidalSlot(size, str(label)), mult, shape))
    return PcfIrrep(n, UnsplitPart(tuple(unsplit)), SplitPart(tuple(split)), trivial)


def twist(r: PcfIrrep, c: int, q_value: int) -> PcfIrrep:
    """r tensor (chi_c o det) for the c-th character of F_q^*."""
    twisted = []
    for size, label, mult, shape in _support(r):
        shift = c * (q_value**size - 1) // (q_value - 1)
        twisted.append((size, int(canonical_label(label + shift, size, q_value)), mult, shape))
    return _from_support(r.n, twisted)


def twist_stabilizer(r: PcfIrrep, q_value: int) -> int:
    """Number of determinant characters fixing r under twisting."""
    return sum(1 for c in range(q_value - 1) if twist(r, c, q_value) == r)


# Full enumeration


def _cuspidal_supports(n: int, q_value: int) -> List[Tuple[int, int]]:
    supports = []
    for size in range(1, n + 1):
        supports.extend((size, int(label)) for label in cuspidal_labels(size, q_value))
    return supports


def enumerate_irreps(
    n: int, q_value: int, cap: Optional[int] = None
) -> List[PcfIrrep]:
    """Every irrep of GL_n(F_q) exactly once.

    Raises:
        ResourceLimitError: If more than ``cap`` irreps would be produced
    """
    if n < 1:
        raise InvalidInputError(f"enumerate_irreps needs n >= 1, got {n}")
    limit = DEFAULT_IRREP_CAP if cap is None else cap
    supports = _cuspidal_supports(n, q_value)
    result: List[PcfIrrep] = []

    def choose(start: int, remaining: int, chosen: list) -> None:
        if remaining == 0:
            result.append(_from_support(n, chosen))
            if len(result) > limit:
                raise ResourceLimitError("irreps", limit, len(result))
            return
        for i in range(start, len(supports)):
            size, label = supports[i]
            if size > remaining:
                break
            for mult in range(1, remaining // size + 1):
                for shape in partitions_of(mult, cap=mult):
                    chosen.append((size, label, mult, shape))
                    choose(i + 1, remaining - size * mult, chosen)
                    chosen.pop()

    choose(0, n, [])
    logger.debug(f"Enumerated {len(result)} irreps of GL_{n}(F_{q_value})")
    return result


def rank_counts(
    n: int, q_value: int, group: GroupKind = GroupKind.GL, cap: Optional[int] = None
) -> Dict[int, int]:
    """Exact number of irreps of each tensor rank."""
    group = GroupKind(group)
    if group == GroupKind.GL:
        counts = Counter(tensor_rank(r) for r in enumerate_irreps(n, q_value, cap))
    elif group == GroupKind.SL:
        counts = Counter(entry.rank for entry in sl_profile(n, q_value, cap))
    else:
        raise InvalidInputError(f"rank_counts supports GL and SL, got {group.value}")
    return {k: counts.get(k, 0) for k in range(n + 1)}


@dataclass(frozen=True)
class SlConstituent:
    """One SL_n(F_q) irrep seen through the GL irreps restricting onto it."""

    rank: int
    dim: int
    char_at_T: Optional[int]
    stabilizer: int
    representative: PcfIrrep
    is_trivial: bool = False


def twist_orbits(n: int, q_value: int, cap: Optional[int] = None) -> List[List[PcfIrrep]]:
    """GL irreps grouped into orbits under determinant twists."""
    seen = set()
    orbits = []
    for r in enumerate_irreps(n, q_value, cap):
        if r in seen:
            continue
        orbit = sorted(
            {twist(r, c, q_value) for c in range(q_value - 1)},
            key=lambda x: repr(x.to_json()),
        )
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def sl_profile(n: int, q_value: int, cap: Optional[int] = None) -> List[SlConstituent]:
    """SL_n(F_q) irreps from restriction of one GL irrep per twist orbit.

    A GL irrep with twist stabilizer s restricts to s distinct irreps of
    dimension dim/s; for n >= 3 they share the value chi(T)/s.
    """
    profile = []
    trivial = PcfIrrep.sps(Partition.of(n))
    for orbit in twist_orbits(n, q_value, cap):
        r = orbit[0]
        s = (q_value - 1) // len(orbit)
        d = dim(r)(q_value)
        chi = char_at_T(r)(q_value) if n >= 3 else None
        if d % s or (chi is not None and chi % s):
            logger.error(f"Restriction of {r.to_json()} does not split evenly by {s}")
            raise InvalidInputError(f"Twist stabilizer {s} does not divide the data of {r}")
        is_trivial = trivial in orbit
        for _ in range(s):
            profile.append(
                SlConstituent(
                    tensor_rank(r),
                    d // s,
                    None if chi is None else chi // s,
                    s,
                    r,
                    is_trivial,
                )
            )
    return profile


@dataclass(frozen=True)
class OmegaFamily:
    """The two rank-one families inside the permutation representation on F_q^n."""

    twisted: Tuple[PcfIrrep, ...]
    untwisted: PcfIrrep


def omega_family(n: int, q_value: int) -> OmegaFamily:
    """eta of the non-trivial GL_1 characters and eta of the trivial one minus 1."""
    if n < 2:
        raise InvalidInputError(f"omega_family needs n >= 2, got {n}")
    twisted = tuple(
        eta(PcfIrrep(1, split=SplitPart((SplitEntry(c, Partition.of(1)),))), n)
        for c in range(1, q_value - 1)
    )
    return OmegaFamily(twisted, eta(PcfIrrep.sps(Partition.of(1)), n))


@dataclass(frozen=True)
class RatioRow:
    """One family of irreps sharing rank, dimension and transvection character."""

    rank: int
    count: int
    dim: QPoly
    char_at_T: QPoly
    ratio: CharacterRatio
    log_dim: float
    log_ratio: Optional[float]
    example: PcfIrrep

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "count": self.count,
            "dim": self.dim.to_json(),
            "char_at_T": self.char_at_T.to_json(),
            "ratio": self.ratio.to_json(),
            "log_q_dim": self.log_dim,
            "log_inv_q_abs_ratio": self.log_ratio,
            "example": self.example.to_json(),
        }


def ratio_table(n: int, q_value: int, cap: Optional[int] = None) -> List[RatioRow]:
    """Rank, log_q dim and log_{1/q} |CR| per family of GL_n(F_q) irreps."""
    families: Dict[Tuple, List[PcfIrrep]] = defaultdict(list)
    for r in enumerate_irreps(n, q_value, cap):
        families[(tensor_rank(r), block_signature(r))].append(r)
    merged: Dict[Tuple, List[PcfIrrep]] = defaultdict(list)
    for (rank, signature), members in families.items():
        folded = _fold(signature)
        merged[(rank, folded.dim, folded.char)].extend(members)
    rows = []
    for (rank, d, chi), members in merged.items():
        ratio = cr_at_T(members[0], q_value)
        d_value = d(q_value)
        log_ratio = None
        if ratio.exact:
            log_ratio = -math.log(abs(ratio.exact)) / math.log(q_value)
        rows.append(
            RatioRow(
                rank,
                len(members),
                d,
                chi,
                ratio,
                math.log(d_value) / math.log(q_value),
                log_ratio,
                members[0],
            )
        )
    rows.sort(key=lambda row: (row.rank, row.log_dim, str(row.char_at_T)))
    return rows


def iter_small_irreps(max_n: int, q_value: int) -> Iterator[PcfIrrep]:
    """All irreps of GL_n(F_q) for 1 <= n <= max_n."""
    for n in range(1, max_n + 1):
        yield from enumerate_irreps(n, q_value)
