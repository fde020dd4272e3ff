"""The transvection random walk: exact distributions, bounds and Monte Carlo."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Union

import numpy as np
from tqdm import tqdm

from .chartab.dixon import CharacterTable
from .errors import (
    InternalError,
    InvalidInputError,
    ResourceLimitError,
    UnsupportedError,
    VerificationError,
)
from .matgroup import (
    DEFAULT_GROUP_CAP,
    ConjugacyClasses,
    FqField,
    GroupKind,
    GroupTable,
    eigenvalue_one_mass,
    transvection_ordinals,
)
from .pcf import sl_profile
from .qseries import prime_power

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = Fraction(1, 4)
FLOAT_TOLERANCE = 1e-12
MC_CHUNK = 1024

Mass = Union[Fraction, float]


class SupportKind(str, Enum):
    GROUP = "group"
    CLASSES = "classes"


@dataclass
class Distribution:
    """Probability masses indexed by group ordinal or by conjugacy class.

    Exact distributions hold ``Fraction`` objects, float ones ``float64``.
    Class-supported masses are totals over the class, not per element.
    """

    support: SupportKind
    masses: np.ndarray
    exact: bool = True

    def __post_init__(self):
        self.support = SupportKind(self.support)
        if self.exact:
            total = sum(self.masses, Fraction(0))
            if total != 1 or any(m < 0 for m in self.masses):
                raise VerificationError(f"Exact masses do not form a distribution (total {total})")
        else:
            total = float(np.sum(self.masses))
            if abs(total - 1) > FLOAT_TOLERANCE or (self.masses < -FLOAT_TOLERANCE).any():
                raise VerificationError(f"Float masses do not form a distribution (total {total})")

    def __len__(self) -> int:
        return len(self.masses)

    def mass(self, i: int) -> Mass:
        return self.masses[i]

    def as_floats(self) -> np.ndarray:
        return np.array([float(m) for m in self.masses], dtype=np.float64)

    def to_json(self) -> dict:
        return {
            "support": self.support.value,
            "exact": self.exact,
            "masses": [str(m) if self.exact else float(m) for m in self.masses],
        }


def _from_numerators(
    numerators: np.ndarray, denominator: int, support: SupportKind
) -> Distribution:
    masses = np.array([Fraction(int(x), denominator) for x in numerators], dtype=object)
    return Distribution(support, masses, exact=True)


def uniform_distribution(
    table: GroupTable, on_classes: bool = False, exact: bool = True
) -> Distribution:
    if on_classes:
        sizes = table.conjugacy_classes().sizes
        if exact:
            return _from_numerators(sizes, table.order, SupportKind.CLASSES)
        return Distribution(SupportKind.CLASSES, sizes / table.order, exact=False)
    if exact:
        return _from_numerators(np.ones(table.order, dtype=np.int64), table.order, SupportKind.GROUP)
    return Distribution(SupportKind.GROUP, np.full(table.order, 1 / table.order), exact=False)


def push_to_classes(dist: Distribution, classes: ConjugacyClasses) -> Distribution:
    """Total mass of every conjugacy class."""
    if dist.support != SupportKind.GROUP:
        raise InvalidInputError("Only group-supported distributions can be pushed to classes")
    if dist.exact:
        totals = np.array(
            [sum(dist.masses[classes.members(c)], Fraction(0)) for c in range(len(classes))],
            dtype=object,
        )
        return Distribution(SupportKind.CLASSES, totals, exact=True)
    totals = np.bincount(classes.labels, weights=dist.masses, minlength=len(classes))
    return Distribution(SupportKind.CLASSES, totals, exact=False)


def tv_distance(p: Distribution, u: Distribution) -> Mass:
    """Half the L1 distance; exact when both sides are exact.

    Raises:
        InvalidInputError: If the supports differ
    """
    if p.support != u.support or len(p) != len(u):
        raise InvalidInputError(
            f"Support mismatch: {p.support.value}[{len(p)}] vs {u.support.value}[{len(u)}]"
        )
    if p.exact and u.exact:
        return sum((abs(a - b) for a, b in zip(p.masses, u.masses)), Fraction(0)) / 2
    return float(np.abs(p.as_floats() - u.as_floats()).sum() / 2)


# Exact convolution


def _check_walk_group(table: GroupTable, cap: Optional[int]) -> None:
    if table.kind == GroupKind.SYM or table.n < 2:
        raise InvalidInputError(f"{table.cache_key} has no transvections")
    limit = DEFAULT_GROUP_CAP if cap is None else cap
    if table.order > limit:
        raise ResourceLimitError("group_order", limit, table.order)


def _transvection_structure(
    table: GroupTable, classes: ConjugacyClasses, moves: np.ndarray
) -> np.ndarray:
    """A[a, c] = #{t in C : t^{-1} z_c lies in class a} for a fixed z_c in class c."""
    r = len(classes)
    counts = np.zeros((r, r), dtype=np.int64)
    inverse_moves = table.inverses[moves]
    for c in range(r):
        z = np.full(len(moves), classes.representatives[c])
        landed = classes.labels[table.multiply(inverse_moves, z)]
        counts[:, c] = np.bincount(landed, minlength=r)
    return counts


def iter_convolutions(
    table: GroupTable,
    steps: int,
    class_mode: bool = False,
    exact: bool = True,
    progress: bool = False,
    cap: Optional[int] = None,
) -> Iterator[Distribution]:
    """Distributions of the walk from the identity after 1, 2, ..., steps moves.

    Class mode tracks one value per class through the transvection column of
    the class algebra and yields class totals; group mode tracks every element.

    Raises:
        ResourceLimitError: If the group order exceeds the cap
    """
    _check_walk_group(table, cap)
    moves = transvection_ordinals(table)
    size = len(moves)
    dtype = object if exact else np.float64

    if class_mode:
        classes = table.conjugacy_classes(progress)
        structure = _transvection_structure(table, classes, moves)
        if exact:
            structure = structure.astype(object)
        sizes = classes.sizes.astype(object) if exact else classes.sizes
        values = np.zeros(len(classes), dtype=dtype)
        values[classes.labels[table.identity_index]] = 1
        denominator = 1
        for _ in tqdm(range(steps), desc="class convolution", disable=not progress):
            values = values.dot(structure)
            if exact:
                denominator *= size
                yield _from_numerators(values * sizes, denominator, SupportKind.CLASSES)
            else:
                values = values / size
                yield Distribution(SupportKind.CLASSES, values * sizes, exact=False)
        return

    everything = np.arange(table.order)
    translates = [np.full(table.order, t) for t in table.inverses[moves]]
    current = np.zeros(table.order, dtype=dtype)
    current[table.identity_index] = 1
    denominator = 1
    for _ in tqdm(range(steps), desc="convolution", disable=not progress):
        following = np.zeros(table.order, dtype=dtype)
        for t in translates:
            following = following + current[table.multiply(t, everything)]
        if exact:
            current = following
            denominator *= size
            yield _from_numerators(current, denominator, SupportKind.GROUP)
        else:
            current = following / size
            yield Distribution(SupportKind.GROUP, current.copy(), exact=False)


def exact_convolution(
    table: GroupTable,
    steps: int,
    class_mode: bool = False,
    exact: bool = True,
    progress: bool = False,
    cap: Optional[int] = None,
) -> Distribution:
    """Distribution of the product of ``steps`` uniform random transvections."""
    if steps < 1:
        raise InvalidInputError(f"Walk length must be positive, got {steps}")
    result = None
    for result in iter_convolutions(table, steps, class_mode, exact, progress, cap):
        pass
    return result


# Fourier side


def _require_transvection_table(ct: CharacterTable) -> None:
    if ct.group.kind == GroupKind.SYM or ct.group.n < 3:
        raise UnsupportedError(
            f"Transvection character ratios need GL_n or SL_n with n >= 3, got {ct.group.cache_key}"
        )


def _trivial_index(ct: CharacterTable) -> int:
    one = ct.field.rational(1)
    for i in range(ct.num_irreps):
        if all(np.array_equal(ct.values[i, c], one) for c in range(ct.num_classes)):
            return i
    raise InternalError(f"No trivial character in the table of {ct.group.cache_key}")


def _rational_ratios(ct: CharacterTable) -> Optional[List[Fraction]]:
    t = ct.transvection_class
    values = [ct.integer_value(i, t) for i in range(ct.num_irreps)]
    if any(v is None for v in values):
        return None
    return [Fraction(v, d) for v, d in zip(values, ct.dims)]


def fourier_distribution(ct: CharacterTable, steps: int, exact: bool = True) -> Distribution:
    """Class totals of P^{*l} = (1/|G|) sum_pi dim(pi) (conj chi_pi(T)/dim pi)^l chi_pi."""
    if steps < 0:
        raise InvalidInputError(f"Walk length must be non-negative, got {steps}")
    ratios = _rational_ratios(ct)
    sizes = ct.classes.sizes
    if exact and ratios is None:
        logger.info(f"Irrational transvection values in {ct.group.cache_key}; using floats")
        exact = False
    if exact:
        acc = np.zeros((ct.num_classes, ct.field.phi), dtype=object)
        for i, ratio in enumerate(ratios):
            coefficient = ct.dims[i] * ratio**steps
            if coefficient:
                acc = acc + ct.values[i].astype(object) * coefficient
        if any(x != 0 for x in acc[:, 1:].reshape(-1)):
            raise InternalError(f"Fourier sum for {ct.group.cache_key} is not rational")
        masses = np.array(
            [Fraction(acc[c, 0]) * int(sizes[c]) / ct.order for c in range(ct.num_classes)],
            dtype=object,
        )
        return Distribution(SupportKind.CLASSES, masses, exact=True)

    t = ct.transvection_class
    acc = np.zeros(ct.num_classes, dtype=np.complex128)
    for i in range(ct.num_irreps):
        d = ct.dims[i]
        ratio = ct.field.to_complex(ct.values[i, t]).conjugate() / d
        row = np.array([ct.field.to_complex(ct.values[i, c]) for c in range(ct.num_classes)])
        acc += d * ratio**steps * row
    return Distribution(SupportKind.CLASSES, acc.real * sizes / ct.order, exact=False)


def ds_upper_bound(ct: CharacterTable, steps: int) -> float:
    """(1/4) sum over non-trivial pi of dim^2 |chi_pi(T)/dim|^{2l}; bounds TV squared."""
    _require_transvection_table(ct)
    trivial = _trivial_index(ct)
    t = ct.transvection_class
    total = 0.0
    for i in range(ct.num_irreps):
        if i == trivial:
            continue
        d = ct.dims[i]
        ratio = abs(ct.field.to_complex(ct.values[i, t])) / d
        total += d * d * ratio ** (2 * steps)
    return total / 4


def spectral_mixing_rate(ct: CharacterTable) -> Fraction:
    """Largest |chi(T)/dim| over non-trivial irreps of an SL table."""
    _require_transvection_table(ct)
    if ct.group.kind != GroupKind.SL:
        raise InvalidInputError(f"Mixing rate needs an SL table, got {ct.group.cache_key}")
    ratios = _rational_ratios(ct)
    if ratios is None:
        raise InternalError(f"Irrational transvection values in {ct.group.cache_key}")
    trivial = _trivial_index(ct)
    return max(abs(r) for i, r in enumerate(ratios) if i != trivial)


def tvb_closed_form(n: int, q_value: int, steps: int) -> float:
    """(1/(2 sqrt q)) (1/q)^{l-n}."""
    if n < 3:
        raise UnsupportedError(f"Closed-form bound needs n >= 3, got {n}")
    prime_power(q_value)
    return (1 / (2 * math.sqrt(q_value))) * float(q_value) ** (n - steps)


def model_ds_bound(n: int, q_value: int, steps: int, cap: Optional[int] = None) -> float:
    """Upper-bound-lemma sum over the SL_n profile built from the cusp-form model."""
    if n < 3:
        raise UnsupportedError(f"SL character ratios need n >= 3, got {n}")
    total = 0.0
    for entry in sl_profile(n, q_value, cap):
        if entry.is_trivial:
            continue
        ratio = abs(Fraction(entry.char_at_T, entry.dim))
        total += float(entry.dim) ** 2 * float(ratio) ** (2 * steps)
    return total / 4


def model_mixing_rate(n: int, q_value: int, cap: Optional[int] = None) -> Fraction:
    """Largest non-trivial |chi(T)/dim| over the modelled SL_n profile."""
    if n < 3:
        raise UnsupportedError(f"SL character ratios need n >= 3, got {n}")
    return max(
        abs(Fraction(entry.char_at_T, entry.dim))
        for entry in sl_profile(n, q_value, cap)
        if not entry.is_trivial
    )


# Monte Carlo


@dataclass(frozen=True)
class McReport:
    n: int
    q: int
    steps: int
    trials: int
    seed: int
    histogram: Dict[int, int]

    def frequency_at_least(self, dim: int) -> Fraction:
        hits = sum(count for k, count in self.histogram.items() if k >= dim)
        return Fraction(hits, self.trials)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "steps": self.steps,
            "trials": self.trials,
            "seed": self.seed,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def _sample_nonzero(rng: np.random.Generator, field: FqField, count: int, n: int) -> np.ndarray:
    out = rng.integers(0, field.q, size=(count, n))
    bad = ~out.any(axis=1)
    while bad.any():
        out[bad] = rng.integers(0, field.q, size=(int(bad.sum()), n))
        bad = ~out.any(axis=1)
    return out


def _sample_annihilating(rng: np.random.Generator, field: FqField, v: np.ndarray) -> np.ndarray:
    """Non-zero w with w.v = 0, row by row, by rejection."""
    count, n = v.shape
    out = rng.integers(0, field.q, size=(count, n))
    bad = ~out.any(axis=1) | (field.dot(out, v) != 0)
    while bad.any():
        out[bad] = rng.integers(0, field.q, size=(int(bad.sum()), n))
        bad = ~out.any(axis=1) | (field.dot(out, v) != 0)
    return out


def _mc_chunk(
    n: int, field: FqField, steps: int, count: int, seed: np.random.SeedSequence
) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    current = np.broadcast_to(np.eye(n, dtype=np.int64), (count, n, n)).copy()
    for _ in range(steps):
        v = _sample_nonzero(rng, field, count, n)
        w = _sample_annihilating(rng, field, v)
        # (I + v w^T) M = M + v (w^T M)
        row = field.matmul(w[:, None, :], current)
        current = field.add_table[current, field.matmul(v[:, :, None], row)]
    eye = np.eye(n, dtype=np.int64)
    shifted = field.add_table[current, field.neg_table[eye][None]]
    return n - field.batched_rank(shifted)


def mc_walk(
    n: int,
    field: FqField,
    steps: int,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    progress: bool = False,
    chunk: int = MC_CHUNK,
) -> McReport:
    """Histogram of fixed_space_dim after ``steps`` random transvections.

    Each chunk of trials draws from its own Philox stream spawned from the
    seed, so the histogram does not depend on the worker count.

    Raises:
        InvalidInputError: On non-positive trials, negative steps or n < 2
        VerificationError: If a short walk leaves the subadditivity range
    """
    if trials < 1:
        raise InvalidInputError(f"Monte Carlo needs at least one trial, got {trials}")
    if steps < 0:
        raise InvalidInputError(f"Walk length must be non-negative, got {steps}")
    if n < 2:
        raise InvalidInputError(f"Transvections need n >= 2, got {n}")
    counts = [min(chunk, trials - start) for start in range(0, trials, chunk)]
    seeds = np.random.SeedSequence(seed).spawn(len(counts))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(
            tqdm(
                pool.map(lambda args: _mc_chunk(n, field, steps, *args), zip(counts, seeds)),
                total=len(counts),
                desc="monte carlo",
                disable=not progress,
            )
        )
    dims = np.concatenate(parts)
    if steps < n and (dims < n - steps).any():
        raise VerificationError(f"Product of {steps} transvections fixes less than {n - steps} dims")
    histogram = {k: int(v) for k, v in enumerate(np.bincount(dims, minlength=n + 1)) if v}
    return McReport(n, field.q, steps, trials, seed, histogram)


# Mixing report


@dataclass(frozen=True)
class StepRow:
    step: int
    tv: Mass
    ds_bound: Optional[float]
    tvb: Optional[float]
    lower_bound: Optional[Fraction]

    @property
    def ds_tv_bound(self) -> Optional[float]:
        return None if self.ds_bound is None else math.sqrt(self.ds_bound)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "tv": str(self.tv) if isinstance(self.tv, Fraction) else self.tv,
            "tv_float": float(self.tv),
            "ds_bound": self.ds_bound,
            "ds_tv_bound": self.ds_tv_bound,
            "tvb": self.tvb,
            "lower_bound": None if self.lower_bound is None else str(self.lower_bound),
        }


CSV_HEADER = ["step", "tv", "ds_tv_bound", "tvb", "lower_bound"]


@dataclass(frozen=True)
class MixingReport:
    group: str
    n: int
    q: int
    rows: List[StepRow]
    threshold: Fraction
    mixing_time: Optional[int]
    fitted_rate: Optional[float]
    spectral_rate: Optional[Fraction]

    def verify(self) -> None:
        """Distances in [0, 1], under the square-root bound, over the fixed-point-free mass.

        Raises:
            VerificationError: On the first violated inequality
        """
        for row in self.rows:
            tv = float(row.tv)
            if not 0 <= tv <= 1:
                raise VerificationError(f"TV {row.tv} at step {row.step} is outside [0, 1]")
            bound = row.ds_tv_bound
            if bound is not None and tv > bound + FLOAT_TOLERANCE:
                raise VerificationError(f"TV {tv} exceeds the spectral bound {bound} at step {row.step}")
            if row.lower_bound is not None and row.tv < row.lower_bound:
                raise VerificationError(
                    f"TV {row.tv} is below the fixed-point-free mass {row.lower_bound} at step {row.step}"
                )

    def csv_rows(self) -> List[List[str]]:
        rows = []
        for row in self.rows:
            rows.append(
                [
                    str(row.step),
                    repr(float(row.tv)),
                    "" if row.ds_tv_bound is None else repr(row.ds_tv_bound),
                    "" if row.tvb is None else repr(row.tvb),
                    "" if row.lower_bound is None else str(row.lower_bound),
                ]
            )
        return rows

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "n": self.n,
            "q": self.q,
            "threshold": str(self.threshold),
            "mixing_time": self.mixing_time,
            "fitted_rate": self.fitted_rate,
            "spectral_rate": None if self.spectral_rate is None else str(self.spectral_rate),
            "steps": [row.to_json() for row in self.rows],
        }


def fitted_rate(distances: List[Mass]) -> Optional[float]:
    """sqrt(tv_L / tv_{L-2}); a two-step window cancels alternating signs."""
    if len(distances) < 3 or float(distances[-3]) == 0:
        return None
    return math.sqrt(float(distances[-1]) / float(distances[-3]))


def mixing_report(
    table: GroupTable,
    steps: int,
    ct: Optional[CharacterTable] = None,
    exact: bool = True,
    use_fourier: bool = False,
    threshold: Fraction = DEFAULT_THRESHOLD,
    progress: bool = False,
    cap: Optional[int] = None,
) -> MixingReport:
    """Per-step distance to uniform with every available bound.

    Raises:
        InvalidInputError: Unless the table is an SL group, or when the
            Fourier side is requested without a character table
    """
    if table.kind != GroupKind.SL:
        raise InvalidInputError(f"The walk report needs an SL table, got {table.cache_key}")
    if steps < 1:
        raise InvalidInputError(f"Walk length must be positive, got {steps}")
    if use_fourier and ct is None:
        raise InvalidInputError("Fourier mode needs a character table")
    n, q_value = table.n, table.field.q
    uniform = uniform_distribution(table, on_classes=True, exact=exact)
    fixed_point_free = eigenvalue_one_mass(table)
    with_spectra = ct is not None and n >= 3

    if use_fourier:
        distributions = (fourier_distribution(ct, l, exact) for l in range(1, steps + 1))
    else:
        distributions = iter_convolutions(table, steps, True, exact, progress, cap)

    rows = []
    for l, dist in enumerate(distributions, start=1):
        rows.append(
            StepRow(
                l,
                tv_distance(dist, uniform),
                ds_upper_bound(ct, l) if with_spectra else None,
                tvb_closed_form(n, q_value, l) if n >= 3 else None,
                fixed_point_free if l < n else None,
            )
        )
    distances = [row.tv for row in rows]
    mixing_time = next((row.step for row in rows if row.tv <= threshold), None)
    logger.info(f"{table.cache_key}: observed mixing time {mixing_time} (n = {n})")
    return MixingReport(
        table.cache_key,
        n,
        q_value,
        rows,
        threshold,
        mixing_time,
        fitted_rate(distances),
        spectral_mixing_rate(ct) if with_spectra else None,
    )
