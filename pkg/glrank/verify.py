"""Acceptance suite: exact formulas checked against each other and the oracle.

``quick`` stays on the smallest groups; ``desk`` adds GL_3(F_3), SL_3(F_3),
S_6 and the longer walks.
"""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .chartab import (
    load_character_table,
    pieri_from_oracle,
    rank_report,
    restrict_to_sl,
    filtration_check,
)
from .chartab.dixon import CharacterTable
from .chartab.ranks import RankReport
from .core.config import Caps
from .core.store import ArtifactStore
from .errors import NoRankConstituentError, VerificationError
from .matgroup import GroupKind, GroupTable, count_fixed_flags, get_field, transvection
from .partitions import Partition, is_skew_row, partitions_of, pieri_expand, transition_matrix
from .pcf import (
    PcfIrrep,
    char_at_T,
    cr_at_T,
    decompose_induced,
    dim,
    dim_bounds,
    enumerate_irreps,
    eta,
    omega_family,
    rank_counts,
    sl_profile,
    strict_tensor_corank,
    strict_tensor_rank,
    tensor_rank,
)
from .qseries import QPoly
from .sps import fixed_flag_leading, fixed_flags, sps_rep
from .walk import (
    exact_convolution,
    fourier_distribution,
    iter_convolutions,
    mc_walk,
    mixing_report,
    model_mixing_rate,
    push_to_classes,
    spectral_mixing_rate,
)

logger = logging.getLogger(__name__)

AGREEMENT_TOLERANCE = 1e-9
FITTED_RATE_TOLERANCE = 0.01


class VerifyLevel(str, Enum):
    QUICK = "quick"
    DESK = "desk"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class VerifyReport:
    level: VerifyLevel
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def raise_for_failures(self) -> None:
        if self.failures:
            names = ", ".join(r.name for r in self.failures)
            raise VerificationError(f"Acceptance checks failed: {names}")

    def to_json(self) -> dict:
        return {
            "level": self.level.value,
            "passed": self.passed,
            "checks": [r.to_json() for r in self.results],
        }


class OracleCache:
    """Character tables and rank reports loaded once per verification run."""

    def __init__(
        self,
        caps: Optional[Caps] = None,
        store: Optional[ArtifactStore] = None,
        progress: bool = False,
        workers: int = 1,
    ):
        self.caps = caps or Caps()
        self.store = store
        self.progress = progress
        self.workers = workers
        self._tables: Dict[Tuple[GroupKind, int, int], Tuple[GroupTable, CharacterTable]] = {}
        self._ranks: Dict[Tuple[GroupKind, int, int], RankReport] = {}

    def load(self, kind: GroupKind, n: int, q_value: int) -> Tuple[GroupTable, CharacterTable]:
        key = (GroupKind(kind), n, q_value)
        if key not in self._tables:
            self._tables[key] = load_character_table(
                kind, n, q_value, self.caps, self.store, self.progress, self.workers
            )
        return self._tables[key]

    def table(self, kind: GroupKind, n: int, q_value: int) -> CharacterTable:
        return self.load(kind, n, q_value)[1]

    def ranks(self, kind: GroupKind, n: int, q_value: int) -> RankReport:
        key = (GroupKind(kind), n, q_value)
        if key not in self._ranks:
            self._ranks[key] = rank_report(self.table(kind, n, q_value))
        return self._ranks[key]

    def symmetric(self, n: int) -> CharacterTable:
        return self.table(GroupKind.SYM, n, 2)


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise VerificationError(message)


def _shape(*parts: int) -> Partition:
    return Partition(tuple(p for p in parts if p))


# Exact formulas


def check_dimension_formulas(ctx: OracleCache, level: VerifyLevel) -> str:
    checked = 0
    for n in range(2, 9):
        for k in range(n + 1):
            if k < n:
                lead = sps_rep(_shape(n - k, *([1] * k))).dim.leading()
                _expect(
                    (lead.degree, lead.coefficient) == (k * (n - k) + k * (k - 1) // 2, 1),
                    f"dim rho_({n - k},1^{k}) has leading term {lead}",
                )
            if 2 * k <= n:
                lead = sps_rep(_shape(n - k, k)).dim.leading()
                _expect(
                    (lead.degree, lead.coefficient) == (k * (n - k), 1),
                    f"dim rho_({n - k},{k}) has leading term {lead}",
                )
            if n <= 2 * k and 3 * k <= 2 * n:
                lead = sps_rep(_shape(n - k, n - k, 2 * k - n)).dim.leading()
                _expect(
                    (lead.degree, lead.coefficient) == ((n - k) * (3 * k - n), 1),
                    f"dim rho_({n - k},{n - k},{2 * k - n}) has leading term {lead}",
                )
            bounds = dim_bounds(n, k)
            for witness, claimed in (
                (bounds.upper_witness, bounds.upper),
                (bounds.lower_witness, bounds.lower),
            ):
                _expect(tensor_rank(witness) == k, f"Witness {witness.to_json()} is not rank {k}")
                _expect(dim(witness).leading() == claimed, f"Witness degree mismatch at n={n}, k={k}")
            checked += 1
    return f"{checked} (n, k) pairs"


def check_ratio_branches(ctx: OracleCache, level: VerifyLevel) -> str:
    q_value = 3
    top = 5 if level == VerifyLevel.QUICK else 6
    checked = 0
    for n in range(2, top + 1):
        for r in enumerate_irreps(n, q_value, ctx.caps.irreps):
            k = tensor_rank(r)
            ratio = cr_at_T(r, q_value)
            if k == n:
                expected = Fraction(-1, q_value ** (n - 1) - 1)
                _expect(ratio.exact == expected, f"Rank-{n} ratio {ratio.exact} != {expected}")
            elif 2 * k < n:
                _expect(
                    ratio.exponent == k and ratio.constant == 1,
                    f"Rank-{k} irrep of GL_{n} has ratio {ratio.constant}/q^{ratio.exponent}",
                )
            else:
                _expect(
                    ratio.exponent is None or ratio.exponent >= k,
                    f"Rank-{k} irrep of GL_{n} decays only like q^-{ratio.exponent}",
                )
            checked += 1
    return f"{checked} irreps of GL_n(F_{q_value}), n <= {top}"


def check_eta(ctx: OracleCache, level: VerifyLevel) -> str:
    runs = [(3, 5)] if level == VerifyLevel.QUICK else [(3, 6), (2, 8)]
    checked = 0
    for q_value, top in runs:
        by_k = {0: [PcfIrrep(0)]}
        for k in range(1, top + 1):
            by_k[k] = enumerate_irreps(k, q_value, ctx.caps.irreps)
        for n in range(1, top + 1):
            images = set()
            for k in range(n + 1):
                for tau in by_k[k]:
                    if strict_tensor_corank(tau) > n - k:
                        try:
                            eta(tau, n)
                        except NoRankConstituentError:
                            continue
                        raise VerificationError(f"eta accepted {tau.to_json()} for n={n}")
                    image = eta(tau, n)
                    _expect(image not in images, f"eta is not injective at {image.to_json()}")
                    images.add(image)
                    _expect(strict_tensor_rank(image) == k, f"eta({tau.to_json()}) has wrong rank")
                    constituents = decompose_induced(tau, n)
                    _expect(image in constituents, f"eta({tau.to_json()}) is not induced from tau")
                    _expect(
                        all(strict_tensor_rank(x) < k for x in constituents if x != image),
                        f"Induction of {tau.to_json()} has a second strict-rank-{k} constituent",
                    )
                    checked += 1
    for n in range(2, 9):
        family = omega_family(n, 3)
        twisted_dim = QPoly({j: 1 for j in range(n)})
        untwisted_dim = QPoly({j: 1 for j in range(1, n)})
        _expect(all(dim(r) == twisted_dim for r in family.twisted), f"omega_lambda dims at n={n}")
        _expect(dim(family.untwisted) == untwisted_dim, f"omega_1 dim at n={n}")
        _expect(
            cr_at_T(family.untwisted, 3).exact == Fraction(3 ** (n - 2) - 1, 3 ** (n - 1) - 1),
            f"omega_1 ratio at n={n}",
        )
        _expect(
            all(cr_at_T(r, 3).exact == Fraction(3 ** (n - 1) - 1, 3**n - 1) for r in family.twisted),
            f"omega_lambda ratio at n={n}",
        )
    return f"{checked} valid tau"


# Partitions and permutation modules


def check_kostka_inverse(ctx: OracleCache, level: VerifyLevel) -> str:
    for n in range(1, 11):
        data = transition_matrix(n, ctx.caps.partition_weight)
        parts = data.partitions
        for e in parts:
            for d in parts:
                total = sum(data.kostka[(e, t)] * data.inverse[(t, d)] for t in parts)
                _expect(total == (1 if e == d else 0), f"K.M != I at ({e}, {d}), n={n}")
    return "n <= 10"


def check_pieri_combinatorics(ctx: OracleCache, level: VerifyLevel) -> str:
    top = 6 if level == VerifyLevel.QUICK else 8
    checked = 0
    for k in range(top + 1):
        for d in partitions_of(k):
            for m in range(top - k + 1):
                brute = {e for e in partitions_of(k + m) if is_skew_row(e, d)}
                _expect(set(pieri_expand(d, m)) == brute, f"Pieri rule differs at {d} + {m}")
                checked += 1
    return f"{checked} (D, m) pairs"


def check_pieri_oracle(ctx: OracleCache, level: VerifyLevel) -> str:
    top = 5 if level == VerifyLevel.QUICK else 6
    checked = 0
    for n in range(1, top + 1):
        for k in range(n + 1):
            for d in partitions_of(k):
                oracle = pieri_from_oracle(d, n - k, ctx.symmetric)
                _expect(
                    set(oracle) == set(pieri_expand(d, n - k)),
                    f"Oracle Pieri for {d} + {n - k} gives {oracle}",
                )
                checked += 1
    return f"{checked} inductions up to S_{top}"


def check_fixed_flags(ctx: OracleCache, level: VerifyLevel) -> str:
    cases = [(2, 2), (3, 2), (2, 3)] if level == VerifyLevel.QUICK else [
        (n, q) for q in (2, 3) for n in (2, 3, 4)
    ]
    for n, q_value in cases:
        t = transvection(n, get_field(q_value))
        for d in partitions_of(n):
            brute = count_fixed_flags(d.parts, t)
            formula = fixed_flags(d)(q_value)
            _expect(brute == formula, f"Fixed {d}-flags at q={q_value}: {brute} != {formula}")
    for n in range(2, 9):
        for d in partitions_of(n):
            lead = fixed_flag_leading(d)
            if d.first_row < 2:
                continue
            _expect(
                lead.constant == d.first_row_multiplicity and lead.exponent == n - d.first_row,
                f"I_{d} ratio leads with {lead.constant}/q^{lead.exponent}",
            )
    return f"{len(cases)} brute-force (n, q) cases"


# Character-table oracle


def _oracle_groups(level: VerifyLevel) -> List[Tuple[GroupKind, int, int]]:
    groups = [
        (GroupKind.GL, 2, 2),
        (GroupKind.GL, 2, 3),
        (GroupKind.SL, 2, 3),
        (GroupKind.GL, 3, 2),
        (GroupKind.GL, 2, 5),
    ]
    if level == VerifyLevel.DESK:
        groups += [(GroupKind.SL, 3, 3), (GroupKind.GL, 3, 3)]
    return groups


def _oracle_signature(ct: CharacterTable, report: RankReport, with_T: bool) -> Counter:
    t = ct.transvection_class if with_T else None
    return Counter(
        (ct.dims[i], ct.integer_value(i, t) if with_T else None, report.rows[i].rank)
        for i in range(ct.num_irreps)
    )


def _model_signature(kind: GroupKind, n: int, q_value: int, cap: int) -> Counter:
    if kind == GroupKind.GL:
        return Counter(
            (dim(r)(q_value), char_at_T(r)(q_value), tensor_rank(r))
            for r in enumerate_irreps(n, q_value, cap)
        )
    return Counter((e.dim, e.char_at_T, e.rank) for e in sl_profile(n, q_value, cap))


def check_oracle_tables(ctx: OracleCache, level: VerifyLevel) -> str:
    for kind, n, q_value in _oracle_groups(level):
        ct = ctx.table(kind, n, q_value)
        ct.check_orthogonality()
        report = ctx.ranks(kind, n, q_value)
        report.verify()
        with_T = kind == GroupKind.GL or n >= 3
        oracle = _oracle_signature(ct, report, with_T)
        model = _model_signature(kind, n, q_value, ctx.caps.irreps)
        _expect(oracle == model, f"{ct.group.cache_key}: oracle {oracle} != model {model}")
        if kind == GroupKind.GL:
            filtration_check(ct, [row.strict_rank for row in report.rows]).verify()
    return f"{len(_oracle_groups(level))} groups"


def check_gl2_rank_partition(ctx: OracleCache, level: VerifyLevel) -> str:
    for q_value in (2, 3, 5):
        counts = Counter(row.rank for row in ctx.ranks(GroupKind.GL, 2, q_value).rows)
        cuspidal = q_value * (q_value - 1) // 2
        expected = {
            0: q_value - 1,
            1: q_value * q_value - 1 - (q_value - 1) - cuspidal,
            2: cuspidal,
        }
        _expect(dict(counts) == expected, f"GL_2(F_{q_value}) ranks {dict(counts)} != {expected}")
    ct = ctx.table(GroupKind.GL, 3, 2)
    report = ctx.ranks(GroupKind.GL, 3, 2)
    t = ct.transvection_class
    top = [Fraction(ct.integer_value(i, t), ct.dims[i]) for i, row in enumerate(report.rows) if row.rank == 3]
    _expect(top and all(r == Fraction(-1, 3) for r in top), f"GL_3(F_2) rank-3 ratios {top}")
    return "GL_2 at q in {2, 3, 5}; GL_3(F_2) cuspidals"


def check_rank_counts(ctx: OracleCache, level: VerifyLevel) -> str:
    groups = [(2, 2), (2, 3), (2, 5), (3, 2)]
    if level == VerifyLevel.DESK:
        groups.append((3, 3))
    for n, q_value in groups:
        oracle = Counter(row.rank for row in ctx.ranks(GroupKind.GL, n, q_value).rows)
        model = rank_counts(n, q_value, GroupKind.GL, ctx.caps.irreps)
        _expect(
            {k: oracle.get(k, 0) for k in range(n + 1)} == model,
            f"GL_{n}(F_{q_value}) rank counts {dict(oracle)} != {model}",
        )
        if n == 3:
            _expect(model[1] == (q_value - 1) ** 2, f"GL_3(F_{q_value}) has {model[1]} rank-1 irreps")
    return f"{len(groups)} groups"


def check_restriction(ctx: OracleCache, level: VerifyLevel) -> str:
    pairs = [(2, 3)] if level == VerifyLevel.QUICK else [(2, 3), (3, 3)]
    for n, q_value in pairs:
        report = restrict_to_sl(ctx.table(GroupKind.GL, n, q_value), ctx.table(GroupKind.SL, n, q_value))
        report.verify()
        logger.info(f"GL_{n}(F_{q_value}) -> SL: reducible fraction {report.reducible_fraction}")
    return f"{len(pairs)} restrictions"


# Random walk


def _agree(a, b) -> bool:
    if a.exact and b.exact:
        return all(x == y for x, y in zip(a.masses, b.masses))
    return bool(np.max(np.abs(a.as_floats() - b.as_floats())) <= AGREEMENT_TOLERANCE)


def _expected_rate(n: int, q_value: int) -> Fraction:
    if q_value == 2:
        return Fraction(q_value ** (n - 2) - 1, q_value ** (n - 1) - 1)
    return Fraction(q_value ** (n - 1) - 1, q_value**n - 1)


def check_walk(ctx: OracleCache, level: VerifyLevel) -> str:
    groups = [(3, 2)] if level == VerifyLevel.QUICK else [(3, 2), (3, 3)]
    for n, q_value in groups:
        table, ct = ctx.load(GroupKind.SL, n, q_value)
        classes = table.conjugacy_classes()
        group_walk = iter_convolutions(table, 6, class_mode=False, cap=ctx.caps.group_order)
        for l, on_group in enumerate(group_walk, start=1):
            on_classes = exact_convolution(table, l, class_mode=True, cap=ctx.caps.group_order)
            _expect(_agree(push_to_classes(on_group, classes), on_classes), f"SL_{n}({q_value}) step {l}")
            _expect(
                _agree(fourier_distribution(ct, l), on_classes),
                f"SL_{n}({q_value}) Fourier side differs at step {l}",
            )
        steps = 30 if level == VerifyLevel.DESK else 8
        report = mixing_report(table, steps, ct, cap=ctx.caps.group_order)
        report.verify()
        if q_value == 3:
            for row in report.rows:
                if row.step >= n + 2:
                    _expect(float(row.tv) <= row.tvb, f"TV above the closed-form bound at {row.step}")
        rate = _expected_rate(n, q_value)
        _expect(spectral_mixing_rate(ct) == rate, f"Spectral rate {spectral_mixing_rate(ct)} != {rate}")
        _expect(model_mixing_rate(n, q_value) == rate, f"Model rate differs from {rate}")
        if steps == 30 and q_value == 3:
            fitted = report.fitted_rate
            _expect(
                fitted is not None and abs(fitted - float(rate)) <= FITTED_RATE_TOLERANCE * float(rate),
                f"Fitted rate {fitted} is not within 1% of {rate}",
            )
    trials = 200 if level == VerifyLevel.QUICK else 2000
    mc = mc_walk(5, get_field(3), 3, trials, seed=0)
    _expect(sum(mc.histogram.values()) == trials, "Monte Carlo lost trials")
    _expect(min(mc.histogram) >= 2, f"Three transvections fixed less than 2 dims: {mc.histogram}")
    return f"{len(groups)} groups"


CHECKS: List[Tuple[str, Callable[[OracleCache, VerifyLevel], str]]] = [
    ("dimension-formulas", check_dimension_formulas),
    ("ratio-branches", check_ratio_branches),
    ("eta", check_eta),
    ("kostka-inverse", check_kostka_inverse),
    ("pieri-combinatorics", check_pieri_combinatorics),
    ("pieri-oracle", check_pieri_oracle),
    ("fixed-flags", check_fixed_flags),
    ("oracle-tables", check_oracle_tables),
    ("gl2-rank-partition", check_gl2_rank_partition),
    ("rank-counts", check_rank_counts),
    ("restriction", check_restriction),
    ("walk", check_walk),
]


def run_verification(
    level: VerifyLevel = VerifyLevel.QUICK,
    caps: Optional[Caps] = None,
    store: Optional[ArtifactStore] = None,
    progress: bool = False,
    workers: int = 1,
    only: Optional[List[str]] = None,
) -> VerifyReport:
    """Run every check (or those named in ``only``) and collect the outcomes.

    Failed assertions are recorded; resource limits and internal errors
    propagate.
    """
    level = VerifyLevel(level)
    ctx = OracleCache(caps, store, progress, workers)
    report = VerifyReport(level)
    for name, check in CHECKS:
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            detail = check(ctx, level)
            passed = True
        except VerificationError as e:
            logger.error(f"Check {name} failed: {e}")
            detail, passed = str(e), False
        report.results.append(CheckResult(name, passed, detail, time.perf_counter() - start))
        logger.info(f"{name}: {'ok' if passed else 'FAILED'} ({detail})")
    return report
