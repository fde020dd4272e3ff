import logging
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from glrank.chartab import (
    CharacterTable,
    CyclotomicField,
    character_table,
    filtration_check,
    get_cyclotomic_field,
    identify_irreps,
    linear_characters,
    load_character_table,
    omega_tensor_character,
    pieri_from_oracle,
    rank_report,
    restrict_to_sl,
    strict_rank,
    twist_index,
)
from glrank.chartab.dixon import modular_prime
from glrank.chartab.symmetric import (
    centralizer_order,
    cycle_type,
    kostka_from_oracle,
    young_character,
)
from glrank.core.store import ArtifactKind, ArtifactStore
from glrank.errors import InternalError, InvalidInputError, ResourceLimitError
from glrank.matgroup import GroupKind, MatrixFq, enumerate_group, get_field, transvection
from glrank.partitions import Partition, kostka, partitions_of, pieri_expand
from glrank.pcf import char_at_T, dim, enumerate_irreps, tensor_rank


@pytest.fixture(scope="module")
def gl2_3():
    return load_character_table(GroupKind.GL, 2, 3)[1]


@pytest.fixture(scope="module")
def sl2_3():
    return load_character_table(GroupKind.SL, 2, 3)[1]


@pytest.fixture(scope="module")
def gl3_2():
    return load_character_table(GroupKind.GL, 3, 2)[1]


@pytest.fixture(scope="module")
def symmetric_tables():
    """S_n tables by n, built on demand."""
    tables = {}

    def table_for(n):
        if n not in tables:
            tables[n] = load_character_table(GroupKind.SYM, n, 2)[1]
        return tables[n]

    return table_for


def test_cyclotomic_arithmetic():
    """Test Z[zeta_4] and embeddings into Z[zeta_12]."""
    f = CyclotomicField(4)
    i = f.root_power(1)
    assert np.array_equal(f.multiply(i, i), f.rational(-1))
    assert np.array_equal(f.root_power(2), f.rational(-1))
    assert np.array_equal(f.conj(i), f.root_power(3))
    assert abs(f.to_complex(i) - 1j) < 1e-12
    assert f.format(f.rational(5)) == "5"
    assert f.as_integer(f.rational(-2)) == -2
    with pytest.raises(InternalError):
        f.as_integer(i)

    big = get_cyclotomic_field(12)
    assert np.array_equal(big.promote(i, f), big.root_power(3))
    with pytest.raises(InternalError):
        CyclotomicField(0)


def test_modular_prime():
    """Test the choice of reduction prime."""
    assert modular_prime(48, 24) == 73
    assert modular_prime(1, 1) == 3


def test_trivial_group():
    """Test the table of the trivial group."""
    ct = character_table(enumerate_group(GroupKind.GL, 1, get_field(2)))
    assert ct.dims == [1]
    ct.check_orthogonality()


def test_sl2_3_dimensions(sl2_3):
    """Test SL_2(F_3)."""
    assert sl2_3.dims == [1, 1, 1, 2, 2, 2, 3]
    sl2_3.check_orthogonality()


def test_gl3_2_table(gl3_2):
    """Test GL_3(F_2), the simple group of order 168."""
    assert gl3_2.dims == [1, 3, 3, 6, 7, 8]
    at_t = Counter(
        (gl3_2.dims[i], gl3_2.integer_value(i, gl3_2.transvection_class))
        for i in range(gl3_2.num_irreps)
    )
    assert at_t == Counter({(1, 1): 1, (3, -1): 2, (6, 2): 1, (7, -1): 1, (8, 0): 1})


def test_gl2_3_table(gl2_3):
    """Test GL_2(F_3) dimensions and linear characters."""
    assert gl2_3.dims == [1, 1, 2, 2, 2, 3, 3, 4]
    assert len(linear_characters(gl2_3)) == 2
    twists = twist_index(gl2_3)
    assert len(twists) == 16
    for i in range(gl2_3.num_irreps):
        for j in linear_characters(gl2_3):
            assert gl2_3.dims[twists[(i, j)]] == gl2_3.dims[i]


def test_class_cap():
    """Test the class-count cap."""
    table = enumerate_group(GroupKind.GL, 2, get_field(3))
    with pytest.raises(ResourceLimitError, match="class_count"):
        character_table(table, class_cap=3)


def test_table_bytes(gl2_3):
    """Test the binary table format."""
    restored = CharacterTable.from_bytes(gl2_3.to_bytes(), gl2_3.group)
    assert restored.dims == gl2_3.dims
    assert np.array_equal(restored.values, gl2_3.values)
    assert restored.checksum() == gl2_3.checksum()
    with pytest.raises(InvalidInputError, match="Truncated"):
        CharacterTable.from_bytes(b"GLCT", gl2_3.group)
    with pytest.raises(InvalidInputError, match="Unknown character table format"):
        CharacterTable.from_bytes(b"XXXX" + bytes(20), gl2_3.group)


def test_load_character_table_caches(tmp_path, caplog):
    """Test that tables are cached and unreadable entries are rebuilt."""
    with ArtifactStore(tmp_path / "cache") as store:
        table, ct = load_character_table(GroupKind.GL, 2, 2, store=store)
        key = f"chartab-{table.cache_key}"
        assert store.get(key) is not None
        assert store.get_json(f"{key}.json")["order"] == 6
        assert store.get(table.cache_key) is not None

        _, cached = load_character_table(GroupKind.GL, 2, 2, store=store)
        assert np.array_equal(cached.values, ct.values)

        store.put(key, ArtifactKind.CHARTAB, b"junk")
        with caplog.at_level(logging.WARNING):
            _, rebuilt = load_character_table(GroupKind.GL, 2, 2, store=store)
        assert "Discarding unreadable cached table" in caplog.text
        assert rebuilt.dims == ct.dims


def test_character_table_pair_written_together(tmp_path, monkeypatch):
    """Test that a failure while caching leaves neither the binary nor the JSON table."""

    def broken_export(self):
        raise RuntimeError("export failed")

    monkeypatch.setattr(CharacterTable, "to_json", broken_export)
    with ArtifactStore(tmp_path / "cache") as store:
        with pytest.raises(RuntimeError, match="export failed"):
            load_character_table(GroupKind.GL, 2, 2, store=store)
        assert store.list(ArtifactKind.CHARTAB) == []
        assert store.list(ArtifactKind.CHARTAB_JSON) == []
        assert store.pool.active == 0


def test_omega_tensor_character():
    """Test the trace of g on tensor powers of the permutation module."""
    f = get_field(3)
    assert omega_tensor_character(MatrixFq.identity(3, f), 1) == 27
    assert omega_tensor_character(transvection(3, get_field(2)), 2) == 16
    assert omega_tensor_character(transvection(3, f), 0) == 1
    with pytest.raises(InvalidInputError):
        omega_tensor_character(transvection(3, f), -1)


def test_rank_report_gl3_2(gl3_2):
    """Test ranks of GL_3(F_2) irreps from the definitions."""
    report = rank_report(gl3_2)
    report.verify()
    ranks = Counter((row.dim, row.rank) for row in report.rows)
    assert ranks == Counter({(1, 0): 1, (6, 1): 1, (7, 2): 1, (8, 2): 1, (3, 3): 2})
    assert all(row.rank == row.strict_rank for row in report.rows)
    assert report.to_json()["irreps"][0]["dim"] == 1


def test_rank_report_gl2_3(gl2_3):
    """Test rank against strict rank when determinant twists exist."""
    report = rank_report(gl2_3)
    report.verify()
    ranks = Counter((row.dim, row.rank) for row in report.rows)
    assert ranks == Counter({(1, 0): 2, (3, 1): 2, (4, 1): 1, (2, 2): 3})
    strict = Counter((row.dim, row.strict_rank) for row in report.rows)
    assert strict == Counter({(1, 0): 1, (1, 2): 1, (3, 1): 1, (3, 2): 1, (4, 1): 1, (2, 2): 3})


def test_rank_report_sl2_3(sl2_3):
    """Test that SL_2(F_3) ranks pass the H_k cross-checks."""
    report = rank_report(sl2_3)
    report.verify()
    assert all(row.rank == row.strict_rank for row in report.rows)


def test_oracle_matches_model_gl2(gl2_3):
    """Test (dim, chi(T), rank) of GL_2(F_3) against the parametrization."""
    report = rank_report(gl2_3)
    oracle = Counter(
        (row.dim, gl2_3.integer_value(row.index, gl2_3.transvection_class), row.rank)
        for row in report.rows
    )
    model = Counter((dim(r)(3), char_at_T(r)(3), tensor_rank(r)) for r in enumerate_irreps(2, 3))
    assert oracle == model


def test_filtration(gl2_3):
    """Test the tensor-rank filtration of GL_2(F_3)."""
    report = filtration_check(gl2_3)
    assert report.sizes == [3, 8]
    assert report.strictly_increasing
    report.verify()


def test_rank_needs_matrix_group(symmetric_tables):
    """Test that tensor rank is refused on S_n tables."""
    with pytest.raises(InvalidInputError, match="GL or SL"):
        strict_rank(symmetric_tables(3), 0)


def test_restriction_gl2_3(gl2_3, sl2_3):
    """Test restriction of GL_2(F_3) irreps to SL_2(F_3)."""
    report = restrict_to_sl(gl2_3, sl2_3)
    report.verify()
    assert len(report.rows) == 8
    assert report.reducible_fraction == Fraction(1, 4)
    reducible = sorted(row.dim for row in report.rows if not row.irreducible)
    assert reducible == [2, 4]
    assert len(report.twist_orbits) == 5
    assert set(report.fibers) == set(range(7))
    with pytest.raises(InvalidInputError):
        restrict_to_sl(sl2_3, gl2_3)


def test_symmetric_helpers():
    """Test cycle types, centralizers and Young characters."""
    m = np.zeros((4, 4), dtype=np.int64)
    for i, j in enumerate([1, 0, 3, 2]):
        m[j, i] = 1
    assert cycle_type(m) == Partition.of(2, 2)
    assert centralizer_order(Partition.of(2, 1, 1)) == 4
    assert centralizer_order(Partition.of(3)) == 3
    assert young_character(Partition.of(2, 1), Partition.of(1, 1, 1)) == 3
    assert young_character(Partition.of(2, 1), Partition.of(3)) == 0
    with pytest.raises(InvalidInputError):
        young_character(Partition.of(2), Partition.of(3))


def test_identify_symmetric_irreps(symmetric_tables):
    """Test partition labels and Kostka numbers read from S_4."""
    ct = symmetric_tables(4)
    labels = identify_irreps(ct)
    assert len(set(labels.values())) == 5
    expected_dims = {(4,): 1, (3, 1): 3, (2, 2): 2, (2, 1, 1): 3, (1, 1, 1, 1): 1}
    for d, i in labels.items():
        assert ct.dims[i] == expected_dims[d.parts]
    for e in partitions_of(4):
        for d in partitions_of(4):
            assert kostka_from_oracle(ct, labels, e, d) == kostka(e, d)


@pytest.mark.parametrize(
    "parts,boxes",
    [((1,), 2), ((2, 1), 1), ((2, 1), 2), ((), 3), ((3,), 0)],
)
def test_pieri_against_oracle(symmetric_tables, parts, boxes):
    """Test Pieri expansions against induced characters of S_n."""
    d = Partition(parts)
    oracle = pieri_from_oracle(d, boxes, symmetric_tables)
    assert sorted(oracle, key=lambda p: p.parts) == sorted(
        pieri_expand(d, boxes), key=lambda p: p.parts
    )


@pytest.mark.slow
def test_oracle_matches_model_gl3_3():
    """Test (dim, chi(T), rank) of GL_3(F_3) against the parametrization."""
    _, ct = load_character_table(GroupKind.GL, 3, 3)
    report = rank_report(ct)
    report.verify()
    oracle = Counter(
        (row.dim, ct.integer_value(row.index, ct.transvection_class), row.rank)
        for row in report.rows
    )
    model = Counter((dim(r)(3), char_at_T(r)(3), tensor_rank(r)) for r in enumerate_irreps(3, 3))
    assert oracle == model
    assert filtration_check(ct).strictly_increasing


@pytest.mark.slow
def test_restriction_gl3_3():
    """Test that GL_3(F_3) restricts irreducibly to SL_3(F_3)."""
    _, gl = load_character_table(GroupKind.GL, 3, 3)
    _, sl = load_character_table(GroupKind.SL, 3, 3)
    report = restrict_to_sl(gl, sl)
    report.verify()
    assert report.reducible_fraction == 0
    assert sl.num_irreps == 12
