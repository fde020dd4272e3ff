import math
from fractions import Fraction

import numpy as np
import pytest

from glrank.chartab import load_character_table
from glrank.errors import (
    InvalidInputError,
    ResourceLimitError,
    UnsupportedError,
    VerificationError,
)
from glrank.matgroup import GroupKind, get_field
from glrank.walk import (
    CSV_HEADER,
    Distribution,
    SupportKind,
    ds_upper_bound,
    exact_convolution,
    fitted_rate,
    fourier_distribution,
    iter_convolutions,
    mc_walk,
    mixing_report,
    model_ds_bound,
    model_mixing_rate,
    push_to_classes,
    spectral_mixing_rate,
    tv_distance,
    tvb_closed_form,
    uniform_distribution,
)


@pytest.fixture(scope="module")
def sl3_2():
    """SL_3(F_2) with its character table."""
    return load_character_table(GroupKind.SL, 3, 2)


def test_distribution_validation():
    """Test that masses must form a probability distribution."""
    with pytest.raises(VerificationError, match="do not form a distribution"):
        Distribution(SupportKind.GROUP, np.array([Fraction(1, 2)], dtype=object))
    with pytest.raises(VerificationError):
        Distribution(SupportKind.GROUP, np.array([0.7, 0.7]), exact=False)
    ok = Distribution("classes", np.array([Fraction(1, 3), Fraction(2, 3)], dtype=object))
    assert ok.support == SupportKind.CLASSES
    assert ok.to_json()["masses"] == ["1/3", "2/3"]


def test_uniform_and_tv(sl3_2):
    """Test the uniform distribution and total variation distance."""
    table, _ = sl3_2
    u = uniform_distribution(table)
    assert len(u) == 168
    assert tv_distance(u, u) == 0
    on_classes = uniform_distribution(table, on_classes=True)
    assert sum(on_classes.masses) == 1
    assert on_classes.mass(0) == Fraction(1, 168)
    with pytest.raises(InvalidInputError, match="Support mismatch"):
        tv_distance(u, on_classes)


def test_one_step(sl3_2):
    """Test that one step is uniform on the transvection class."""
    table, ct = sl3_2
    t_class = ct.transvection_class
    by_class = exact_convolution(table, 1, class_mode=True)
    assert by_class.mass(t_class) == 1
    by_element = exact_convolution(table, 1)
    assert sum(1 for m in by_element.masses if m) == 21
    assert max(by_element.masses) == Fraction(1, 21)


def test_group_and_class_modes_agree(sl3_2):
    """Test class totals of the element-level walk against the class walk."""
    table, _ = sl3_2
    classes = table.conjugacy_classes()
    group_steps = list(iter_convolutions(table, 4))
    class_steps = list(iter_convolutions(table, 4, class_mode=True))
    for by_element, by_class in zip(group_steps, class_steps):
        pushed = push_to_classes(by_element, classes)
        assert list(pushed.masses) == list(by_class.masses)


def test_float_mode_tracks_exact(sl3_2):
    """Test float convolution against exact convolution."""
    table, _ = sl3_2
    exact = exact_convolution(table, 3, class_mode=True)
    approx = exact_convolution(table, 3, class_mode=True, exact=False)
    assert np.allclose(exact.as_floats(), approx.masses)
    pushed = push_to_classes(exact_convolution(table, 2, exact=False), table.conjugacy_classes())
    assert not pushed.exact


def test_fourier_matches_convolution(sl3_2):
    """Test the Fourier inversion formula against direct convolution."""
    table, ct = sl3_2
    start = fourier_distribution(ct, 0)
    assert start.mass(0) == 1
    for l, by_class in enumerate(iter_convolutions(table, 5, class_mode=True), start=1):
        assert list(fourier_distribution(ct, l).masses) == list(by_class.masses)
        floats = fourier_distribution(ct, l, exact=False)
        assert np.allclose(floats.masses, by_class.as_floats())


def test_convolution_errors(sl3_2):
    """Test rejected walks."""
    table, _ = sl3_2
    with pytest.raises(InvalidInputError, match="must be positive"):
        exact_convolution(table, 0)
    with pytest.raises(ResourceLimitError):
        exact_convolution(table, 1, cap=100)
    _, sym = load_character_table(GroupKind.SYM, 3, 2)
    with pytest.raises(InvalidInputError, match="no transvections"):
        exact_convolution(sym.group, 1)
    with pytest.raises(InvalidInputError):
        fourier_distribution(sl3_2[1], -1)


def test_spectral_rate(sl3_2):
    """Test the largest non-trivial character ratio on SL_3(F_2)."""
    _, ct = sl3_2
    assert spectral_mixing_rate(ct) == Fraction(1, 3)
    assert model_mixing_rate(3, 2) == Fraction(1, 3)
    assert model_mixing_rate(3, 3) == Fraction(4, 13)
    with pytest.raises(UnsupportedError):
        model_mixing_rate(2, 3)


def test_spectral_rate_needs_sl():
    """Test that the spectral rate is refused on GL and on n = 2."""
    _, gl = load_character_table(GroupKind.GL, 3, 2)
    with pytest.raises(InvalidInputError, match="SL table"):
        spectral_mixing_rate(gl)
    _, sl2 = load_character_table(GroupKind.SL, 2, 3)
    with pytest.raises(UnsupportedError, match="n >= 3"):
        spectral_mixing_rate(sl2)


def test_ds_bounds(sl3_2):
    """Test the upper bound lemma from the oracle and from the model."""
    _, ct = sl3_2
    for l in range(1, 6):
        assert math.isclose(ds_upper_bound(ct, l), model_ds_bound(3, 2, l), rel_tol=1e-9)
    assert ds_upper_bound(ct, 2) > ds_upper_bound(ct, 4)


def test_tvb_closed_form():
    """Test the closed-form bound."""
    assert math.isclose(tvb_closed_form(3, 3, 5), 1 / (2 * math.sqrt(3)) / 9)
    assert math.isclose(tvb_closed_form(4, 4, 4), 0.25)
    with pytest.raises(UnsupportedError):
        tvb_closed_form(2, 3, 4)


def test_fitted_rate():
    """Test the two-step rate estimate."""
    assert fitted_rate([1.0, 0.5, 0.25]) == 0.5
    assert fitted_rate([Fraction(1, 2), Fraction(1, 4)]) is None
    assert fitted_rate([0, 0, 0]) is None


def test_mixing_report(sl3_2):
    """Test the per-step report on SL_3(F_2)."""
    table, ct = sl3_2
    report = mixing_report(table, 6, ct)
    report.verify()
    assert len(report.rows) == 6
    assert report.rows[0].tv == Fraction(7, 8)
    assert report.rows[0].lower_bound == Fraction(2, 7)
    assert report.rows[1].lower_bound == Fraction(2, 7)
    assert report.rows[2].lower_bound is None
    assert report.spectral_rate == Fraction(1, 3)
    assert all(row.ds_tv_bound is not None for row in report.rows)
    distances = [float(row.tv) for row in report.rows]
    assert distances[-1] < distances[0]

    fourier = mixing_report(table, 6, ct, use_fourier=True)
    assert [row.tv for row in fourier.rows] == [row.tv for row in report.rows]

    data = report.to_json()
    assert data["spectral_rate"] == "1/3"
    assert data["steps"][0]["tv"] == "7/8"
    assert len(report.csv_rows()) == 6
    assert all(len(row) == len(CSV_HEADER) for row in report.csv_rows())


def test_mixing_report_errors(sl3_2):
    """Test rejected report requests."""
    table, _ = sl3_2
    gl, _ = load_character_table(GroupKind.GL, 2, 3)
    with pytest.raises(InvalidInputError, match="SL table"):
        mixing_report(gl, 3)
    with pytest.raises(InvalidInputError, match="character table"):
        mixing_report(table, 3, use_fourier=True)
    with pytest.raises(InvalidInputError, match="must be positive"):
        mixing_report(table, 0)


def test_mixing_report_without_table(sl3_2):
    """Test that the report still runs without spectral data."""
    table, _ = sl3_2
    report = mixing_report(table, 3)
    report.verify()
    assert report.spectral_rate is None
    assert report.rows[0].ds_bound is None
    assert report.rows[0].tvb is not None


def test_mc_walk_short_walks():
    """Test Monte Carlo walks whose outcome is forced."""
    f = get_field(2)
    assert mc_walk(3, f, 0, 50).histogram == {3: 50}
    assert mc_walk(3, f, 1, 100).histogram == {2: 100}
    report = mc_walk(4, get_field(3), 2, 500, seed=3)
    assert min(report.histogram) >= 2
    assert sum(report.histogram.values()) == 500
    assert report.frequency_at_least(2) == 1


def test_mc_walk_is_reproducible():
    """Test that results depend on the seed only, not the worker count."""
    f = get_field(3)
    a = mc_walk(3, f, 4, 300, seed=11, workers=1, chunk=64)
    b = mc_walk(3, f, 4, 300, seed=11, workers=4, chunk=64)
    assert a.histogram == b.histogram
    assert a.to_json()["trials"] == 300


def test_mc_walk_errors():
    """Test rejected Monte Carlo parameters."""
    f = get_field(3)
    with pytest.raises(InvalidInputError, match="at least one trial"):
        mc_walk(3, f, 2, 0)
    with pytest.raises(InvalidInputError, match="non-negative"):
        mc_walk(3, f, -1, 10)
    with pytest.raises(InvalidInputError, match="n >= 2"):
        mc_walk(1, f, 1, 10)
