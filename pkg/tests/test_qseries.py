from fractions import Fraction

import pytest

from glrank.errors import InvalidInputError
from glrank.matgroup import count_subspaces, get_field
from glrank.partitions import Partition, compare_dominance, DominanceRelation, partitions_of
from glrank.qseries import (
    ONE,
    ZERO,
    LeadingTerm,
    QPoly,
    exact_ratio,
    gauss_binomial,
    gl_order,
    leading,
    leading_ratio,
    prime_power,
    q_multinomial,
)


def test_prime_power():
    """Test prime power detection."""
    assert prime_power(2) == (2, 1)
    assert prime_power(9) == (3, 2)
    assert prime_power(64) == (2, 6)
    for bad in (0, 1, 6, 12):
        with pytest.raises(InvalidInputError, match="prime power"):
            prime_power(bad)


def test_qpoly_arithmetic():
    """Test construction, arithmetic and JSON form."""
    p = QPoly({1: 1, 0: 1})
    assert p * p == QPoly({2: 1, 1: 2, 0: 1})
    assert p - p == ZERO
    assert p + 1 == QPoly({1: 1, 0: 2})
    assert -p == QPoly({1: -1, 0: -1})
    assert p.to_json() == {"0": "1", "1": "1"}
    assert QPoly.from_json(p.to_json()) == p
    assert ZERO.degree == float("-inf")
    assert ONE.degree == 0

    with pytest.raises(InvalidInputError):
        QPoly({-1: 1})
    with pytest.raises(AttributeError):
        p.extra = 1


def test_evaluate_and_substitute():
    """Test evaluation at prime powers and q -> q^k substitution."""
    p = QPoly({1: 1, 0: 1})
    assert p.evaluate(3) == 4
    assert p.substitute_q_power(2) == QPoly({2: 1, 0: 1})
    assert leading(QPoly({2: 1, 1: 1, 0: 1})) == LeadingTerm(2, 1)

    with pytest.raises(InvalidInputError):
        p.evaluate(6)
    with pytest.raises(InvalidInputError):
        p.substitute_q_power(0)


def test_gauss_binomial():
    """Test small Gaussian binomials."""
    assert gauss_binomial(3, 1) == QPoly({2: 1, 1: 1, 0: 1})
    assert gauss_binomial(2, 1) == QPoly({1: 1, 0: 1})
    assert gauss_binomial(5, 0) == ONE
    assert gauss_binomial(2, 3) == ZERO
    assert gauss_binomial(3, 1).evaluate(2) == 7
    assert gauss_binomial(2, 1).evaluate(3) == 4


def test_gauss_binomial_counts_subspaces():
    """Test Gaussian binomials against brute-force subspace counts."""
    for q in (2, 3, 4):
        field = get_field(q)
        for n in range(1, 4):
            for k in range(n + 1):
                assert gauss_binomial(n, k).evaluate(q) == count_subspaces(n, k, field)


def test_q_multinomial():
    """Test flag counts and the degree law."""
    assert q_multinomial(Partition.of(1, 1)) == QPoly({1: 1, 0: 1})
    assert q_multinomial(Partition.of(2, 1)) == QPoly({2: 1, 1: 1, 0: 1})
    assert q_multinomial(Partition.of(1, 1, 1)).evaluate(2) == 21
    for n in range(1, 9):
        for d in partitions_of(n):
            expected = sum(
                d.parts[i] * d.parts[j] for i in range(d.length) for j in range(i + 1, d.length)
            )
            assert q_multinomial(d).leading() == LeadingTerm(expected, 1)


def test_q_multinomial_monotone():
    """Test that dominating types have fewer flags."""
    for d in partitions_of(6):
        for e in partitions_of(6):
            if compare_dominance(e, d) == DominanceRelation.STRICTLY_DOMINATES:
                assert q_multinomial(e).degree < q_multinomial(d).degree


def test_gl_order():
    """Test group orders."""
    assert gl_order(1) == QPoly({1: 1, 0: -1})
    assert gl_order(2).evaluate(3) == 48
    assert gl_order(3).evaluate(2) == 168
    with pytest.raises(InvalidInputError):
        gl_order(0)


def test_grassmannian_ratio():
    """Test #G(u, n-1) / #G(u, n) = (q^{n-u} - 1) / (q^n - 1)."""
    for q in (2, 3, 5):
        for n in range(2, 6):
            for u in range(1, n):
                ratio = exact_ratio(gauss_binomial(n - 1, u), gauss_binomial(n, u), q)
                assert ratio == Fraction(q ** (n - u) - 1, q**n - 1)


def test_leading_ratio():
    """Test leading ratio extraction."""
    assert leading_ratio(QPoly({1: 1, 0: 1}), QPoly({2: 1, 1: 1, 0: 1})) == (Fraction(1), 1)
    assert leading_ratio(ZERO, ONE) == (Fraction(0), None)


def test_flag_count_degree():
    """Test that the flag count has degree sum_{i<j} d_i d_j and leading coefficient one."""
    for n in range(1, 7):
        for d in partitions_of(n):
            lead = leading(q_multinomial(d))
            assert (lead.degree, lead.coefficient) == (d.flag_degree, 1)


def test_q_power():
    """Test the monomial constructor."""
    assert QPoly.q_power(3)(2) == 8
    assert QPoly.q_power(0) == ONE
