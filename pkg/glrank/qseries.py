"""Exact integer polynomials in q: Gaussian binomials, flag counts, group orders."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union

from sympy import Poly, Symbol, ZZ, factorint
from sympy.polys.polyerrors import ExactQuotientFailed

from .errors import InternalError, InvalidInputError
from .partitions import Partition

logger = logging.getLogger(__name__)

q = Symbol("q")

Degree = Union[int, float]
NEG_INFINITY = -math.inf


def prime_power(value: int) -> Tuple[int, int]:
    """Split a prime power q into (p, m).

    Raises:
        InvalidInputError: If value is not a prime power at least 2
    """
    if not isinstance(value, int) or isinstance(value, bool) or value < 2:
        raise InvalidInputError(f"q must be a prime power >= 2, got {value!r}")
    factors = factorint(value)
    if len(factors) != 1:
        raise InvalidInputError(f"q must be a prime power, got {value}")
    ((p, m),) = factors.items()
    return int(p), int(m)


@dataclass(frozen=True)
class LeadingTerm:
    """Top term coefficient * q^degree; the zero polynomial has degree -inf."""

    degree: Degree
    coefficient: int

    def to_json(self) -> Dict[str, Optional[int]]:
        degree = None if self.degree == NEG_INFINITY else int(self.degree)
        return {"degree": degree, "coefficient": self.coefficient}


class QPoly:
    """Immutable integer polynomial in q backed by a sympy ``Poly`` over ZZ."""

    __slots__ = ("_poly",)

    def __init__(self, coefficients: Optional[Dict[int, int]] = None):
        terms = {(int(k),): int(v) for k, v in (coefficients or {}).items() if v}
        if any(k[0] < 0 for k in terms):
            raise InvalidInputError(f"Negative degree in polynomial: {coefficients}")
        if terms:
            poly = Poly.from_dict(terms, q, domain=ZZ)
        else:
            poly = Poly(0, q, domain=ZZ)
        object.__setattr__(self, "_poly", poly)

    def __setattr__(self, name, value):
        raise AttributeError("QPoly is immutable")

    @classmethod
    def _wrap(cls, poly: Poly) -> "QPoly":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_poly", poly.set_domain(ZZ))
        return obj

    @classmethod
    def constant(cls, value: int) -> "QPoly":
        return cls({0: value})

    @classmethod
    def q_power(cls, k: int) -> "QPoly":
        return cls({k: 1})

    @classmethod
    def from_json(cls, data: Dict[str, str]) -> "QPoly":
        try:
            return cls({int(k): int(v) for k, v in data.items()})
        except (TypeError, ValueError, AttributeError) as e:
            raise InvalidInputError(f"Invalid polynomial JSON {data!r}: {e}")

    def to_json(self) -> Dict[str, str]:
        return {str(k): str(v) for k, v in sorted(self.coefficients().items())}

    @property
    def poly(self) -> Poly:
        return self._poly

    def coefficients(self) -> Dict[int, int]:
        if self.is_zero():
            return {}
        return {int(k[0]): int(v) for k, v in self._poly.as_dict().items()}

    def is_zero(self) -> bool:
        return self._poly.is_zero

    @property
    def degree(self) -> Degree:
        if self.is_zero():
            return NEG_INFINITY
        return int(self._poly.degree())

    def leading(self) -> LeadingTerm:
        if self.is_zero():
            return LeadingTerm(NEG_INFINITY, 0)
        return LeadingTerm(self.degree, int(self._poly.LC()))

    def exquo(self, other: "QPoly") -> "QPoly":
        """Exact division; an inexact quotient is a hard failure."""
        try:
            return QPoly._wrap(self._poly.exquo(other._poly))
        except ExactQuotientFailed as e:
            logger.error(f"Failed to divide {self} by {other} exactly: {e}")
            raise InternalError(f"Inexact polynomial division: ({self}) / ({other})")

    def __call__(self, value: int) -> int:
        return int(self._poly.eval(value))

    def evaluate(self, value: int) -> int:
        """Evaluate at a prime power q.

        Raises:
            InvalidInputError: If value is not a prime power
        """
        prime_power(value)
        return self(value)

    def substitute_q_power(self, power: int) -> "QPoly":
        if power < 1:
            raise InvalidInputError(f"Substitution power must be positive, got {power}")
        return QPoly._wrap(self._poly.compose(Poly(q**power, q, domain=ZZ)))

    def _coerce(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        if isinstance(other, int):
            return QPoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly._wrap(self._poly + other._poly)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly._wrap(self._poly - other._poly)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly._wrap(other._poly - self._poly)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly._wrap(self._poly * other._poly)

    __rmul__ = __mul__

    def __neg__(self):
        return QPoly._wrap(-self._poly)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coefficients() == other.coefficients()

    def __hash__(self):
        return hash(tuple(sorted(self.coefficients().items())))

    def __str__(self) -> str:
        return str(self._poly.as_expr())

    def __repr__(self) -> str:
        return f"QPoly({self})"


ZERO = QPoly()
ONE = QPoly.constant(1)


def _q_minus_one(j: int) -> QPoly:
    return QPoly({j: 1, 0: -1})


@lru_cache(maxsize=None)
def gauss_binomial(n: int, k: int) -> QPoly:
    """Number of k-dimensional subspaces of F_q^n as a polynomial.

    The numerator product is divided factor by factor so every step is an
    exact integer division; out-of-range k gives the zero polynomial.
    """
    if n < 0 or k < 0 or k > n:
        return ZERO
    k = min(k, n - k)
    result = ONE
    for j in range(n - k + 1, n + 1):
        result = result * _q_minus_one(j)
    for j in range(1, k + 1):
        result = result.exquo(_q_minus_one(j))
    return result


def q_multinomial(d: Partition) -> QPoly:
    """Number of flags with successive quotient dimensions d_1, ..., d_s."""
    result = ONE
    remaining = d.weight
    for part in d.parts:
        result = result * gauss_binomial(remaining, part)
        remaining -= part
    return result


@lru_cache(maxsize=None)
def gl_order(n: int) -> QPoly:
    """|GL_n(F_q)| = prod_{i<n} (q^n - q^i)."""
    if n < 1:
        raise InvalidInputError(f"gl_order needs n >= 1, got {n}")
    result = ONE
    for i in range(n):
        result = result * QPoly({n: 1, i: -1})
    return result


def leading(p: QPoly) -> LeadingTerm:
    return p.leading()


def evaluate(p: QPoly, value: int) -> int:
    return p.evaluate(value)


def substitute_q_power(p: QPoly, power: int) -> QPoly:
    return p.substitute_q_power(power)


def exact_ratio(numerator: QPoly, denominator: QPoly, value: int) -> Fraction:
    """numerator(value) / denominator(value) as an exact fraction."""
    den = denominator.evaluate(value)
    if den == 0:
        raise InternalError(f"Denominator {denominator} vanishes at q={value}")
    return Fraction(numerator(value), den)


def leading_ratio(numerator: QPoly, denominator: QPoly) -> Tuple[Fraction, Optional[int]]:
    """Leading behaviour of numerator/denominator as (c, e) meaning c / q^e.

    A zero numerator gives (0, None).
    """
    if denominator.is_zero():
        raise InternalError("Leading ratio with zero denominator")
    if numerator.is_zero():
        return Fraction(0), None
    num = numerator.leading()
    den = denominator.leading()
    return Fraction(num.coefficient, den.coefficient), int(den.degree - num.degree)
