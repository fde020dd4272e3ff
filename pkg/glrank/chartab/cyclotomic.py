"""Exact arithmetic in Z[zeta_e] on integer coefficient vectors.

An element is a length-phi(e) vector over the power basis 1, zeta, ...,
zeta^{phi(e)-1}; powers beyond that are reduced once through a table of
x^k mod Phi_e, so every value has exactly one representation.
"""

from functools import lru_cache
from typing import Sequence

import numpy as np
from sympy import Poly, Symbol, cyclotomic_poly, totient

from ..errors import InternalError

_x = Symbol("x")


class CyclotomicField:
    """Z[zeta_e] with canonical coefficient vectors."""

    def __init__(self, e: int):
        if e < 1:
            raise InternalError(f"Cyclotomic order must be positive, got {e}")
        self.e = e
        self.phi = int(totient(e))
        modulus = Poly(cyclotomic_poly(e, _x), _x).all_coeffs()
        self._reduction = self._reduction_table([int(c) for c in modulus])

    def _reduction_table(self, modulus: Sequence[int]) -> np.ndarray:
        # row k holds x^k mod Phi_e for 0 <= k < e
        phi = self.phi
        table = np.zeros((self.e, phi), dtype=np.int64)
        current = np.zeros(phi, dtype=np.int64)
        current[0] = 1
        tail = np.array(modulus[1:][::-1], dtype=np.int64)  # low to high, monic dropped
        for k in range(self.e):
            table[k] = current
            top = current[-1]
            shifted = np.concatenate(([0], current[:-1]))
            current = shifted - top * tail
        return table

    def zero(self) -> np.ndarray:
        return np.zeros(self.phi, dtype=np.int64)

    def rational(self, value: int) -> np.ndarray:
        out = self.zero()
        out[0] = value
        return out

    def root_power(self, k: int) -> np.ndarray:
        return self._reduction[k % self.e].copy()

    def from_exponent_counts(self, counts: np.ndarray) -> np.ndarray:
        """sum_k counts[k] zeta^k for a length-e count vector."""
        return np.asarray(counts, dtype=np.int64) @ self._reduction

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        full = np.convolve(a, b)
        return self.reduce(full)

    def reduce(self, coefficients: np.ndarray) -> np.ndarray:
        """Reduce a coefficient vector of any length (low to high)."""
        out = np.zeros(self.phi, dtype=np.int64)
        head = min(len(coefficients), self.phi)
        out[:head] += coefficients[:head]
        for k in range(self.phi, len(coefficients)):
            if coefficients[k]:
                out += coefficients[k] * self._reduction[k % self.e]
        return out

    def conj(self, a: np.ndarray) -> np.ndarray:
        """Complex conjugation, zeta^k -> zeta^{-k}."""
        return a @ self._reduction[(-np.arange(self.phi)) % self.e]

    def conj_many(self, values: np.ndarray) -> np.ndarray:
        return values @ self._reduction[(-np.arange(self.phi)) % self.e]

    def is_rational(self, a: np.ndarray) -> bool:
        return not a[1:].any()

    def as_integer(self, a: np.ndarray) -> int:
        if not self.is_rational(a):
            raise InternalError(f"Expected a rational integer, got {a.tolist()}")
        return int(a[0])

    def to_complex(self, a: np.ndarray) -> complex:
        zeta = np.exp(2j * np.pi / self.e)
        return complex(np.sum(a * zeta ** np.arange(self.phi)))

    def promote(self, a: np.ndarray, smaller: "CyclotomicField") -> np.ndarray:
        """Embed an element of Z[zeta_d], d | e, by zeta_d -> zeta_e^{e/d}."""
        if self.e % smaller.e:
            raise InternalError(f"Cannot embed order {smaller.e} into order {self.e}")
        step = self.e // smaller.e
        counts = np.zeros(self.e, dtype=np.int64)
        for k, c in enumerate(a):
            counts[(k * step) % self.e] += c
        return self.from_exponent_counts(counts)

    def weighted_pairing(
        self, left: np.ndarray, right: np.ndarray, weights: np.ndarray
    ) -> np.ndarray:
        """M[i, j] = sum_c weights[c] left[i, c] * right[j, c] as cyclotomic vectors.

        ``left`` is (r, s, phi), ``right`` is (t, s, phi); the result is (r, t, phi).
        """
        phi = self.phi
        rows, cols = left.shape[0], right.shape[0]
        out = np.zeros((rows, cols, phi), dtype=np.int64)
        weighted = right * np.asarray(weights, dtype=np.int64)[None, :, None]
        for i in range(rows):
            outer = np.einsum("ca,jcb->jab", left[i], weighted)
            folded = np.zeros((cols, 2 * phi - 1), dtype=np.int64)
            for a in range(phi):
                folded[:, a : a + phi] += outer[:, a, :]
            for j in range(cols):
                out[i, j] = self.reduce(folded[j])
        return out

    def format(self, a: np.ndarray) -> str:
        if self.is_rational(a):
            return str(int(a[0]))
        terms = [f"{int(c)}*z{self.e}^{k}" for k, c in enumerate(a) if c]
        return " + ".join(terms)


@lru_cache(maxsize=32)
def get_cyclotomic_field(e: int) -> CyclotomicField:
    return CyclotomicField(e)
