"""Scalar coefficient fields for the truncated-series engine.

Two interchangeable backends: exact rationals (``fractions.Fraction``) and
arbitrary-precision reals (mpmath ``mpf`` at a fixed bit precision). Field
objects are small immutable descriptors; the scalars themselves are plain
``Fraction``/``mpf`` values, so arithmetic stays native. Real-field
operations must run inside ``field.context()`` so mpmath's working precision
never drops below the configured minimum.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp


class FieldMismatchError(TypeError):
    """Raised when two series over different scalar fields are combined."""


@dataclass(frozen=True)
class RationalField:
    """Exact rational scalars; arithmetic is closed and never rounds."""

    tag = "rational"
    is_exact = True

    def context(self):
        return contextlib.nullcontext()

    def coerce(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise FieldMismatchError(f"cannot coerce {value!r} into the rational field")

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def exp(self, value):
        if value == 0:
            return Fraction(1)
        raise FieldMismatchError("rational field has no scalar exp away from 0")

    def power(self, base, exponent):
        """base**exponent, only exact (integer-exponent) powers exist here."""
        exponent = self.coerce(exponent)
        if exponent.denominator != 1:
            raise FieldMismatchError("rational field supports integer exponents only")
        return self.coerce(base) ** int(exponent)

    def to_float(self, value) -> float:
        return float(value)


@dataclass(frozen=True)
class RealField:
    """Arbitrary-precision real scalars at a fixed mpmath precision."""

    prec_bits: int = 192

    tag = "real"
    is_exact = False

    def __post_init__(self):
        if self.prec_bits < 53:
            raise ValueError("real field precision below 53 bits is pointless")

    def context(self):
        return mp.workprec(self.prec_bits)

    def coerce(self, value) -> mp.mpf:
        with self.context():
            if isinstance(value, mp.mpf):
                return value
            if isinstance(value, Fraction):
                return mp.mpf(value.numerator) / value.denominator
            if isinstance(value, (int, float, str)):
                return mp.mpf(value)
        raise FieldMismatchError(f"cannot coerce {value!r} into the real field")

    @property
    def zero(self) -> mp.mpf:
        return mp.mpf(0)

    @property
    def one(self) -> mp.mpf:
        return mp.mpf(1)

    def exp(self, value):
        with self.context():
            return mp.exp(self.coerce(value))

    def log(self, value):
        with self.context():
            return mp.log(self.coerce(value))

    def power(self, base, exponent):
        with self.context():
            b = self.coerce(base)
            if isinstance(exponent, int) or (isinstance(exponent, Fraction) and exponent.denominator == 1):
                return b ** int(exponent)
            e = self.coerce(exponent)
            if e == mp.floor(e):
                return b ** int(e)
            if b == 0:
                return mp.mpf(0) if e > 0 else mp.mpf(1)
            if b < 0:
                raise FieldMismatchError("non-integer power of a negative base")
            return mp.exp(e * mp.log(b))

    def to_float(self, value) -> float:
        return float(value)


RATIONAL = RationalField()
REAL_DEFAULT = RealField(192)


def require_same_field(a, b):
    if a != b:
        raise FieldMismatchError(f"field mismatch: {a} vs {b}")
    return a
