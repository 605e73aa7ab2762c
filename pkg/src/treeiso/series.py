"""Truncated formal power series over an exact or arbitrary-precision field.

A :class:`TruncSeries` holds coefficients 0..N (inclusive truncation order N,
so ``len(coeffs) == order + 1``). Values are immutable; every operation
returns a fresh series whose order is the minimum of the operand orders.
The compositions needed by the tree functional equations are provided:
Cauchy product, formal exp/log via the derivative recurrences, power
substitution x -> x^j, and Horner point evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fields import RATIONAL, RationalField, RealField, require_same_field


@dataclass(frozen=True)
class TruncSeries:
    field: RationalField | RealField
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a truncated series needs at least the constant term")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coeffs(cls, field, coeffs: Sequence, order: int | None = None) -> "TruncSeries":
        vals = [field.coerce(c) for c in coeffs]
        if order is not None:
            vals = vals[: order + 1] + [field.zero] * (order + 1 - len(vals))
        return cls(field, tuple(vals))

    @classmethod
    def zero(cls, field, order: int) -> "TruncSeries":
        return cls(field, (field.zero,) * (order + 1))

    @classmethod
    def one(cls, field, order: int) -> "TruncSeries":
        return cls(field, (field.one,) + (field.zero,) * order)

    @classmethod
    def identity(cls, field, order: int) -> "TruncSeries":
        """The series x."""
        if order < 1:
            return cls.zero(field, order)
        tail = (field.zero,) * (order - 1)
        return cls(field, (field.zero, field.one) + tail)

    # -- basics ------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncSeries":
        if order >= self.order:
            return self
        return TruncSeries(self.field, self.coeffs[: order + 1])

    def _common(self, other: "TruncSeries") -> int:
        require_same_field(self.field, other.field)
        return min(self.order, other.order)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._common(other)
        with self.field.context():
            return TruncSeries(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs[: n + 1])))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._common(other)
        with self.field.context():
            return TruncSeries(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs[: n + 1])))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.field, tuple(-a for a in self.coeffs))

    def scale(self, scalar) -> "TruncSeries":
        s = self.field.coerce(scalar)
        with self.field.context():
            return TruncSeries(self.field, tuple(s * a for a in self.coeffs))

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._common(other)
        a, b = self.coeffs, other.coeffs
        zero = self.field.zero
        out = [zero] * (n + 1)
        with self.field.context():
            for i in range(min(len(a), n + 1)):
                ai = a[i]
                if ai == 0:
                    continue
                for j in range(min(len(b), n + 1 - i)):
                    bj = b[j]
                    if bj != 0:
                        out[i + j] += ai * bj
        return TruncSeries(self.field, tuple(out))

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        """Series division; denominator must have an invertible constant term."""
        n = self._common(other)
        b0 = other.coeffs[0]
        if b0 == 0:
            raise ZeroDivisionError("series division needs a nonzero constant term")
        a, b = self.coeffs, other.coeffs
        zero = self.field.zero
        out = [zero] * (n + 1)
        with self.field.context():
            for k in range(n + 1):
                acc = a[k] if k < len(a) else zero
                for i in range(1, min(k, len(b) - 1) + 1):
                    if b[i] != 0:
                        acc -= b[i] * out[k - i]
                out[k] = acc / b0
        return TruncSeries(self.field, tuple(out))

    def pow_int(self, m: int) -> "TruncSeries":
        if m < 0:
            raise ValueError("negative powers not supported")
        result = TruncSeries.one(self.field, self.order)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base if m > 1 else base
            m >>= 1
        return result

    # -- the compositions the functional equations need --------------------

    def exp(self) -> "TruncSeries":
        """Formal exponential via (exp a)' = a' exp a.

        The rational field requires a zero constant term; the real field
        folds exp(a_0) into the result.
        """
        n = self.order
        a = self.coeffs
        field = self.field
        with field.context():
            e0 = field.exp(a[0])
            out = [field.zero] * (n + 1)
            out[0] = e0
            for k in range(1, n + 1):
                acc = field.zero
                for i in range(1, k + 1):
                    if a[i] != 0:
                        acc += i * a[i] * out[k - i]
                out[k] = acc / k
        return TruncSeries(field, tuple(out))

    def log1p(self) -> "TruncSeries":
        """Formal log(1 + a) for a with zero constant term."""
        if self.coeffs[0] != 0:
            raise ValueError("log1p needs a zero constant term")
        n = self.order
        a = self.coeffs
        field = self.field
        with field.context():
            out = [field.zero] * (n + 1)
            for k in range(1, n + 1):
                acc = field.coerce(k) * a[k]
                for i in range(1, k):
                    if a[k - i] != 0 and out[i] != 0:
                        acc -= i * out[i] * a[k - i]
                out[k] = acc / k
        return TruncSeries(field, tuple(out))

    def substitute_power(self, j: int) -> "TruncSeries":
        """a(x) -> a(x^j), truncated to this series' order."""
        if j < 1:
            raise ValueError("substitute_power needs j >= 1")
        if j == 1:
            return self
        n = self.order
        zero = self.field.zero
        out = [zero] * (n + 1)
        for i, c in enumerate(self.coeffs):
            if i * j > n:
                break
            out[i * j] = c
        return TruncSeries(self.field, tuple(out))

    def derivative(self) -> "TruncSeries":
        """Formal derivative, order drops by one."""
        if self.order == 0:
            return TruncSeries(self.field, (self.field.zero,))
        with self.field.context():
            out = tuple(self.field.coerce(k) * self.coeffs[k] for k in range(1, self.order + 1))
        return TruncSeries(self.field, out)

    def eval_at(self, x):
        """Horner evaluation of the truncated polynomial at a scalar point."""
        x = self.field.coerce(x)
        with self.field.context():
            acc = self.field.zero
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc

    def eval_derivative_at(self, x):
        x = self.field.coerce(x)
        with self.field.context():
            acc = self.field.zero
            for k in range(self.order, 0, -1):
                acc = acc * x + k * self.coeffs[k]
            return acc

    def __call__(self, x):
        return self.eval_at(x)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by x^k, truncating at the current order."""
        if k == 0:
            return self
        zero = self.field.zero
        out = (zero,) * k + self.coeffs
        return TruncSeries(self.field, out[: self.order + 1])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self) -> str:  # compact, for debugging
        head = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if self.order > 5 else ""
        return f"TruncSeries(order={self.order}, [{head}{more}])"


def geometric_inverse(field, order: int) -> TruncSeries:
    """1/(1-x) to the given order; handy in tests and plane-tree checks."""
    return TruncSeries.from_coeffs(field, [field.one] * (order + 1))


def simply_generated_series(weights, order: int, field=RATIONAL) -> TruncSeries:
    """Solve T = x * Phi(T) for Phi(z) = sum_k w_k z^k.

    ``weights`` maps out-degree to weight (missing degrees count zero); an
    entry of None for the key ``...`` is not supported -- pass finite maps or
    a list. This is the independent comparison route for the total class
    weight identities.
    """
    if isinstance(weights, (list, tuple)):
        wmap = {k: w for k, w in enumerate(weights)}
    else:
        wmap = dict(weights)
    coeffs = [field.zero] * (order + 1)
    T = TruncSeries(field, tuple(coeffs))
    # coefficient n of x*Phi(T) depends only on T-coefficients below n
    for _ in range(order + 1):
        phi = TruncSeries.zero(field, order)
        power = TruncSeries.one(field, order)
        for k in range(0, max(wmap) + 1):
            w = wmap.get(k, 0)
            if w:
                phi = phi + power.scale(w)
            if k < max(wmap):
                power = power * T
        T = phi.shift(1)
    return T
