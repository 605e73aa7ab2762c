"""Integer partitions and the symmetry coefficients c(j, t).

c(j, t) packages the inclusion-exclusion over multisets of identical
branches that appears when the product form of the tree functional equation
is rewritten as an exponential:

    c(j, t) = j * sum over partitions lambda of j of
              (-1)^(|lambda|-1)/|lambda| * multinomial(lambda)
              * prod_m (m!)^(-lambda_m * t)

Equivalently, sum_j c(j,t)/j z^j = log(sum_n z^n / (n!)^t); the log-series
route computes whole prefix tables in O(J^2) and is what the solvers use,
while the partition sum is the definitional route (both are cross-checked
in the tests).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .fields import RATIONAL, RationalField, RealField


@dataclass(frozen=True)
class Partition:
    """A partition of ``weight`` stored as its descending part list."""

    parts: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    def multiplicities(self) -> dict[int, int]:
        """Map part value m -> number of parts equal to m."""
        mult: dict[int, int] = {}
        for p in self.parts:
            mult[p] = mult.get(p, 0) + 1
        return mult


def enumerate_partitions(j: int) -> Iterator[Partition]:
    """All partitions of j, in reverse-lexicographic order of part lists.

    The order is deterministic ([j] first, [1]*j last) so downstream golden
    files stay stable.
    """
    if j < 1:
        raise ValueError("partitions are enumerated for j >= 1")

    def rec(rem: int, cap: int, acc: list[int]):
        if rem == 0:
            yield Partition(tuple(acc))
            return
        for p in range(min(rem, cap), 0, -1):
            acc.append(p)
            yield from rec(rem - p, p, acc)
            acc.pop()

    yield from rec(j, j, [])


def partition_count(j: int) -> int:
    """Number of partitions of j by the Euler DP; oracle for the enumerator."""
    table = [1] + [0] * j
    for part in range(1, j + 1):
        for s in range(part, j + 1):
            table[s] += table[s - part]
    return table[j]


def multinomial(kparts) -> int:
    """(sum k_i)! / prod k_i! for non-negative integers."""
    ks = list(kparts)
    if any(k < 0 for k in ks):
        raise ValueError("multinomial needs non-negative entries")
    total = math.factorial(sum(ks))
    for k in ks:
        total //= math.factorial(k)
    return total


_c_memo: dict = {}
_c_lock = threading.Lock()


def c_coeff(j: int, t, field=RATIONAL):
    """c(j, t) by the partition sum; exact when t is an integer in the
    rational field, memoized per (j, t, field)."""
    if j < 1:
        raise ValueError("c(j, t) needs j >= 1")
    t = field.coerce(t)
    key = (j, t, field)
    with _c_lock:
        if key in _c_memo:
            return _c_memo[key]
    with field.context():
        total = field.zero
        for lam in enumerate_partitions(j):
            k = lam.num_parts
            term = field.coerce(Fraction((-1) ** (k - 1), k)) * multinomial(lam.multiplicities().values())
            for m, lam_m in lam.multiplicities().items():
                term *= field.power(math.factorial(m), -lam_m * t)
            total += term
        value = j * total
    with _c_lock:
        _c_memo[key] = value
    return value


_ctab_memo: dict = {}


def c_coeff_table(j_max: int, t, field=RATIONAL) -> list:
    """[None, c(1,t), ..., c(j_max,t)] via the log-series identity.

    Index 0 is None so the list reads naturally as table[j]. For large j the
    partition sum is out of reach (p(100) ~ 1.9e8) while this costs O(j^2).
    """
    t = field.coerce(t)
    key = (j_max, t, field)
    with _c_lock:
        hit = _ctab_memo.get(key)
    if hit is not None:
        return hit
    with field.context():
        f = [field.power(math.factorial(n), -t) for n in range(j_max + 1)]
        logf = [field.zero] * (j_max + 1)
        for n in range(1, j_max + 1):
            acc = n * f[n]
            for k in range(1, n):
                if logf[k] != 0 and f[n - k] != 0:
                    acc -= k * logf[k] * f[n - k]
            logf[n] = acc / n
        table = [None] + [logf[j] * j for j in range(1, j_max + 1)]
    with _c_lock:
        _ctab_memo[key] = table
    return table


def clear_coefficient_caches() -> None:
    with _c_lock:
        _c_memo.clear()
        _ctab_memo.clear()
