"""Rooted trees, canonical codes, automorphisms and exact class enumeration.

The enumeration never builds ordered trees and deduplicates; it composes
canonical classes directly from multisets of smaller classes (branches in
non-increasing (size, rank) order), so every isomorphism class of a given
size is produced exactly once together with exact |Aut|, plane-embedding
count and class weight. Catalogs are memoized per degree set and the top
size can be streamed without storing its classes, which keeps n = 18 within
desk-scale memory.
"""

from __future__ import annotations

import hashlib
import math
import struct
import sys
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

DEFAULT_CEILING_UNRESTRICTED = 22
DEFAULT_CEILING_RESTRICTED = 26


class CeilingError(RuntimeError):
    """Enumeration request beyond the configured resource ceiling."""


class DegreeViolationError(ValueError):
    """A vertex out-degree falls outside the degree model."""


# ---------------------------------------------------------------------------
# Degree models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeModel:
    """Allowed out-degrees plus per-degree weights for simply generated trees.

    ``degrees`` is None for unbounded degree support (plane trees); weights
    then must all be one. The standing assumptions are checked: 0 is allowed
    and some degree >= 2 has positive weight.
    """

    degrees: frozenset[int] | None
    weights: tuple[tuple[int, Fraction], ...]
    label: str = "custom"

    def __post_init__(self):
        wmap = dict(self.weights)
        if self.degrees is not None:
            degs = self.degrees
            if 0 not in degs:
                raise ValueError("degree model must allow leaves (0 in D)")
            if not any(k >= 2 and wmap.get(k, Fraction(0)) > 0 for k in degs):
                raise ValueError("degree model needs some degree >= 2 with positive weight")
            if any(w < 0 for w in wmap.values()):
                raise ValueError("weights must be non-negative")
            if set(wmap) - set(degs):
                raise ValueError("weights listed for disallowed degrees")
        else:
            if wmap and any(w != 1 for w in wmap.values()):
                raise ValueError("unbounded models support unit weights only")

    @classmethod
    def from_weights(cls, weights: Iterable, label: str = "custom") -> "DegreeModel":
        """Degrees 0..len(weights)-1; zero-weight degrees are dropped from D
        except degree 0, which stays allowed."""
        wlist = [Fraction(w) for w in weights]
        degs = frozenset(k for k, w in enumerate(wlist) if w > 0 or k == 0)
        pairs = tuple((k, wlist[k]) for k in sorted(degs))
        return cls(degs, pairs, label)

    @classmethod
    def plane(cls) -> "DegreeModel":
        return cls(None, (), "plane")

    @classmethod
    def unary_binary(cls) -> "DegreeModel":
        return cls.from_weights([1, 1, 1], "ub")

    @classmethod
    def binary_121(cls) -> "DegreeModel":
        return cls.from_weights([1, 2, 1], "binary121")

    @classmethod
    def binary_02(cls) -> "DegreeModel":
        return cls.from_weights([1, 0, 1], "binary02")

    @property
    def unbounded(self) -> bool:
        return self.degrees is None

    @property
    def max_degree(self) -> int | None:
        return None if self.degrees is None else max(self.degrees)

    @property
    def unit_weights(self) -> bool:
        return all(w == 1 for _, w in self.weights) or not self.weights

    def allows(self, k: int) -> bool:
        return True if self.degrees is None else k in self.degrees

    def weight(self, k: int) -> Fraction:
        if self.degrees is None:
            return Fraction(1)
        for deg, w in self.weights:
            if deg == k:
                return w
        return Fraction(0)

    def weight_map(self) -> dict[int, Fraction]:
        if self.degrees is None:
            return {}
        return dict(self.weights)

    def signature(self) -> str:
        if self.degrees is None:
            return "D=unbounded;w=1"
        ds = ",".join(str(d) for d in sorted(self.degrees))
        ws = ",".join(f"{d}:{w}" for d, w in self.weights)
        return f"D={ds};w={ws}"


# ---------------------------------------------------------------------------
# Concrete rooted trees
# ---------------------------------------------------------------------------


class RootedTree:
    """Ordered rooted tree; vertex 0 is the root, children in given order."""

    __slots__ = ("children",)

    def __init__(self, children: Iterable[Iterable[int]]):
        self.children = tuple(tuple(c) for c in children)

    @classmethod
    def single(cls) -> "RootedTree":
        return cls(((),))

    @classmethod
    def from_parents(cls, parents: Iterable[int]) -> "RootedTree":
        """parents[v] is the parent of v, -1 for the root (exactly one)."""
        parents = list(parents)
        kids: list[list[int]] = [[] for _ in parents]
        roots = []
        for v, p in enumerate(parents):
            if p < 0:
                roots.append(v)
            else:
                kids[p].append(v)
        if len(roots) != 1:
            raise ValueError("need exactly one root")
        if roots[0] != 0:
            # relabel so the root is vertex 0, preserving child order
            order = {}
            stack = [roots[0]]
            while stack:
                v = stack.pop()
                order[v] = len(order)
                stack.extend(reversed(kids[v]))
            new_kids: list[list[int]] = [[] for _ in parents]
            for v, cs in enumerate(kids):
                for c in cs:
                    new_kids[order[v]].append(order[c])
            kids = new_kids
        return cls(kids)

    @classmethod
    def from_nested(cls, nested) -> "RootedTree":
        """Build from nested tuples, e.g. ((), ((),)) is a root with a leaf
        child and a path child."""
        kids: list[list[int]] = []

        def add(node) -> int:
            vid = len(kids)
            kids.append([])
            for sub in node:
                kids[vid].append(add(sub))
            return vid

        sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
        add(nested)
        return cls(kids)

    @property
    def size(self) -> int:
        return len(self.children)

    def out_degrees(self) -> list[int]:
        return [len(c) for c in self.children]

    def degree_profile(self) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        for c in self.children:
            counts[len(c)] = counts.get(len(c), 0) + 1
        return tuple(sorted(counts.items()))

    def leaf_count(self) -> int:
        return sum(1 for c in self.children if not c)

    def postorder(self) -> list[int]:
        order = []
        stack: list[tuple[int, bool]] = [(0, False)]
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
            else:
                stack.append((v, True))
                for c in reversed(self.children[v]):
                    stack.append((c, False))
        return order

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTree) and self.children == other.children

    def __hash__(self) -> int:
        return hash(self.children)

    def __repr__(self) -> str:
        return f"RootedTree(n={self.size})"


def canonical_code(tree: RootedTree) -> bytes:
    """AHU canonical encoding; equal codes iff rooted-isomorphic."""
    codes: list[bytes | None] = [None] * tree.size
    for v in tree.postorder():
        kids = sorted(codes[c] for c in tree.children[v])
        codes[v] = b"(" + b"".join(kids) + b")"
    return codes[0]


def are_isomorphic(a: RootedTree, b: RootedTree) -> bool:
    return a.size == b.size and canonical_code(a) == canonical_code(b)


def aut_size(tree: RootedTree) -> int:
    """|Aut T| via the branch-multiplicity recursion
    prod mult(B)! * |Aut B|^mult(B) over isomorphism-grouped branches."""
    codes: list[bytes | None] = [None] * tree.size
    auts = [1] * tree.size
    for v in tree.postorder():
        groups: dict[bytes, list[int]] = {}
        for c in tree.children[v]:
            groups.setdefault(codes[c], []).append(c)
        a = 1
        for code, members in groups.items():
            m = len(members)
            a *= math.factorial(m) * auts[members[0]] ** m
        auts[v] = a
        kids = sorted(codes[c] for c in tree.children[v])
        codes[v] = b"(" + b"".join(kids) + b")"
    return auts[0]


def degree_factorial_product(tree: RootedTree) -> int:
    prod = 1
    for c in tree.children:
        prod *= math.factorial(len(c))
    return prod


def plane_representations(tree: RootedTree) -> int:
    """Number of distinct plane embeddings: prod deg(v)! / |Aut|, exact."""
    num = degree_factorial_product(tree)
    a = aut_size(tree)
    assert num % a == 0
    return num // a


def class_weight(tree: RootedTree, model: DegreeModel) -> Fraction:
    """Total simply generated weight of the isomorphism class of ``tree``."""
    num = Fraction(1)
    for v, c in enumerate(tree.children):
        k = len(c)
        if not model.allows(k):
            raise DegreeViolationError(f"vertex {v} has out-degree {k} not allowed by {model.signature()}")
        num *= model.weight(k) * math.factorial(k)
    return num / aut_size(tree)


# ---------------------------------------------------------------------------
# Class catalogs (Polya-tree enumeration)
# ---------------------------------------------------------------------------


class ShapeCatalog:
    """Interned isomorphism classes by size for one degree set.

    Shapes are integers; per-shape statistics live in parallel lists. The
    branch decomposition of shape s is ``groups[s]``, a tuple of
    (child_shape, multiplicity) pairs with branches in decreasing
    (size, rank) order.
    """

    def __init__(self, degrees: frozenset[int] | None):
        self.degrees = degrees
        self.by_size: list[list[int]] = [[], [0]]
        self.aut: list[int] = [1]
        self.degfact: list[int] = [1]
        self.leaves: list[int] = [1]
        self.size_of: list[int] = [1]
        self.groups: list[tuple] = [()]
        self._code_memo: dict[int, bytes] = {}
        self._profile_memo: dict[int, tuple] = {}
        self._lock = threading.RLock()
        if degrees is not None and 0 not in degrees:
            raise ValueError("degree set must allow leaves")

    # -- growth ----------------------------------------------------------

    def _root_degree_ok(self, k: int) -> bool:
        return self.degrees is None or k in self.degrees

    def _max_root_degree(self) -> int | None:
        return None if self.degrees is None else max(self.degrees)

    def grow(self, n: int) -> None:
        """Materialize all classes of sizes <= n."""
        with self._lock:
            while len(self.by_size) <= n:
                s = len(self.by_size)
                ids = []
                for groups, aut, degfact, leaves in self._compose(s):
                    sid = len(self.aut)
                    self.aut.append(aut)
                    self.degfact.append(degfact)
                    self.leaves.append(leaves)
                    self.size_of.append(s)
                    self.groups.append(groups)
                    ids.append(sid)
                self.by_size.append(ids)

    def _compose(self, n: int):
        """Yield (groups, aut, degfact, leaves) for every class of size n >= 2.

        Branch multisets are generated with branches in non-increasing
        (size, rank) order so each class appears exactly once.
        """
        by_size = self.by_size
        aut_arr, df_arr, lv_arr = self.aut, self.degfact, self.leaves
        maxdeg = self._max_root_degree()
        root_ok = self._root_degree_ok

        def rec(rem, cap_size, cap_rank, acc, k, aut, degfact, leaves):
            if rem == 0:
                if root_ok(k):
                    yield tuple(acc), aut, degfact * math.factorial(k), leaves
                return
            if maxdeg is not None and k >= maxdeg:
                return
            for s in range(min(cap_size, rem), 0, -1):
                ids = by_size[s]
                rmax = cap_rank if s == cap_size else len(ids)
                for ri in range(rmax):
                    sid = ids[ri]
                    a, df, lv = aut_arr[sid], df_arr[sid], lv_arr[sid]
                    pa, pdf, plv = 1, 1, 0
                    mmax = rem // s
                    if maxdeg is not None:
                        mmax = min(mmax, maxdeg - k)
                    for m in range(1, mmax + 1):
                        pa *= a * m
                        pdf *= df
                        plv += lv
                        acc.append((sid, m))
                        yield from rec(rem - m * s, s, ri, acc, k + m, aut * pa, degfact * pdf, leaves + plv)
                        acc.pop()

        top = n - 1
        yield from rec(top, top, len(by_size[top]) if top < len(by_size) else 0, [], 0, 1, 1, 0)

    # -- streaming statistics over classes of one size --------------------

    def stream_stats(self, n: int):
        """Yield (aut, degfact, leaves) per class of size n; classes of size
        n itself are not stored (sizes below n are materialized)."""
        if n < 1:
            raise ValueError("n >= 1")
        if n == 1:
            yield (1, 1, 1)
            return
        self.grow(n - 1)
        if len(self.by_size) > n:
            for sid in self.by_size[n]:
                yield (self.aut[sid], self.degfact[sid], self.leaves[sid])
            return
        for _groups, aut, degfact, leaves in self._compose(n):
            yield (aut, degfact, leaves)

    def stream_classes(self, n: int):
        """Yield (groups, aut, degfact, leaves) per class of size n."""
        if n == 1:
            yield ((), 1, 1, 1)
            return
        self.grow(n - 1)
        if len(self.by_size) > n:
            for sid in self.by_size[n]:
                yield (self.groups[sid], self.aut[sid], self.degfact[sid], self.leaves[sid])
            return
        yield from self._compose(n)

    def counts(self, n: int) -> int:
        if n == 1:
            return 1
        self.grow(n)
        return len(self.by_size[n])

    # -- per-shape derived data -------------------------------------------

    def shape_code(self, sid: int) -> bytes:
        memo = self._code_memo
        got = memo.get(sid)
        if got is not None:
            return got
        # iterative to dodge recursion limits on path-like shapes
        stack = [sid]
        while stack:
            cur = stack[-1]
            if cur in memo:
                stack.pop()
                continue
            pending = [c for c, _m in self.groups[cur] if c not in memo]
            if pending:
                stack.extend(pending)
                continue
            parts = []
            for child, mult in self.groups[cur]:
                parts.extend([memo[child]] * mult)
            parts.sort()
            memo[cur] = b"(" + b"".join(parts) + b")"
            stack.pop()
        return memo[sid]

    def class_code(self, groups: tuple) -> bytes:
        parts = []
        for child, mult in groups:
            parts.extend([self.shape_code(child)] * mult)
        parts.sort()
        return b"(" + b"".join(parts) + b")"

    def shape_profile(self, sid: int) -> tuple[tuple[int, int], ...]:
        memo = self._profile_memo
        got = memo.get(sid)
        if got is not None:
            return got
        stack = [sid]
        while stack:
            cur = stack[-1]
            if cur in memo:
                stack.pop()
                continue
            pending = [c for c, _m in self.groups[cur] if c not in memo]
            if pending:
                stack.extend(pending)
                continue
            memo[cur] = self._merge_profile(self.groups[cur])
            stack.pop()
        return memo[sid]

    def _merge_profile(self, groups: tuple) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        rootdeg = 0
        for child, mult in groups:
            rootdeg += mult
            for d, c in self.shape_profile(child):
                counts[d] = counts.get(d, 0) + mult * c
        counts[rootdeg] = counts.get(rootdeg, 0) + 1
        return tuple(sorted(counts.items()))

    def class_profile(self, groups: tuple) -> tuple[tuple[int, int], ...]:
        return self._merge_profile(groups)

    def shape_tree(self, sid: int) -> RootedTree:
        """A concrete representative of the class (branches in catalog order)."""
        kids: list[list[int]] = []

        def build(shape: int) -> int:
            vid = len(kids)
            kids.append([])
            for child, mult in self.groups[shape]:
                for _ in range(mult):
                    kids[vid].append(build(child))
            return vid

        sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
        build(sid)
        return RootedTree(kids)


_CATALOGS: dict = {}
_CATALOG_LOCK = threading.Lock()


def get_catalog(degrees: frozenset[int] | None = None) -> ShapeCatalog:
    key = degrees
    with _CATALOG_LOCK:
        cat = _CATALOGS.get(key)
        if cat is None:
            cat = ShapeCatalog(degrees)
            _CATALOGS[key] = cat
        return cat


def default_ceiling(degrees: frozenset[int] | None) -> int:
    if degrees is None:
        return DEFAULT_CEILING_UNRESTRICTED
    return DEFAULT_CEILING_RESTRICTED if len(degrees) <= 3 else DEFAULT_CEILING_UNRESTRICTED


def _check_ceiling(n: int, degrees: frozenset[int] | None, ceiling: int | None):
    cap = ceiling if ceiling is not None else default_ceiling(degrees)
    if n > cap:
        raise CeilingError(
            f"n={n} beyond the enumeration ceiling {cap} for {'unrestricted' if degrees is None else sorted(degrees)}"
        )


# ---------------------------------------------------------------------------
# Class records and the exact oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyaRecord:
    """One isomorphism class with its exact statistics."""

    code: bytes
    n: int
    aut: int
    pr: int
    weight: Fraction
    degree_profile: tuple[tuple[int, int], ...]

    @property
    def leaf_count(self) -> int:
        for d, c in self.degree_profile:
            if d == 0:
                return c
        return 0


def _weight_from_profile(profile, model: DegreeModel) -> Fraction:
    w = Fraction(1)
    for d, c in profile:
        if not model.allows(d):
            raise DegreeViolationError(f"degree {d} not allowed by {model.signature()}")
        w *= model.weight(d) ** c
    return w


def enumerate_polya(
    n: int,
    model: DegreeModel | None = None,
    *,
    ceiling: int | None = None,
) -> Iterator[PolyaRecord]:
    """Stream every isomorphism class of size n exactly once.

    ``model`` None means unrestricted degrees with unit weights (the plane
    and labeled settings share these classes, only the per-class statistics
    differ downstream).
    """
    if n < 1:
        raise ValueError("n >= 1")
    model = model or DegreeModel.plane()
    _check_ceiling(n, model.degrees, ceiling)
    cat = get_catalog(model.degrees)
    unit = model.unit_weights
    for groups, aut, degfact, leaves in cat.stream_classes(n):
        profile = cat.class_profile(groups)
        pr = degfact // aut
        weight = Fraction(degfact, aut) if unit else _weight_from_profile(profile, model) * degfact / aut
        yield PolyaRecord(cat.class_code(groups), n, aut, pr, weight, profile)


def polya_class_count(n: int, degrees: frozenset[int] | None = None, ceiling: int | None = None) -> int:
    _check_ceiling(n, degrees, ceiling)
    return get_catalog(degrees).counts(n)


def exact_p_labeled(n: int, ceiling: int | None = None) -> Fraction:
    """Exact probability two uniform rooted labeled trees of size n are
    isomorphic: (n!/n^(n-1))^2 * sum over classes of 1/|Aut|^2."""
    _check_ceiling(n, None, ceiling)
    cat = get_catalog(None)
    buckets: dict[int, int] = {}
    for aut, _df, _lv in cat.stream_stats(n):
        buckets[aut] = buckets.get(aut, 0) + 1
    s = sum(Fraction(count, aut * aut) for aut, count in buckets.items())
    return Fraction(math.factorial(n), n ** (n - 1)) ** 2 * s


def class_weight_sums(n: int, model: DegreeModel, ceiling: int | None = None) -> tuple[Fraction, Fraction]:
    """(sum of W(P), sum of W(P)^2) over classes of size n under ``model``."""
    _check_ceiling(n, model.degrees, ceiling)
    cat = get_catalog(model.degrees)
    sW = Fraction(0)
    sW2 = Fraction(0)
    if model.unit_weights:
        int_sW = 0
        int_sW2 = 0
        for aut, degfact, _lv in cat.stream_stats(n):
            pr = degfact // aut
            int_sW += pr
            int_sW2 += pr * pr
        return Fraction(int_sW), Fraction(int_sW2)
    for groups, aut, degfact, _lv in cat.stream_classes(n):
        w = _weight_from_profile(cat.class_profile(groups), model) * Fraction(degfact, aut)
        sW += w
        sW2 += w * w
    return sW, sW2


def exact_p_gw(n: int, model: DegreeModel, ceiling: int | None = None) -> Fraction:
    """Exact collision probability for the size-conditioned Galton-Watson
    model: sum W(P)^2 / (sum W(P))^2."""
    sW, sW2 = class_weight_sums(n, model, ceiling)
    if sW == 0:
        raise DegreeViolationError(f"size {n} unreachable under {model.signature()}")
    return sW2 / (sW * sW)


def aut_power_sum(n: int, t: int, ceiling: int | None = None) -> Fraction:
    """sum over unrestricted classes of |Aut|^(-t); the enumeration oracle
    for [x^n] P(x,t) at integer t."""
    _check_ceiling(n, None, ceiling)
    cat = get_catalog(None)
    buckets: dict[int, int] = {}
    for aut, _df, _lv in cat.stream_stats(n):
        buckets[aut] = buckets.get(aut, 0) + 1
    return sum(Fraction(count, aut**t) for aut, count in buckets.items())


def class_weight_power_sum(n: int, model: DegreeModel, t: int, ceiling: int | None = None) -> Fraction:
    """sum over classes of W(P)^t; the enumeration oracle for
    [x^n] P_D(x,t) at integer t."""
    _check_ceiling(n, model.degrees, ceiling)
    cat = get_catalog(model.degrees)
    total = Fraction(0)
    if model.unit_weights:
        for aut, degfact, _lv in cat.stream_stats(n):
            total += Fraction(degfact, aut) ** t
        return total
    for groups, aut, degfact, _lv in cat.stream_classes(n):
        w = _weight_from_profile(cat.class_profile(groups), model) * Fraction(degfact, aut)
        total += w**t
    return total


def catalan_number(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class PlaneDecayRow:
    n: int
    q_exact: Fraction
    rate: float  # -log(q_n)/n


def plane_decay_table(n_max: int, ceiling: int | None = None) -> list[PlaneDecayRow]:
    """Exact plane-tree collision probabilities q_n = sum PR^2 / (sum PR)^2
    with the per-n exponential rate column."""
    rows = []
    for n in range(1, n_max + 1):
        sW, sW2 = class_weight_sums(n, DegreeModel.plane(), ceiling)
        q = sW2 / (sW * sW)
        rate = 0.0 if q == 1 else -math.log(q) / n
        rows.append(PlaneDecayRow(n, q, rate))
    return rows


# -- identity cross-checks (used by the acceptance gate) --------------------


def cayley_class_sum(n: int, ceiling: int | None = None) -> Fraction:
    """sum over classes of n!/|Aut|; equals n^(n-1) when all is well."""
    _check_ceiling(n, None, ceiling)
    cat = get_catalog(None)
    buckets: dict[int, int] = {}
    for aut, _df, _lv in cat.stream_stats(n):
        buckets[aut] = buckets.get(aut, 0) + 1
    return sum(Fraction(math.factorial(n) * count, aut) for aut, count in buckets.items())


def plane_class_sum(n: int, ceiling: int | None = None) -> int:
    """sum of PR over classes; equals the plane-tree count Catalan(n-1)."""
    sW, _ = class_weight_sums(n, DegreeModel.plane(), ceiling)
    assert sW.denominator == 1
    return int(sW)


# -- exact conditional statistics -------------------------------------------


def iso_pair_class_table(n: int, ceiling: int | None = None) -> list[tuple[int, int]]:
    """(aut, leaf_count) per unrestricted class of size n; the conditional
    law of a uniform isomorphic labeled pair weights classes by 1/aut^2."""
    _check_ceiling(n, None, ceiling)
    cat = get_catalog(None)
    return [(aut, lv) for aut, _df, lv in cat.stream_stats(n)]


def iso_pair_leaf_moments(n: int, ceiling: int | None = None) -> tuple[Fraction, Fraction]:
    """Exact (mean, variance) of the leaf count of one tree of a uniform
    isomorphic labeled pair of size n."""
    den = Fraction(0)
    m1 = Fraction(0)
    m2 = Fraction(0)
    for aut, lv in iso_pair_class_table(n, ceiling):
        w = Fraction(1, aut * aut)
        den += w
        m1 += w * lv
        m2 += w * lv * lv
    mean = m1 / den
    return mean, m2 / den - mean * mean

def uniform_class_log_aut_mean(n: int, ceiling: int | None = None) -> float:
    """E[log |Aut|] for a uniform unrestricted class of size n."""
    _check_ceiling(n, None, ceiling)
    cat = get_catalog(None)
    total = 0.0
    count = 0
    buckets: dict[int, int] = {}
    for aut, _df, _lv in cat.stream_stats(n):
        buckets[aut] = buckets.get(aut, 0) + 1
        count += 1
    for aut, c in buckets.items():
        total += math.log(aut) * c
    return total / count


def uniform_class_log_weight_mean(n: int, model: DegreeModel, ceiling: int | None = None) -> float:
    """E[log W] for a uniform class of size n under ``model``."""
    _check_ceiling(n, model.degrees, ceiling)
    cat = get_catalog(model.degrees)
    total = 0.0
    count = 0
    if model.unit_weights:
        for aut, degfact, _lv in cat.stream_stats(n):
            total += math.log(degfact // aut)
            count += 1
    else:
        for groups, aut, degfact, _lv in cat.stream_classes(n):
            w = _weight_from_profile(cat.class_profile(groups), model) * Fraction(degfact, aut)
            total += math.log(w)
            count += 1
    return total / count


# ---------------------------------------------------------------------------
# On-disk cache of enumeration results
# ---------------------------------------------------------------------------

_CACHE_MAGIC = b"TISO"
_CACHE_VERSION = 1


def _write_big(fh, value: int) -> None:
    data = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
    fh.write(struct.pack(">I", len(data)))
    fh.write(data)


def _read_big(fh) -> int:
    (length,) = struct.unpack(">I", fh.read(4))
    return int.from_bytes(fh.read(length), "big")


def model_signature_hash(n: int, model: DegreeModel) -> bytes:
    return hashlib.sha256(f"{n}|{model.signature()}".encode()).digest()


def save_records(path, n: int, model: DegreeModel, records: Iterable[PolyaRecord]) -> int:
    """Write the documented binary layout; returns the record count."""
    records = list(records)
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack(">HIQ", _CACHE_VERSION, n, len(records)))
        fh.write(model_signature_hash(n, model))
        for rec in records:
            fh.write(struct.pack(">H", len(rec.code)))
            fh.write(rec.code)
            _write_big(fh, rec.aut)
            _write_big(fh, rec.pr)
            _write_big(fh, rec.weight.numerator)
            _write_big(fh, rec.weight.denominator)
            fh.write(struct.pack(">H", len(rec.degree_profile)))
            for d, c in rec.degree_profile:
                fh.write(struct.pack(">II", d, c))
    return len(records)


def load_records(path, n: int | None = None, model: DegreeModel | None = None) -> list[PolyaRecord]:
    """Read the binary cache; optionally verify (n, model) signature."""
    with open(path, "rb") as fh:
        if fh.read(4) != _CACHE_MAGIC:
            raise ValueError("not a treeiso cache file")
        version, file_n, count = struct.unpack(">HIQ", fh.read(14))
        if version != _CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        sig = fh.read(32)
        if n is not None and file_n != n:
            raise ValueError(f"cache holds n={file_n}, expected {n}")
        if model is not None and sig != model_signature_hash(file_n, model):
            raise ValueError("cache signature does not match the requested model")
        out = []
        for _ in range(count):
            (clen,) = struct.unpack(">H", fh.read(2))
            code = fh.read(clen)
            aut = _read_big(fh)
            pr = _read_big(fh)
            wnum = _read_big(fh)
            wden = _read_big(fh)
            (plen,) = struct.unpack(">H", fh.read(2))
            profile = tuple(struct.unpack(">II", fh.read(8)) for _ in range(plen))
            out.append(PolyaRecord(code, file_n, aut, pr, Fraction(wnum, wden), profile))
        return out
