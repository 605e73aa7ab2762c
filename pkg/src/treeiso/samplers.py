"""Seeded random tree generation and Monte Carlo collision estimators.

Everything is driven by (seed, stream) pairs through numpy's PCG64 so runs
are bit-reproducible across platforms. Monte Carlo work is split into
fixed-size chunks, each owning its derived stream; totals are a commutative
fold of per-chunk (samples, hits), so results do not depend on how many
workers process the chunk pool.

For the small sizes where collision probabilities are testable at all, the
estimators switch to table-driven sampling (the full shape map of the model
is precomputed once, then pair draws are vectorized). The law is identical
to the per-tree samplers; only the consumption of randomness differs, which
is documented behavior for `mc_iso_probability`.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .trees import (
    CeilingError,
    DegreeModel,
    RootedTree,
    canonical_code,
    iso_pair_class_table,
)

_WILSON_Z95 = 1.959963984540054


class UnreachableSizeError(ValueError):
    """No tree of the requested size exists under the degree model."""


# ---------------------------------------------------------------------------
# RNG plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngSpec:
    """A reproducible randomness source: 64-bit seed plus a stream index."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.seed, self.stream))))

    def chunk_generator(self, chunk: int) -> np.random.Generator:
        """Generator owned by one Monte Carlo chunk; independent of workers."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.seed, self.stream, chunk))))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngSpec):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngSpec or numpy Generator")


def randbelow(gen: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrary-precision bounds."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    shift = nbytes * 8 - bits
    while True:
        value = int.from_bytes(gen.bytes(nbytes), "big") >> shift
        if value < bound:
            return value


# ---------------------------------------------------------------------------
# Uniform rooted labeled trees (Prufer route)
# ---------------------------------------------------------------------------


def prufer_decode(seq: Sequence[int], n: int) -> list[int]:
    """Edge structure (parent pointers toward vertex n-1) of the labeled tree
    with Prufer sequence ``seq``; root selection happens separately.

    Decoding attaches the smallest current leaf to each sequence entry, which
    inverts the classic encode; a min-heap keeps that exact rule.
    """
    if n < 2:
        raise ValueError("Prufer decoding needs n >= 2")
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    parent = [-1] * n
    leaves = [v for v in range(n - 1) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        parent[leaf] = v
        degree[v] -= 1
        if degree[v] == 1 and v != n - 1:
            heapq.heappush(leaves, v)
    parent[heapq.heappop(leaves)] = n - 1
    return parent


def _root_at(parent_edges: list[int], root: int, n: int) -> RootedTree:
    adj: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent_edges):
        if p >= 0:
            adj[v].append(p)
            adj[p].append(v)
    kids: list[list[int]] = [[] for _ in range(n)]
    order = [-1] * n
    order[root] = 0
    stack = [root]
    seen = [False] * n
    seen[root] = True
    relabel = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                order[w] = len(relabel)
                relabel.append(w)
                kids[v].append(w)
                stack.append(w)
    out: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        out[order[v]] = [order[w] for w in kids[v]]
    return RootedTree(out)


def sample_labeled_rooted(n: int, rng) -> RootedTree:
    """Uniform over the n^(n-1) rooted labeled trees; labels are discarded,
    the shape (rooted at the chosen vertex) is returned."""
    if n < 1:
        raise ValueError("n >= 1")
    gen = _as_generator(rng)
    if n == 1:
        return RootedTree.single()
    if n == 2:
        gen.integers(0, 2)  # root choice, shape is forced
        return RootedTree(((1,), ()))
    seq = gen.integers(0, n, size=n - 2)
    root = int(gen.integers(0, n))
    parent = prufer_decode([int(v) for v in seq], n)
    return _root_at(parent, root, n)


# ---------------------------------------------------------------------------
# Conditioned Galton-Watson sampling (exact DP + cycle lemma)
# ---------------------------------------------------------------------------


class _CgwTables:
    """Integer DP over (positions remaining, degree-sum remaining).

    Weights are scaled to integers (the conditioned law is invariant under
    positive scaling), so sequence sampling is exact.
    """

    def __init__(self, n: int, model: DegreeModel):
        self.n = n
        self.model = model
        if model.unbounded:
            degrees = list(range(0, n))
            weights = [1] * len(degrees)
        else:
            degrees = sorted(model.degrees)
            lcm = 1
            for _d, w in model.weights:
                lcm = lcm * w.denominator // math.gcd(lcm, w.denominator)
            weights = [int(model.weight(d) * lcm) for d in degrees]
        self.degrees = degrees
        self.weights = weights
        # Z[m][s]: weighted count of degree sequences of length m summing to s
        Z = [[0] * n for _ in range(n + 1)]
        Z[0][0] = 1
        for m in range(1, n + 1):
            row = Z[m]
            prev = Z[m - 1]
            for s in range(0, n):
                acc = 0
                for d, w in zip(degrees, weights):
                    if w and d <= s:
                        acc += w * prev[s - d]
                row[s] = acc
        self.Z = Z
        self.total = Z[n][n - 1]

    def sample_sequence(self, gen: np.random.Generator) -> list[int]:
        if self.total == 0:
            raise UnreachableSizeError(f"size {self.n} unreachable under {self.model.signature()}")
        degs = []
        s = self.n - 1
        for m in range(self.n, 0, -1):
            r = randbelow(gen, self.Z[m][s])
            for d, w in zip(self.degrees, self.weights):
                if not w or d > s:
                    continue
                block = w * self.Z[m - 1][s - d]
                if r < block:
                    degs.append(d)
                    s -= d
                    break
                r -= block
        return degs


_cgw_cache: dict = {}
_cache_lock = threading.Lock()


def _cgw_tables(n: int, model: DegreeModel) -> _CgwTables:
    key = (n, model.signature())
    with _cache_lock:
        tab = _cgw_cache.get(key)
    if tab is None:
        tab = _CgwTables(n, model)
        with _cache_lock:
            _cgw_cache[key] = tab
    return tab


def cycle_lemma_rotate(degs: Sequence[int]) -> list[int]:
    """The unique rotation of a degree sequence with sum n-1 that is a valid
    depth-first preorder degree sequence (rotation starts right after the
    first prefix-sum minimum)."""
    best = 0
    smin = 0
    s = 0
    for i, d in enumerate(degs):
        s += d - 1
        if s < smin:
            smin = s
            best = i + 1
    best %= len(degs)
    return list(degs[best:]) + list(degs[:best])


def tree_from_preorder_degrees(degs: Sequence[int]) -> RootedTree:
    n = len(degs)
    kids: list[list[int]] = [[] for _ in range(n)]
    remaining = list(degs)
    stack: list[int] = [0] if n > 1 and degs[0] > 0 else []
    for v in range(1, n):
        if not stack:
            raise ValueError("not a valid preorder degree sequence")
        p = stack[-1]
        kids[p].append(v)
        remaining[p] -= 1
        if remaining[p] == 0:
            stack.pop()
        if degs[v] > 0:
            stack.append(v)
    if stack:
        raise ValueError("not a valid preorder degree sequence")
    return RootedTree(kids)


def sample_cgw(n: int, model: DegreeModel, rng) -> RootedTree:
    """Exact size-conditioned Galton-Watson tree: sample the degree sequence
    from the tilted product law conditioned on total n-1, rotate by the cycle
    lemma, rebuild."""
    if n < 1:
        raise ValueError("n >= 1")
    gen = _as_generator(rng)
    if n == 1:
        tab = _cgw_tables(1, model)
        if tab.total == 0:
            raise UnreachableSizeError(f"size 1 unreachable under {model.signature()}")
        return RootedTree.single()
    tab = _cgw_tables(n, model)
    degs = tab.sample_sequence(gen)
    return tree_from_preorder_degrees(cycle_lemma_rotate(degs))


# ---------------------------------------------------------------------------
# Exactly uniform Polya trees via count tables + unranking
# ---------------------------------------------------------------------------


class PolyaCounter:
    """Count tables and deterministic unranking for unordered rooted trees
    with out-degrees in a degree set (None = unbounded).

    ``unrank(n, r)`` decodes rank r in [0, count(n)) into a tree; sampling is
    then one uniform big-integer draw per tree.
    """

    def __init__(self, degrees: frozenset[int] | None = None):
        self.degrees = degrees
        self._A: dict[int, int] = {1: 1}
        self._W: dict = {}

    def _degree_options(self, m: int) -> list[int]:
        if self.degrees is None:
            return list(range(1, m + 1))
        return [k for k in sorted(self.degrees) if 1 <= k <= m]

    def count(self, s: int) -> int:
        got = self._A.get(s)
        if got is None:
            m = s - 1
            got = sum(self.multiset_count(m, k, m) for k in self._degree_options(m))
            self._A[s] = got
        return got

    def multiset_count(self, m: int, k: int, s: int) -> int:
        """Multisets of exactly k trees, total size m, each size <= s."""
        if m == 0:
            return 1 if k == 0 else 0
        if k <= 0 or s <= 0 or k > m:
            return 0
        s = min(s, m)
        key = (m, k, s)
        got = self._W.get(key)
        if got is None:
            got = 0
            types = self.count(s)
            for j in range(0, min(k, m // s) + 1):
                rest = self.multiset_count(m - j * s, k - j, s - 1)
                if rest:
                    got += _comb_rep(types, j) * rest
            self._W[key] = got
        return got

    def unrank(self, n: int, rank: int):
        """Nested-tuple tree for rank in [0, count(n)); deterministic order:
        root degree ascending, then branch-size blocks descending."""
        if n == 1:
            if rank != 0:
                raise ValueError("rank out of range")
            return ()
        m = n - 1
        for k in self._degree_options(m):
            block = self.multiset_count(m, k, m)
            if rank < block:
                return tuple(self._unrank_multiset(m, k, m, rank))
            rank -= block
        raise ValueError("rank out of range")

    def _unrank_multiset(self, m: int, k: int, s: int, rank: int) -> list:
        if m == 0:
            return []
        s = min(s, m)
        types = self.count(s)
        for j in range(0, min(k, m // s) + 1):
            rest = self.multiset_count(m - j * s, k - j, s - 1)
            if rest == 0:
                continue
            block = _comb_rep(types, j) * rest
            if rank < block:
                comb_rank, rest_rank = divmod(rank, rest)
                out = [self.unrank(s, i) for i in _unrank_comb_rep(types, j, comb_rank)]
                out.extend(self._unrank_multiset(m - j * s, k - j, s - 1, rest_rank))
                return out
            rank -= block
        raise ValueError("multiset rank out of range")


def _comb_rep(types: int, j: int) -> int:
    """Multisets of size j over ``types`` labels: C(types+j-1, j)."""
    if j == 0:
        return 1
    num = 1
    for i in range(j):
        num *= types + i
    return num // math.factorial(j)


def _unrank_comb_rep(types: int, j: int, rank: int) -> list[int]:
    """Non-decreasing j-tuples over [0, types), lexicographic by tuple."""
    if j == 0:
        return []
    if j == 1:
        return [rank]
    if j == 2:
        # block for first element v has size types - v; closed form via isqrt
        b = 2 * types + 1
        v = (b - math.isqrt(b * b - 8 * rank)) // 2
        while v * types - v * (v - 1) // 2 > rank:
            v -= 1
        while (v + 1) * types - (v + 1) * v // 2 <= rank:
            v += 1
        rank -= v * types - v * (v - 1) // 2
        return [v, v + rank]
    # generic small-j fallback: binary search the first element
    total = _comb_rep(types, j)
    lo, hi = 0, types - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if total - _comb_rep(types - mid, j) <= rank:
            lo = mid
        else:
            hi = mid - 1
    rank -= total - _comb_rep(types - lo, j)
    rest = _unrank_comb_rep(types - lo, j - 1, rank)
    return [lo] + [lo + x for x in rest]


_counter_cache: dict = {}


def polya_counter(degrees: frozenset[int] | None = None) -> PolyaCounter:
    with _cache_lock:
        pc = _counter_cache.get(degrees)
        if pc is None:
            pc = PolyaCounter(degrees)
            _counter_cache[degrees] = pc
    return pc


def sample_polya_uniform(n: int, rng, degrees: frozenset[int] | None = None) -> RootedTree:
    """Exactly uniform over isomorphism classes of size n (optionally with a
    degree restriction)."""
    if n < 1:
        raise ValueError("n >= 1")
    gen = _as_generator(rng)
    pc = polya_counter(degrees)
    total = pc.count(n)
    nested = pc.unrank(n, randbelow(gen, total))
    return RootedTree.from_nested(nested)


# ---------------------------------------------------------------------------
# Wilson/normal confidence intervals
# ---------------------------------------------------------------------------


def wilson_interval(hits: int, samples: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    if samples <= 0:
        raise ValueError("samples >= 1")
    phat = hits / samples
    z2 = z * z
    denom = 1.0 + z2 / samples
    center = (phat + z2 / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples + z2 / (4 * samples * samples)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def normal_interval(hits: int, samples: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    phat = hits / samples
    half = z * math.sqrt(max(phat * (1 - phat), 0.0) / samples)
    return max(0.0, phat - half), min(1.0, phat + half)


@dataclass(frozen=True)
class MCEstimate:
    n: int
    model: str
    estimate: float
    ci_low: float
    ci_high: float
    samples: int
    hits: int
    seed: int
    stream: int
    method: str

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "model": self.model,
            "estimate": self.estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "samples": self.samples,
            "hits": self.hits,
            "seed": self.seed,
            "stream": self.stream,
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# Collision probability estimation
# ---------------------------------------------------------------------------

_CHUNK = 1 << 16
_LABELED_TABLE_MAX = 9  # n^(n-1) stays around 4e7 bytes of table below this
_SEQ_TABLE_CAP = 300_000

_labeled_tables: dict[int, np.ndarray] = {}
_seq_tables: dict = {}


def _labeled_class_table(n: int) -> np.ndarray:
    """class id per (prufer rank * n + root) over all n^(n-1) rooted labeled
    trees; uniform index draws then replay the Prufer+root sampler exactly."""
    with _cache_lock:
        tab = _labeled_tables.get(n)
    if tab is not None:
        return tab
    if n <= 2:
        out = np.zeros(n ** max(n - 1, 0), dtype=np.int32)  # one shape only
    else:
        total = n ** (n - 1)
        out = np.empty(total, dtype=np.int32)
        intern: dict[bytes, int] = {}
        seq = [0] * (n - 2)
        idx = 0
        while True:
            parent = prufer_decode(seq, n)
            for root in range(n):
                tree = _root_at(parent, root, n)
                code = canonical_code(tree)
                cid = intern.setdefault(code, len(intern))
                out[idx] = cid
                idx += 1
            # odometer over prufer sequences
            pos = n - 3
            while pos >= 0:
                seq[pos] += 1
                if seq[pos] < n:
                    break
                seq[pos] = 0
                pos -= 1
            if pos < 0:
                break
        assert idx == total
    with _cache_lock:
        _labeled_tables[n] = out
    return out


def _enumerate_preorder_sequences(n: int, degrees: list[int], cap: int):
    """All valid preorder degree sequences of length n (plane trees with
    out-degrees in ``degrees``); None when there are more than ``cap``."""
    out: list[tuple[int, ...]] = []
    acc: list[int] = []

    def rec(placed: int, open_slots: int):
        if len(out) > cap:
            return
        if placed == n:
            if open_slots == 0:
                out.append(tuple(acc))
            return
        if placed > 0 and open_slots == 0:
            return
        remaining_after = n - placed - 1
        for d in degrees:
            slots = (open_slots - 1 if placed > 0 else 0) + d
            if slots > remaining_after:
                continue
            if remaining_after > 0 and slots == 0:
                continue
            acc.append(d)
            rec(placed + 1, slots)
            acc.pop()
            if len(out) > cap:
                return

    rec(0, 0)
    return None if len(out) > cap else out


class _SequenceTable:
    """Exact class law of a conditioned GW model at one size, as arrays."""

    def __init__(self, n: int, model: DegreeModel):
        degrees = sorted(model.degrees) if not model.unbounded else list(range(0, n))
        seqs = _enumerate_preorder_sequences(n, degrees, _SEQ_TABLE_CAP)
        if seqs is None:
            raise CeilingError("sequence table too large; use the per-tree path")
        if not seqs:
            raise UnreachableSizeError(f"size {n} unreachable under {model.signature()}")
        intern: dict[bytes, int] = {}
        class_ids = np.empty(len(seqs), dtype=np.int32)
        weights = np.empty(len(seqs), dtype=np.float64)
        for i, degs in enumerate(seqs):
            tree = tree_from_preorder_degrees(degs)
            cid = intern.setdefault(canonical_code(tree), len(intern))
            class_ids[i] = cid
            w = Fraction(1)
            for d in degs:
                w *= model.weight(d)
            weights[i] = float(w)
        self.class_ids = class_ids
        total = weights.sum()
        self.cum = np.cumsum(weights / total)
        self.cum[-1] = 1.0

    def draw_class_ids(self, gen: np.random.Generator, count: int) -> np.ndarray:
        u = gen.random(count)
        idx = np.searchsorted(self.cum, u, side="right")
        return self.class_ids[idx]


def _sequence_table(n: int, model: DegreeModel) -> _SequenceTable:
    key = (n, model.signature())
    with _cache_lock:
        tab = _seq_tables.get(key)
    if tab is None:
        tab = _SequenceTable(n, model)
        with _cache_lock:
            _seq_tables[key] = tab
    return tab


def _resolve_model(model) -> tuple[str, DegreeModel | None]:
    if isinstance(model, str):
        if model == "labeled":
            return "labeled", None
        if model == "plane":
            return "plane", DegreeModel.plane()
        raise ValueError(f"unknown model {model!r}")
    if isinstance(model, DegreeModel):
        return model.label, model
    raise TypeError("model must be 'labeled', 'plane' or a DegreeModel")


def _resolve_tables(n: int, tag: str, deg_model, fast_tables: bool):
    labeled_table = None
    seq_table = None
    if fast_tables:
        if tag == "labeled" and n <= _LABELED_TABLE_MAX:
            labeled_table = _labeled_class_table(n)
        elif deg_model is not None:
            try:
                seq_table = _sequence_table(n, deg_model)
            except CeilingError:
                seq_table = None
    return labeled_table, seq_table


def _chunk_hits(n, tag, deg_model, count, gen, labeled_table, seq_table) -> int:
    if labeled_table is not None:
        idx = gen.integers(0, len(labeled_table), size=(2, count))
        return int(np.count_nonzero(labeled_table[idx[0]] == labeled_table[idx[1]]))
    if seq_table is not None:
        a = seq_table.draw_class_ids(gen, count)
        b = seq_table.draw_class_ids(gen, count)
        return int(np.count_nonzero(a == b))
    hits = 0
    if tag == "labeled":
        for _ in range(count):
            t1 = sample_labeled_rooted(n, gen)
            t2 = sample_labeled_rooted(n, gen)
            hits += canonical_code(t1) == canonical_code(t2)
    else:
        for _ in range(count):
            t1 = sample_cgw(n, deg_model, gen)
            t2 = sample_cgw(n, deg_model, gen)
            hits += canonical_code(t1) == canonical_code(t2)
    return hits


def _pool_chunk(task) -> int:
    n, tag, deg_model, count, seed, stream, chunk, fast_tables = task
    labeled_table, seq_table = _resolve_tables(n, tag, deg_model, fast_tables)
    gen = RngSpec(seed, stream).chunk_generator(chunk)
    return _chunk_hits(n, tag, deg_model, count, gen, labeled_table, seq_table)


def mc_iso_probability(
    n: int,
    model,
    samples: int,
    rng: RngSpec,
    *,
    ci_method: str = "wilson",
    fast_tables: bool = True,
    workers: int = 1,
) -> MCEstimate:
    """Estimate the isomorphism probability of an independent pair by drawing
    pairs and counting canonical-code collisions, chunk by chunk.

    With ``fast_tables`` (default) small sizes use a precomputed shape map of
    the sampler's distribution and vectorized index draws; larger sizes fall
    back to drawing trees one by one. Identical RngSpec gives identical
    output for a given path selection, and chunk streams make the total
    independent of ``workers``.
    """
    if samples < 1:
        raise ValueError("samples >= 1")
    if not isinstance(rng, RngSpec):
        raise TypeError("mc_iso_probability needs an RngSpec (chunk streams are derived from it)")
    tag, deg_model = _resolve_model(model)
    plan = []
    done = 0
    while done < samples:
        count = min(_CHUNK, samples - done)
        plan.append((len(plan), count))
        done += count

    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [(n, tag, deg_model, count, rng.seed, rng.stream, chunk, fast_tables) for chunk, count in plan]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_pool_chunk, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        labeled_table, seq_table = _resolve_tables(n, tag, deg_model, fast_tables)
        hits = 0
        for chunk, count in plan:
            gen = rng.chunk_generator(chunk)
            hits += _chunk_hits(n, tag, deg_model, count, gen, labeled_table, seq_table)

    if ci_method == "wilson":
        lo, hi = wilson_interval(hits, samples)
    elif ci_method == "normal":
        lo, hi = normal_interval(hits, samples)
    else:
        raise ValueError("ci_method must be 'wilson' or 'normal'")
    est = hits / samples
    return MCEstimate(n, tag, est, lo, hi, samples, hits, rng.seed, rng.stream, ci_method)


# ---------------------------------------------------------------------------
# Conditioned-pair leaf statistics (exact class-weighted sampling)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafStatsEstimate:
    n: int
    samples: int
    mean_count: float
    var_count: float

    @property
    def mean_fraction(self) -> float:
        return self.mean_count / self.n


def mc_isomorphic_pair_leaf_stats(n: int, samples: int, rng: RngSpec) -> LeafStatsEstimate:
    """Leaf-count statistics of one tree from a uniform isomorphic labeled
    pair, sampled from the exact conditional class law (prob ~ (n!/|Aut|)^2).

    Rejection on the isomorphism event would be exponentially wasteful, so
    the class is drawn exactly from enumeration instead.
    """
    if samples < 1:
        raise ValueError("samples >= 1")
    table = iso_pair_class_table(n)
    weights = np.array([1.0 / (a * a) for a, _lv in table])
    leaves = np.array([lv for _a, lv in table], dtype=np.float64)
    cum = np.cumsum(weights / weights.sum())
    cum[-1] = 1.0
    gen = _as_generator(rng)
    idx = np.searchsorted(cum, gen.random(samples), side="right")
    vals = leaves[idx]
    mean = float(vals.mean())
    var = float(vals.var())
    return LeafStatsEstimate(n, samples, mean, var)


# ---------------------------------------------------------------------------
# Empirical moments of log W under the uniform Polya law
# ---------------------------------------------------------------------------


def sample_log_weight_stats(
    n: int,
    samples: int,
    rng,
    degrees: frozenset[int] | None = frozenset({0, 1, 2}),
) -> dict:
    """Sample log W(P) (= log of plane representations for unit weights) for
    uniform Polya trees of size n; returns mean/variance/skewness."""
    gen = _as_generator(rng)
    pc = polya_counter(degrees)
    total = pc.count(n)
    vals = np.empty(samples)
    for i in range(samples):
        nested = pc.unrank(n, randbelow(gen, total))
        aut, degfact = _nested_aut_degfact(nested)
        vals[i] = math.log(degfact) - math.log(aut)
    mean = float(vals.mean())
    sd = float(vals.std())
    skew = float(((vals - mean) ** 3).mean() / sd**3) if sd > 0 else 0.0
    return {"n": n, "samples": samples, "mean": mean, "variance": sd * sd, "skewness": skew}


def _nested_aut_degfact(nested) -> tuple[int, int]:
    k = len(nested)
    if k == 0:
        return 1, 1
    groups: dict = {}
    for sub in nested:
        groups[sub] = groups.get(sub, 0) + 1
    aut = 1
    degfact = math.factorial(k)
    for sub, m in groups.items():
        a, df = _nested_aut_degfact(sub)
        aut *= math.factorial(m) * a**m
        degfact *= df**m
    return aut, degfact
