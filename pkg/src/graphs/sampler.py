#!/usr/bin/env python3
"""
Random Distance Graph Sampling for distgraph-lab
Samples G_p, counts pattern copies in samples and checks the extension
property over well-spread root tuples.
"""

import math
import logging
import itertools
from dataclasses import dataclass
from typing import AbstractSet, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from graphs.backtrack import EmbeddingSearch
from graphs.common import DistGraphError, require, validate_n, wilson_interval, BINOMIALS
from graphs.distgraph import DistGraph, VertexWord, enumerate_vertex_words, random_vertex_words
from graphs.exactcount import partition_vector
from graphs.patterns import PatternGraph, RootedNetwork, automorphism_count
from models import CheckMode, ExtReport, TildeEstimate

logger = logging.getLogger(__name__)

DEFAULT_DENSE_P_THRESHOLD = 0.05
DEFAULT_DENSE_MAX_N = 8
DEFAULT_MAX_TUPLES = 10_000_000
DEFAULT_SAMPLED_TUPLES = 2000
DEFAULT_REJECTION_FACTOR = 50
DEFAULT_TILDE_EXACT_MAX_TUPLES = 1_000_000
MAX_COPY_PATTERN_VERTICES = 6

_EMPTY: frozenset = frozenset()


def make_rng(seed: int, stream: Sequence[int] = ()) -> np.random.Generator:
    """Philox generator for the stream keyed by (seed, *stream)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(stream))))


@dataclass(frozen=True)
class RootFilter:
    """Admits root tuples whose partition vector has every |x_j| ≤ f(n)"""
    f_exponent: float = 0.6
    f_value: Optional[int] = None

    def __post_init__(self):
        require(self.f_exponent >= 0, f"f exponent must be nonnegative (got {self.f_exponent})")
        if self.f_value is not None:
            require(self.f_value >= 0, f"f value must be nonnegative (got {self.f_value})")
        elif not self.hypothesis_holds:
            logger.warning(f"f exponent {self.f_exponent} ≥ 2/3; the extension threshold assumes f ≪ n^(2/3)")

    @property
    def hypothesis_holds(self) -> bool:
        return self.f_value is not None or self.f_exponent < 2 / 3

    def f(self, n: int) -> int:
        if self.f_value is not None:
            return self.f_value
        return math.floor(n ** self.f_exponent)


class SampledGraph:
    """A spanning subgraph of a DistGraph; immutable after construction"""

    def __init__(self, base: DistGraph, edges: np.ndarray, p: Optional[float] = None,
                 seed: Optional[int] = None, stream: Tuple[int, ...] = ()):
        self.base = base
        self.p = p
        self.seed = seed
        self.stream = tuple(stream)
        self.edges = np.asarray(edges, dtype=np.int32).reshape(-1, 2)
        self.edges.setflags(write=False)
        adjacency: Dict[int, set] = {}
        for i, j in self.edges.tolist():
            adjacency.setdefault(i, set()).add(j)
            adjacency.setdefault(j, set()).add(i)
        self._adjacency = adjacency

    @classmethod
    def from_edges(cls, base: DistGraph, edges: Iterable[Tuple[int, int]]) -> "SampledGraph":
        """Sample with an explicit edge list; every pair must be an edge of base"""
        pairs = sorted({(min(i, j), max(i, j)) for i, j in edges})
        for i, j in pairs:
            require(base.adjacent(base.word(i), base.word(j)), f"({i}, {j}) is not an edge of G({base.n})")
        return cls(base, np.array(pairs, dtype=np.int32).reshape(-1, 2))

    def __repr__(self) -> str:
        return f"SampledGraph(n={self.base.n}, p={self.p}, edges={self.edge_count})"

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def retained_edges(self) -> AbstractSet[Tuple[int, int]]:
        return {(i, j) for i, j in self.edges.tolist()}

    def neighbors_of(self, index: int) -> AbstractSet[int]:
        return self._adjacency.get(index, _EMPTY)

    def active_vertices(self) -> List[int]:
        """Vertices with at least one retained edge, in index order"""
        return sorted(self._adjacency)

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors_of(i)


def _sparse_edges(g: DistGraph, p: float, rng: np.random.Generator) -> np.ndarray:
    target = int(rng.binomial(g.edge_count, p))
    seen = set()
    accepted: List[Tuple[int, int]] = []
    while len(accepted) < target:
        needed = target - len(accepted)
        batch = int(needed * g.N / g.N1 * 1.25) + 16
        first = rng.integers(0, g.N, size=batch)
        second = rng.integers(0, g.N, size=batch)
        adjacent = np.bitwise_count(g.vertices[first] & g.vertices[second]) == g.quarter
        for i, j in zip(first[adjacent].tolist(), second[adjacent].tolist()):
            pair = (i, j) if i < j else (j, i)
            if pair in seen:
                continue
            seen.add(pair)
            accepted.append(pair)
            if len(accepted) == target:
                break
    return np.array(accepted, dtype=np.int32).reshape(-1, 2)


def sample_gp(g: DistGraph, p: float, seed: int, stream: Sequence[int] = (),
              dense_p_threshold: float = DEFAULT_DENSE_P_THRESHOLD,
              dense_max_n: int = DEFAULT_DENSE_MAX_N) -> SampledGraph:
    """
    Retain every edge of g independently with probability p

    Dense mode draws one uniform per edge in edge_array() order, so samples
    with the same (seed, stream) are nested in p. Sparse mode draws the edge
    count from Binomial(N·N1/2, p) and then distinct edges by rejection of
    uniform vertex pairs; sparse samples at different p are not nested.
    """
    require(0.0 <= p <= 1.0, f"p must lie in [0, 1] (got {p})")
    if p == 0.0:
        edges = np.zeros((0, 2), dtype=np.int32)
    elif p == 1.0:
        edges = g.edge_array()
    else:
        rng = make_rng(seed, stream)
        if p > dense_p_threshold or g.n <= dense_max_n:
            base = g.edge_array()
            edges = base[rng.random(len(base)) < p]
        else:
            edges = _sparse_edges(g, p, rng)
    logger.debug(f"Sampled {len(edges)} edges of G({g.n}) at p={p:.3g} stream={tuple(stream)}")
    return SampledGraph(g, edges, p, seed, tuple(stream))


def _copy_search(f: PatternGraph, s: SampledGraph) -> EmbeddingSearch:
    require(f.vcount <= MAX_COPY_PATTERN_VERTICES,
            f"pattern has {f.vcount} vertices, above the limit {MAX_COPY_PATTERN_VERTICES}", "budget")
    return EmbeddingSearch(s.neighbors_of, s.base.N, f, active=s.active_vertices())


def count_copies(f: PatternGraph, s: SampledGraph) -> int:
    """Unordered copies of F in the sample"""
    if f.edge_count and not s.edge_count:
        return 0
    return _copy_search(f, s).count() // automorphism_count(f)


def contains_copy(f: PatternGraph, s: SampledGraph) -> bool:
    if f.edge_count and not s.edge_count:
        return False
    return _copy_search(f, s).exists()


def in_tilde_v(root_filter: RootFilter, n: int, roots: Sequence[VertexWord]) -> bool:
    """True iff every deviation of the roots' partition vector is within f(n)"""
    bound = root_filter.f(n)
    return all(abs(x) <= bound for x in partition_vector(n, roots).x)


def max_deviation(n: int, roots: np.ndarray) -> np.ndarray:
    """
    Largest |x_j| for each row of a (count, d) array of vertex words

    Block sizes are popcounts of the positions selected by every root's
    word or its complement.
    """
    roots = np.atleast_2d(np.asarray(roots, dtype=np.uint64))
    count, d = roots.shape
    full = np.uint64((1 << n) - 1)
    blocks = 1 << d
    base = n // blocks
    worst = np.zeros(count, dtype=np.int64)
    for j in range(blocks):
        selected = np.full(count, full, dtype=np.uint64)
        for t in range(d):
            column = roots[:, t]
            selected &= column if not (j >> (d - 1 - t)) & 1 else ~column & full
        size = np.bitwise_count(selected).astype(np.int64)
        offset = n - (blocks - 1) * base if j == blocks - 1 else base
        worst = np.maximum(worst, np.abs(size - offset))
    return worst


def _ext_search(s: SampledGraph, net: RootedNetwork) -> EmbeddingSearch:
    roots = set(net.roots)
    required = [(i, j) for i, j in net.h.edges if not (i in roots and j in roots)]
    return EmbeddingSearch(s.neighbors_of, s.base.N, net.h, fixed_labels=net.roots,
                           required=required, injective=False, active=s.active_vertices())


def check_ext(s: SampledGraph, net: RootedNetwork, root_filter: RootFilter,
              mode: CheckMode = CheckMode.EXHAUSTIVE, tuples: int = DEFAULT_SAMPLED_TUPLES,
              seed: int = 0, stream: Sequence[int] = (), max_tuples: int = DEFAULT_MAX_TUPLES,
              rejection_factor: int = DEFAULT_REJECTION_FACTOR) -> ExtReport:
    """
    Decide whether every admitted root tuple extends inside the sample

    Root tuples range over V^d with repetition. Exhaustive mode visits them in
    lexicographic index order and stops at the first failure; sampled mode
    draws uniform tuples, keeps those the filter admits and gives a one-sided
    verdict.
    """
    g = s.base
    n, d = g.n, net.d
    bound = root_filter.f(n)
    search = _ext_search(s, net)

    if CheckMode(mode) is CheckMode.EXHAUSTIVE:
        require(g.N ** d <= max_tuples,
                f"exhaustive check needs N^d = {g.N ** d} root tuples (limit {max_tuples})", "budget")
        checked = 0
        all_indices = np.arange(g.N)
        for head in itertools.product(range(g.N), repeat=d - 1):
            rows = np.empty((g.N, d), dtype=np.uint64)
            for t, index in enumerate(head):
                rows[:, t] = g.vertices[index]
            rows[:, d - 1] = g.vertices
            admitted = all_indices[max_deviation(n, rows) <= bound] if d > 1 else all_indices
            for last in admitted.tolist():
                indices = head + (last,)
                checked += 1
                if not search.exists(indices):
                    failure = tuple(g.word(i) for i in indices)
                    logger.debug(f"Extension fails at root tuple {indices}")
                    return ExtReport(False, checked, failure)
        return ExtReport(True, checked)

    rng = make_rng(seed, stream)
    checked = rejected = 0
    max_draws = tuples * rejection_factor
    draws = 0
    while checked < tuples and draws < max_draws:
        batch = min(max_draws - draws, max(tuples - checked, 64))
        candidates = rng.integers(0, g.N, size=(batch, d))
        draws += batch
        ok = max_deviation(n, g.vertices[candidates]) <= bound
        for row, admitted in zip(candidates.tolist(), ok.tolist()):
            if not admitted:
                rejected += 1
                continue
            checked += 1
            if not search.exists(tuple(row)):
                return ExtReport(False, checked, tuple(g.word(i) for i in row), rejected)
            if checked == tuples:
                break
    if checked == 0:
        raise DistGraphError(f"no root tuple passed the filter f={bound} in {draws} draws", "precondition")
    return ExtReport(True, checked, None, rejected)


def tilde_fraction(n: int, d: int, root_filter: RootFilter, samples: int, seed: int,
                   exact_max_tuples: int = DEFAULT_TILDE_EXACT_MAX_TUPLES) -> TildeEstimate:
    """
    Fraction of V^d admitted by the filter

    Exact when N^d ≤ exact_max_tuples (the last root is vectorized over all
    vertices), otherwise a Monte Carlo estimate with a Wilson interval.
    """
    validate_n(n)
    require(1 <= d <= 3, f"d must be 1, 2 or 3 (got {d})")
    bound = root_filter.f(n)
    total = BINOMIALS.choose(n, n // 2)
    if d == 1:
        return TildeEstimate(n, d, bound, 1.0, 1.0, 1.0, True, total, total)

    if total ** d <= exact_max_tuples:
        words = enumerate_vertex_words(n)
        admitted = 0
        for head in itertools.product(range(total), repeat=d - 1):
            rows = np.empty((total, d), dtype=np.uint64)
            for t, index in enumerate(head):
                rows[:, t] = words[index]
            rows[:, d - 1] = words
            admitted += int(np.count_nonzero(max_deviation(n, rows) <= bound))
        value = admitted / total ** d
        return TildeEstimate(n, d, bound, value, value, value, True, total ** d, admitted)

    require(samples >= 1, f"samples must be positive (got {samples})")
    rng = make_rng(seed)
    rows = random_vertex_words(n, rng, samples * d).reshape(samples, d)
    admitted = int(np.count_nonzero(max_deviation(n, rows) <= bound))
    low, high = wilson_interval(admitted, samples)
    logger.debug(f"Tilde fraction n={n} d={d} f={bound}: {admitted}/{samples}")
    return TildeEstimate(n, d, bound, admitted / samples, low, high, False, samples, admitted)
