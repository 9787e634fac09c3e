#!/usr/bin/env python3
"""
Complete Distance Graph for distgraph-lab
Builds and queries G(n, n/2, n/4): vertices are n-bit words with n/2 ones,
two vertices are adjacent when their words share exactly n/4 ones.
"""

import math
import logging
from functools import cached_property
from typing import Optional, Sequence, Tuple, List, Set

import numpy as np

from graphs.common import DistGraphError, BINOMIALS, require, validate_n

logger = logging.getLogger(__name__)

# Bit i of a vertex word is coordinate i+1 of the 0/1 vector
VertexWord = int

DEFAULT_MAX_VERTICES = 3_000_000
DEFAULT_NEIGHBOR_CACHE_MAX_N = 16
DEFAULT_NEIGHBOR_SETS_MAX_ENTRIES = 5_000_000


def word_from_coordinates(text: str) -> VertexWord:
    """Convert a coordinate string x_1...x_n such as '1100' into a vertex word"""
    text = text.strip()
    require(bool(text) and set(text) <= {"0", "1"}, f"not a 0/1 coordinate string: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def word_to_coordinates(word: VertexWord, n: int) -> str:
    """Inverse of word_from_coordinates"""
    return "".join("1" if (word >> i) & 1 else "0" for i in range(n))


def is_vertex_word(n: int, word: int) -> bool:
    """True if word is a vertex of G(n): only the low n bits set, popcount n/2"""
    return 0 <= word < (1 << n) and word.bit_count() == n // 2


def enumerate_vertex_words(n: int) -> np.ndarray:
    """
    All n-bit words with n/2 ones in increasing numeric order

    Layers are grown one bit at a time: words of popcount h over bits 0..b
    are the words without bit b followed by the words with bit b set, which
    keeps every layer sorted.
    """
    half = n // 2
    layers = [np.zeros(1, dtype=np.uint64)] + [np.zeros(0, dtype=np.uint64) for _ in range(half)]
    for bit in range(n):
        top = np.uint64(1) << np.uint64(bit)
        layers = [layers[0]] + [
            np.concatenate((layers[h], layers[h - 1] | top)) for h in range(1, half + 1)
        ]
    return layers[half]


def random_vertex_words(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform random vertices of G(n) drawn without enumerating the graph"""
    keys = rng.random((size, n))
    positions = np.argsort(keys, axis=1)[:, : n // 2].astype(np.uint64)
    return np.bitwise_or.reduce(np.uint64(1) << positions, axis=1)


class DistGraph:
    """The complete distance graph G(n, n/2, n/4); immutable after build"""

    def __init__(self, n: int, vertices: np.ndarray, neighbor_cache: Optional[List[np.ndarray]] = None):
        self.n = n
        self.half = n // 2
        self.quarter = n // 4
        self.vertices = vertices
        self.vertices.setflags(write=False)
        self.N = len(vertices)
        self.N1 = BINOMIALS.choose(self.half, self.quarter) ** 2
        self.neighbor_cache = neighbor_cache

    def __repr__(self) -> str:
        return f"DistGraph(n={self.n}, N={self.N}, N1={self.N1})"

    @property
    def edge_count(self) -> int:
        """Total number of edges, N·N1/2"""
        return self.N * self.N1 // 2

    def word(self, index: int) -> VertexWord:
        """Vertex word at a canonical index"""
        return int(self.vertices[index])

    def index_of(self, word: VertexWord) -> int:
        """Canonical index of a vertex word"""
        position = int(np.searchsorted(self.vertices, np.uint64(word)))
        if position >= self.N or int(self.vertices[position]) != word:
            raise DistGraphError(f"{word_to_coordinates(word, self.n)} is not a vertex of G({self.n})", "precondition")
        return position

    def contains(self, word: int) -> bool:
        return is_vertex_word(self.n, word)

    def adjacent(self, u: VertexWord, v: VertexWord) -> bool:
        """True iff the inner product of u and v equals n/4"""
        return (u & v).bit_count() == self.quarter

    def adjacency_mask(self, word: VertexWord) -> np.ndarray:
        """Boolean mask over the canonical vertex order: neighbors of word"""
        return np.bitwise_count(self.vertices & np.uint64(word)) == self.quarter

    def degree(self, word: VertexWord) -> int:
        return int(np.count_nonzero(self.adjacency_mask(word)))

    def common_neighbor_count(self, roots: Sequence[VertexWord]) -> int:
        """Number of vertices adjacent to every root (a root is never its own neighbor)"""
        mask = np.ones(self.N, dtype=bool)
        for root in roots:
            mask &= self.adjacency_mask(root)
        return int(np.count_nonzero(mask))

    def neighbors(self, index: int) -> np.ndarray:
        """Neighbor indices of the vertex at a canonical index"""
        if self.neighbor_cache is not None:
            return self.neighbor_cache[index]
        return np.flatnonzero(self.adjacency_mask(int(self.vertices[index])))

    @cached_property
    def _edge_array(self) -> np.ndarray:
        logger.debug(f"Materializing {self.edge_count} edges of G({self.n})")
        chunks = []
        for index in range(self.N):
            nb = self.neighbors(index)
            later = nb[nb > index].astype(np.int32)
            chunks.append(np.column_stack((np.full(len(later), index, dtype=np.int32), later)))
        edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int32)
        edges.setflags(write=False)
        return edges

    def edge_array(self) -> np.ndarray:
        """All edges (i, j), i < j, in lexicographic index order"""
        return self._edge_array

    def neighbor_sets(self, max_entries: int = DEFAULT_NEIGHBOR_SETS_MAX_ENTRIES) -> List[Set[int]]:
        """Per-vertex neighbor index sets for backtracking searches"""
        if "_neighbor_sets" not in self.__dict__:
            require(
                self.N * self.N1 <= max_entries,
                f"neighbor sets of G({self.n}) need {self.N * self.N1} entries (limit {max_entries})",
                "budget",
            )
            self.__dict__["_neighbor_sets"] = [set(self.neighbors(i).tolist()) for i in range(self.N)]
        return self.__dict__["_neighbor_sets"]


def build_graph(n: int, cache_neighbors: bool = False,
                max_vertices: int = DEFAULT_MAX_VERTICES,
                neighbor_cache_max_n: int = DEFAULT_NEIGHBOR_CACHE_MAX_N) -> DistGraph:
    """
    Enumerate the complete distance graph G(n, n/2, n/4)

    Args:
        n: Coordinate count, n ≡ 0 (mod 4), 4 ≤ n ≤ 64
        cache_neighbors: Materialize neighbor index lists (honored for n ≤ neighbor_cache_max_n)
        max_vertices: Refuse graphs with more vertices than this

    Returns:
        DistGraph with vertices in increasing numeric order
    """
    validate_n(n)
    expected = BINOMIALS.choose(n, n // 2)
    require(expected <= max_vertices,
            f"G({n}) has {expected} vertices, above the enumeration limit {max_vertices}", "budget")

    logger.info(f"Building G({n}, {n // 2}, {n // 4}) with {expected} vertices")
    vertices = enumerate_vertex_words(n)
    if len(vertices) != expected:
        raise DistGraphError(f"enumerated {len(vertices)} vertices, expected {expected}")

    graph = DistGraph(n, vertices)
    if cache_neighbors and n <= neighbor_cache_max_n:
        logger.debug(f"Caching neighbor lists for G({n})")
        graph.neighbor_cache = [np.flatnonzero(graph.adjacency_mask(int(w))) for w in vertices]
    return graph


def stirling_estimates(n: int) -> Tuple[float, float]:
    """Asymptotic forms √(2/π)·2ⁿ/√n of N and (4/π)·2ⁿ/n of N1"""
    validate_n(n)
    return math.sqrt(2 / math.pi) * 2 ** n / math.sqrt(n), (4 / math.pi) * 2 ** n / n


def find_no_common_neighbor_triple(graph: DistGraph, budget: int,
                                   seed: int = 0) -> Optional[Tuple[VertexWord, VertexWord, VertexWord]]:
    """
    Search for three vertices without a common neighbor

    Mutually adjacent triples through the first vertex are examined first
    (every triangle is equivalent to one of them under a coordinate
    permutation), then uniformly random triples. Each examined triple counts
    against the budget.

    Returns:
        A triple verified by brute force to have no common neighbor, or None
    """
    require(budget >= 0, f"budget must be nonnegative (got {budget})")
    examined = 0

    anchor = graph.word(0)
    anchor_mask = graph.adjacency_mask(anchor)
    for b in np.flatnonzero(anchor_mask):
        word_b = graph.word(int(b))
        pair_mask = anchor_mask & graph.adjacency_mask(word_b)
        for c in np.flatnonzero(pair_mask):
            if c <= b:
                continue
            if examined >= budget:
                logger.info(f"Budget of {budget} triples exhausted without a witness")
                return None
            examined += 1
            triple = (anchor, word_b, graph.word(int(c)))
            if graph.common_neighbor_count(triple) == 0:
                logger.info(f"Found witness after {examined} triples")
                return triple

    rng = np.random.Generator(np.random.Philox(seed))
    while examined < budget:
        picks = rng.choice(graph.N, size=3, replace=False)
        examined += 1
        triple = tuple(graph.word(int(i)) for i in sorted(picks))
        if graph.common_neighbor_count(triple) == 0:
            logger.info(f"Found witness after {examined} triples")
            return triple

    logger.info(f"Budget of {budget} triples exhausted without a witness")
    return None
