#!/usr/bin/env python3
"""
Exact Counting for distgraph-lab

Brute-force oracles over the complete graph, the block-profile counter and
the closed-form threshold quantities.

Block-profile counting places the non-root vertices one at a time. The
coordinate positions are split into blocks by the bit pattern the placed
vertices show on them; placing a vertex means choosing how many of its n/2
ones fall in every block (u_j ones out of w_j positions, C(w_j, u_j) ways),
subject to sharing exactly n/4 ones with each earlier required neighbor.
Counts depend on the root tuple only through the block sizes.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from graphs.common import BINOMIALS, DistGraphError, require, set_partitions, validate_n
from graphs.distgraph import DistGraph, VertexWord, is_vertex_word
from graphs.backtrack import EmbeddingSearch
from graphs.patterns import (
    Edge, PatternGraph, RootedNetwork, automorphism_count, is_nontrivial,
    is_strictly_balanced, is_strictly_balanced_network, max_density,
    root_fixing_automorphism_count,
)

logger = logging.getLogger(__name__)

MAX_UNROOTED_VERTICES = 8


@dataclass(frozen=True)
class PartitionVector:
    """Block sizes of the coordinate positions under d roots, and their deviations x"""
    n: int
    d: int
    block_sizes: Tuple[int, ...]
    x: Tuple[int, ...]


def partition_vector_from_blocks(n: int, block_sizes: Sequence[int]) -> PartitionVector:
    """
    Build a PartitionVector from block sizes

    Block j collects the positions where root t (0-based) shows a 1 exactly
    when bit d-1-t of j is 0, so block 0 is the all-ones pattern.
    """
    block_sizes = tuple(int(b) for b in block_sizes)
    count = len(block_sizes)
    d = count.bit_length() - 1
    require(count >= 2 and count == 1 << d, f"block count must be a power of two ≥ 2 (got {count})")
    require(sum(block_sizes) == n and min(block_sizes) >= 0, f"block sizes must be nonnegative and sum to n={n}")
    base = n // count
    x = [b - base for b in block_sizes[:-1]]
    x.append(block_sizes[-1] - n + (count - 1) * base)
    return PartitionVector(n, d, block_sizes, tuple(x))


def partition_vector(n: int, roots: Sequence[VertexWord]) -> PartitionVector:
    """Classify every coordinate position by the bit pattern of the roots on it"""
    validate_n(n)
    require(len(roots) >= 1, "partition vector needs at least one root")
    for r in roots:
        require(is_vertex_word(n, r), f"{r:#x} is not a vertex of G({n})")
    d = len(roots)
    sizes = [0] * (1 << d)
    for position in range(n):
        index = 0
        for r in roots:
            index = (index << 1) | (1 - ((r >> position) & 1))
        sizes[index] += 1
    return partition_vector_from_blocks(n, sizes)


def root_intersection(pv: PartitionVector, a: int, b: int) -> int:
    """Common ones of roots a and b: total size of the blocks where both show a 1"""
    mask = (1 << (pv.d - 1 - a)) | (1 << (pv.d - 1 - b))
    return sum(w for j, w in enumerate(pv.block_sizes) if not j & mask)


# --------------------------------------------------------------------------
# Chain counter

@dataclass(frozen=True)
class _Shape:
    """Roots 0..d-1, non-roots d..d+k-1 in placement order"""
    d: int
    k: int
    edges: FrozenSet[Edge]
    root_pairs: FrozenSet[Edge] = frozenset()

    @property
    def vcount(self) -> int:
        return self.d + self.k


@dataclass(frozen=True)
class BlockProfileState:
    """Level s (non-roots placed so far), current blocks and accumulated weight"""
    level: int
    blocks: Tuple[int, ...]
    weight: int = 1


@dataclass(frozen=True)
class _Level:
    live: Tuple[int, ...]
    neighbor_positions: Tuple[int, ...]
    live_after: Tuple[int, ...]


class ChainPlan:
    """Per-level bookkeeping for one shape: which placed vertices still matter"""

    def __init__(self, shape: _Shape, n: int):
        self.shape = shape
        self.n = n
        adj: List[set] = [set() for _ in range(shape.vcount)]
        for i, j in shape.edges:
            adj[i].add(j)
            adj[j].add(i)

        def needed_after(last: int) -> Tuple[int, ...]:
            return tuple(t for t in range(last + 1)
                         if any(t in adj[y] for y in range(last + 1, shape.vcount)))

        self.root_live = needed_after(shape.d - 1) if shape.d else ()
        self.levels: List[_Level] = []
        live = self.root_live
        for s in range(shape.k):
            y = shape.d + s
            earlier = sorted(t for t in adj[y] if t < y)
            positions = tuple(live.index(t) for t in earlier)
            after = needed_after(y)
            self.levels.append(_Level(live, positions, after))
            live = after

    def initial_blocks(self, root_blocks: Sequence[int]) -> Tuple[int, ...]:
        """Root blocks with unreferenced roots merged away"""
        if not self.shape.d:
            return (self.n,)
        return _project(tuple(root_blocks), tuple(range(self.shape.d)), self.root_live)

    def expand(self, state: BlockProfileState) -> Iterator[BlockProfileState]:
        """Every solution of the level system, as the refined child state"""
        level = self.levels[state.level]
        blocks = state.blocks
        width = len(level.live)
        constraints = [
            ([not (j >> (width - 1 - q)) & 1 for j in range(len(blocks))], self.n // 4)
            for q in level.neighbor_positions
        ]
        constraints.append(([True] * len(blocks), self.n // 2))
        for u, weight in _solutions(blocks, constraints):
            refined = []
            for w, value in zip(blocks, u):
                refined.extend((value, w - value))
            child = _project(tuple(refined), level.live + (self.shape.d + state.level,), level.live_after)
            yield BlockProfileState(state.level + 1, child, state.weight * weight)


def _project(blocks: Tuple[int, ...], live: Tuple[int, ...], keep: Tuple[int, ...]) -> Tuple[int, ...]:
    """Merge blocks that differ only in the bits of vertices outside keep"""
    if live == keep:
        return blocks
    width = len(live)
    kept = [q for q, t in enumerate(live) if t in keep]
    merged = [0] * (1 << len(kept))
    for j, w in enumerate(blocks):
        index = 0
        for q in kept:
            index = (index << 1) | ((j >> (width - 1 - q)) & 1)
        merged[index] += w
    return tuple(merged)


def _solutions(blocks: Tuple[int, ...], constraints) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """
    Integer vectors 0 ≤ u_j ≤ w_j meeting every (membership, target) sum,
    with their weight Π C(w_j, u_j); bounds are propagated from the
    remaining capacity of each constraint
    """
    size = len(blocks)
    suffix = []
    for members, _ in constraints:
        tail = [0] * (size + 1)
        for j in range(size - 1, -1, -1):
            tail[j] = tail[j + 1] + (blocks[j] if members[j] else 0)
        suffix.append(tail)
    partial = [0] * len(constraints)
    u = [0] * size

    def search(j: int, weight: int):
        if j == size:
            if all(partial[c] == target for c, (_, target) in enumerate(constraints)):
                yield tuple(u), weight
            return
        lo, hi = 0, blocks[j]
        touched = []
        for c, (members, target) in enumerate(constraints):
            if members[j]:
                remaining = target - partial[c]
                hi = min(hi, remaining)
                lo = max(lo, remaining - suffix[c][j + 1])
                touched.append(c)
        for value in range(lo, hi + 1):
            for c in touched:
                partial[c] += value
            u[j] = value
            yield from search(j + 1, weight * BINOMIALS.choose(blocks[j], value))
            for c in touched:
                partial[c] -= value

    yield from search(0, 1)


@lru_cache(maxsize=4096)
def _chain_count(shape: _Shape, n: int, root_blocks: Tuple[int, ...]) -> int:
    """Sum of weights over all solution chains (no distinctness imposed)"""
    plan = ChainPlan(shape, n)
    memo: Dict[Tuple[int, Tuple[int, ...]], int] = {}

    def total(state: BlockProfileState) -> int:
        if state.level == shape.k:
            return 1
        key = (state.level, state.blocks)
        if key not in memo:
            memo[key] = sum(child.weight * total(BlockProfileState(child.level, child.blocks))
                            for child in plan.expand(state))
        return memo[key]

    start = BlockProfileState(0, plan.initial_blocks(root_blocks))
    value = total(start)
    logger.debug(f"Chain count d={shape.d} k={shape.k} n={n}: {len(memo)} memoized states")
    return value


def _root_pairs_adjacent(shape: _Shape, pv: Optional[PartitionVector], n: int) -> bool:
    return all(root_intersection(pv, a, b) == n // 4 for a, b in shape.root_pairs)


def _quotient(shape: _Shape, partition: List[Tuple[int, ...]]) -> _Shape:
    root_classes = {block: r for block in partition for r in block if r < shape.d}
    others = sorted((b for b in partition if b not in root_classes), key=min)
    label = {}
    for block in partition:
        new = root_classes[block] if block in root_classes else shape.d + others.index(block)
        for v in block:
            label[v] = new
    edges, root_pairs = set(), set(shape.root_pairs)
    for a, b in shape.edges:
        i, j = sorted((label[a], label[b]))
        if i == j:
            raise DistGraphError("quotient has a loop", "general")
        if j < shape.d:
            root_pairs.add((i, j))
        else:
            edges.add((i, j))
    return _Shape(shape.d, len(others), frozenset(edges), frozenset(root_pairs))


def _injective_count(shape: _Shape, n: int, pv: Optional[PartitionVector]) -> int:
    """
    Distinct-image count via count_all(H) = Σ_θ count_distinct(H/θ) over
    partitions θ into independent classes holding at most one root
    """
    root_blocks = pv.block_sizes if pv is not None else (n,)
    memo: Dict[_Shape, int] = {}

    def distinct(current: _Shape) -> int:
        if current in memo:
            return memo[current]
        if not _root_pairs_adjacent(current, pv, n):
            memo[current] = 0
            return 0
        plain = _Shape(current.d, current.k, current.edges)
        value = _chain_count(plain, n, root_blocks) if current.k else 1

        adj: List[set] = [set() for _ in range(current.vcount)]
        for i, j in current.edges:
            adj[i].add(j)
            adj[j].add(i)

        def compatible(block: Tuple[int, ...], item: int) -> bool:
            if item < current.d and any(v < current.d for v in block):
                return False
            return not any(v in adj[item] for v in block)

        for partition in set_partitions(range(current.vcount), compatible):
            if len(partition) < current.vcount:
                value -= distinct(_quotient(current, partition))
        memo[current] = value
        return value

    return distinct(shape)


def _network_shape(net: RootedNetwork) -> _Shape:
    return _Shape(net.d, net.k, net.required_edges())


def _graph_shape(f: PatternGraph) -> _Shape:
    return _Shape(0, f.vcount, f.edges)


# --------------------------------------------------------------------------
# Public counts

def blockprofile_rooted_count(net: RootedNetwork, pv: PartitionVector, n: int, injective: bool = False) -> int:
    """
    Exact rooted count from the partition vector of the root tuple

    Args:
        net: Rooted network (R, H)
        pv: Partition vector of the root images
        n: Coordinate count
        injective: Require all d+k images distinct (default: chain semantics)
    """
    validate_n(n)
    require(pv.d == net.d, f"partition vector has d={pv.d} but the network has {net.d} roots")
    require(pv.n == n, f"partition vector was built for n={pv.n}, not n={n}")
    shape = _network_shape(net)
    if not injective:
        return _chain_count(shape, n, pv.block_sizes)
    if any(root_intersection(pv, a, b) == n // 2 for a in range(pv.d) for b in range(a + 1, pv.d)):
        return 0
    return _injective_count(shape, n, pv)


def blockprofile_unrooted_count(f: PatternGraph, n: int, injective: bool = True) -> int:
    """Exact count of edge-respecting vertex sequences of F, from block profiles only"""
    validate_n(n)
    require(f.vcount <= MAX_UNROOTED_VERTICES,
            f"pattern has {f.vcount} vertices, above the limit {MAX_UNROOTED_VERTICES}", "budget")
    shape = _graph_shape(f)
    if injective:
        return _injective_count(shape, n, None)
    return _chain_count(shape, n, (n,))


def bruteforce_rooted_count(net: RootedNetwork, root_images: Sequence[VertexWord], g: DistGraph,
                            injective: bool) -> int:
    """Backtracking count of non-root images realizing every required edge"""
    require(len(root_images) == net.d, f"expected {net.d} root images (got {len(root_images)})")
    require(len(set(root_images)) == len(root_images), "root images must be distinct")
    indices = [g.index_of(w) for w in root_images]
    sets = g.neighbor_sets()
    search = EmbeddingSearch(sets.__getitem__, g.N, net.h, fixed_labels=net.roots,
                             required=_required_original(net), injective=injective)
    return search.count(indices)


def _required_original(net: RootedNetwork) -> List[Edge]:
    roots = set(net.roots)
    return [(i, j) for i, j in net.h.edges if not (i in roots and j in roots)]


def bruteforce_monomorphisms(f: PatternGraph, g: DistGraph) -> int:
    """Injective edge-preserving maps V(F) → V(G) by backtracking"""
    sets = g.neighbor_sets()
    return EmbeddingSearch(sets.__getitem__, g.N, f).count()


def pair_profile_counts(n: int) -> Dict[int, int]:
    """Ordered vertex pairs with support intersection m, for m = 0..n/2"""
    validate_n(n)
    half = n // 2
    total = BINOMIALS.choose(n, half)
    return {m: total * BINOMIALS.choose(half, m) * BINOMIALS.choose(half, half - m) for m in range(half + 1)}


def pair_decomposition_count(f: PatternGraph, z1: int, z2: int, n: int) -> int:
    """Chain count of F rebuilt from rooted counts at every pair profile of (z1, z2)"""
    net = RootedNetwork(f, (z1, z2))
    half = n // 2
    total = 0
    for m, pairs in pair_profile_counts(n).items():
        if f.has_edge(z1, z2) and m != n // 4:
            continue
        pv = partition_vector_from_blocks(n, (m, half - m, half - m, m))
        total += pairs * blockprofile_rooted_count(net, pv, n)
    return total


def exact_copy_count(f: PatternGraph, n: int) -> int:
    """Copies of F in the complete graph: monomorphisms / a(F)"""
    return blockprofile_unrooted_count(f, n, injective=True) // automorphism_count(f)


def expected_copies(f: PatternGraph, n: int, p: float) -> float:
    """E[X_F] in G_p"""
    return exact_copy_count(f, n) * p ** f.edge_count


# --------------------------------------------------------------------------
# Closed forms

def _log_sizes(n: int) -> Tuple[float, float]:
    validate_n(n)
    return (math.log(BINOMIALS.choose(n, n // 2)),
            math.log(BINOMIALS.choose(n // 2, n // 4) ** 2))


def analytic_M(k: int, l: int, n: int) -> float:
    """N^k (N1/N)^l, evaluated in log space"""
    require(k >= 1 and l >= 0, f"need k ≥ 1 and l ≥ 0 (got k={k}, l={l})")
    log_n, log_n1 = _log_sizes(n)
    return math.exp(k * log_n + l * (log_n1 - log_n))


def analytic_M_exact(k: int, l: int, n: int) -> Fraction:
    require(k >= 1 and l >= 0, f"need k ≥ 1 and l ≥ 0 (got k={k}, l={l})")
    validate_n(n)
    big_n = BINOMIALS.choose(n, n // 2)
    n1 = BINOMIALS.choose(n // 2, n // 4) ** 2
    return Fraction(big_n ** k * n1 ** l, big_n ** l)


def threshold_p_star(f: PatternGraph, n: int) -> float:
    """N^(-1/ρmax) · √(ln N)"""
    require(f.edge_count >= 1, "threshold needs a pattern with at least one edge")
    log_n, _ = _log_sizes(n)
    return math.exp(-log_n / float(max_density(f))) * math.sqrt(log_n)


def threshold_p_star_alt(f: PatternGraph, n: int) -> float:
    """N^(-1/ρmax) · N/N1"""
    require(f.edge_count >= 1, "threshold needs a pattern with at least one edge")
    log_n, log_n1 = _log_sizes(n)
    return math.exp(-log_n / float(max_density(f)) + log_n - log_n1)


def poisson_p(f: PatternGraph, n: int, c: float) -> float:
    """c · N^(-k/l) · N/N1 with k = v(F), l = e(F)"""
    require(c > 0, f"c must be positive (got {c})")
    require(f.edge_count >= 1, "Poisson scaling needs a pattern with at least one edge")
    if not is_strictly_balanced(f):
        logger.warning("Pattern is not strictly balanced; the Poisson limit does not apply")
    log_n, log_n1 = _log_sizes(n)
    return c * math.exp(-log_n * f.vcount / f.edge_count + log_n - log_n1)


def ext_sharp_p(net: RootedNetwork, n: int) -> float:
    """p solving N^k (N1/N)^l p^l / c1 = d ln N"""
    require(net.l >= 1, "extension threshold needs at least one required edge")
    if not is_nontrivial(net):
        logger.warning("Network is not nontrivial; the sharp extension threshold does not apply")
    if not is_strictly_balanced_network(net):
        logger.warning("Network is not strictly balanced; the sharp extension threshold does not apply")
    log_n, log_n1 = _log_sizes(n)
    c1 = root_fixing_automorphism_count(net)
    log_rhs = math.log(c1 * net.d * log_n)
    return math.exp((log_rhs - net.k * log_n - net.l * (log_n1 - log_n)) / net.l)
