#!/usr/bin/env python3
"""
Pattern Graphs and Rooted Networks for distgraph-lab
Small fixed graphs F and networks (R, H): densities, balancedness and
automorphism counts, all with exact rational arithmetic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Tuple, List, Optional, Union, Iterator

from graphs.common import DistGraphError

logger = logging.getLogger(__name__)

MAX_PATTERN_VERTICES = 10

Edge = Tuple[int, int]


def _normalize_edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class PatternGraph:
    """A small graph on labels 0..vcount-1"""
    vcount: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if not 1 <= self.vcount <= MAX_PATTERN_VERTICES:
            raise DistGraphError(f"pattern must have 1..{MAX_PATTERN_VERTICES} vertices (got {self.vcount})", "precondition")
        normalized = frozenset(_normalize_edge(i, j) for i, j in self.edges)
        for i, j in normalized:
            if i == j:
                raise DistGraphError(f"loop at vertex {i}", "precondition")
            if not (0 <= i < self.vcount and 0 <= j < self.vcount):
                raise DistGraphError(f"edge ({i}, {j}) outside labels 0..{self.vcount - 1}", "precondition")
        object.__setattr__(self, "edges", normalized)

    @classmethod
    def from_edges(cls, vcount: int, edges) -> "PatternGraph":
        return cls(vcount, frozenset(_normalize_edge(i, j) for i, j in edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return _normalize_edge(i, j) in self.edges

    def neighbors(self, v: int) -> List[int]:
        return sorted(j if i == v else i for i, j in self.edges if v in (i, j))

    def degree_sequence(self) -> List[int]:
        degrees = [0] * self.vcount
        for i, j in self.edges:
            degrees[i] += 1
            degrees[j] += 1
        return degrees

    def adjacency_masks(self) -> List[int]:
        """Bitmask of the neighbors of every vertex"""
        masks = [0] * self.vcount
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return masks

    def placement_order(self) -> List[int]:
        """
        Vertex order for backtracking: start at a maximum-degree vertex and
        repeatedly take the vertex with the most already-placed neighbors
        """
        degrees = self.degree_sequence()
        masks = self.adjacency_masks()
        order: List[int] = []
        placed = 0
        remaining = set(range(self.vcount))
        while remaining:
            best = max(remaining, key=lambda v: ((masks[v] & placed).bit_count(), degrees[v], -v))
            order.append(best)
            placed |= 1 << best
            remaining.remove(best)
        return order


@dataclass(frozen=True)
class RootedNetwork:
    """A network (R, H): pattern H with an ordered sequence of distinct roots"""
    h: PatternGraph
    roots: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        if len(self.roots) < 1:
            raise DistGraphError("a network needs at least one root", "precondition")
        if len(set(self.roots)) != len(self.roots):
            raise DistGraphError(f"roots must be distinct (got {self.roots})", "precondition")
        for r in self.roots:
            if not 0 <= r < self.h.vcount:
                raise DistGraphError(f"root label {r} outside 0..{self.h.vcount - 1}", "precondition")
        if self.h.vcount - len(self.roots) < 1:
            raise DistGraphError("a network needs at least one non-root vertex", "precondition")

    @property
    def d(self) -> int:
        return len(self.roots)

    @property
    def k(self) -> int:
        return self.h.vcount - len(self.roots)

    @property
    def non_roots(self) -> Tuple[int, ...]:
        root_set = set(self.roots)
        return tuple(v for v in range(self.h.vcount) if v not in root_set)

    @property
    def l(self) -> int:
        """Edges of H minus the edges with both ends in R"""
        root_set = set(self.roots)
        return sum(1 for i, j in self.h.edges if not (i in root_set and j in root_set))

    def canonical_labels(self) -> List[int]:
        """Old label of each new label when roots come first and non-roots follow"""
        return list(self.roots) + list(self.non_roots)

    def required_edges(self) -> FrozenSet[Edge]:
        """Edges with at least one non-root end, relabeled roots-first"""
        position = {old: new for new, old in enumerate(self.canonical_labels())}
        return frozenset(
            _normalize_edge(position[i], position[j])
            for i, j in self.h.edges
            if not (i in self.roots and j in self.roots)
        )


Pattern = Union[PatternGraph, RootedNetwork]


def _subset_edge_count(masks: List[int], subset: int) -> int:
    total = 0
    remaining = subset
    while remaining:
        low = remaining & -remaining
        v = low.bit_length() - 1
        total += (masks[v] & subset).bit_count()
        remaining ^= low
    return total // 2


def _subset_densities(f: PatternGraph) -> Iterator[Tuple[int, Fraction]]:
    masks = f.adjacency_masks()
    for subset in range(1, 1 << f.vcount):
        yield subset, Fraction(_subset_edge_count(masks, subset), subset.bit_count())


def density(f: PatternGraph) -> Fraction:
    """ρ(F) = e(F)/v(F)"""
    return Fraction(f.edge_count, f.vcount)


def max_density(f: PatternGraph) -> Fraction:
    """ρ^max(F): maximum density over induced subgraphs on nonempty vertex subsets"""
    return max(value for _, value in _subset_densities(f))


def densest_subset(f: PatternGraph) -> Tuple[int, ...]:
    """First vertex subset (in bitmask order) attaining ρ^max(F)"""
    best_subset, best_value = 1, Fraction(-1)
    for subset, value in _subset_densities(f):
        if value > best_value:
            best_subset, best_value = subset, value
    return tuple(v for v in range(f.vcount) if best_subset >> v & 1)


def induced(f: PatternGraph, subset) -> PatternGraph:
    """Induced subgraph on the given labels, relabeled 0.. in the given order"""
    position = {old: new for new, old in enumerate(subset)}
    return PatternGraph.from_edges(
        len(position),
        [(position[i], position[j]) for i, j in f.edges if i in position and j in position],
    )


def is_strictly_balanced(f: PatternGraph) -> bool:
    """Every proper nonempty induced subgraph is strictly sparser than F"""
    full = (1 << f.vcount) - 1
    rho = density(f)
    return all(value < rho for subset, value in _subset_densities(f) if subset != full)


def is_balanced(f: PatternGraph) -> bool:
    """No nonempty subgraph is denser than F"""
    rho = density(f)
    return all(value <= rho for _, value in _subset_densities(f))


def network_density(net: RootedNetwork) -> Fraction:
    """ρ(R, H) = l/k"""
    return Fraction(net.l, net.k)


def _subnet_densities(net: RootedNetwork) -> Iterator[Fraction]:
    """ρ(R, S) for every S = R ∪ T with T a proper nonempty subset of the non-roots"""
    masks = net.h.adjacency_masks()
    root_mask = sum(1 << r for r in net.roots)
    non_roots = net.non_roots
    for t in range(1, (1 << net.k) - 1):
        members = [non_roots[i] for i in range(net.k) if t >> i & 1]
        subset = root_mask | sum(1 << v for v in members)
        inner = _subset_edge_count(masks, subset) - _subset_edge_count(masks, root_mask)
        yield Fraction(inner, len(members))


def is_strictly_balanced_network(net: RootedNetwork) -> bool:
    rho = network_density(net)
    return all(value < rho for value in _subnet_densities(net))


def is_balanced_network(net: RootedNetwork) -> bool:
    rho = network_density(net)
    return all(value <= rho for value in _subnet_densities(net))


def is_nontrivial(net: RootedNetwork) -> bool:
    """Every root has at least one non-root neighbor in H"""
    non_roots = set(net.non_roots)
    return all(any(v in non_roots for v in net.h.neighbors(r)) for r in net.roots)


def _count_automorphisms(f: PatternGraph, fixed: Tuple[int, ...] = ()) -> int:
    masks = f.adjacency_masks()
    degrees = f.degree_sequence()
    order = f.placement_order()
    image = [-1] * f.vcount
    for v in fixed:
        image[v] = v
    free = [v for v in order if v not in fixed]
    used = set(fixed)

    def consistent(v: int, w: int) -> bool:
        for u in range(f.vcount):
            if image[u] >= 0 and u != v:
                if (masks[v] >> u & 1) != (masks[w] >> image[u] & 1):
                    return False
        return True

    def extend(position: int) -> int:
        if position == len(free):
            return 1
        v = free[position]
        total = 0
        for w in range(f.vcount):
            if w in used or degrees[w] != degrees[v] or not consistent(v, w):
                continue
            image[v] = w
            used.add(w)
            total += extend(position + 1)
            used.discard(w)
            image[v] = -1
        return total

    return extend(0)


def automorphism_count(f: PatternGraph) -> int:
    """Number of vertex permutations preserving the edge set"""
    return _count_automorphisms(f)


def root_fixing_automorphism_count(net: RootedNetwork) -> int:
    """c1: automorphisms of H fixing every root"""
    return _count_automorphisms(net.h, net.roots)


def parse_pattern(text: str) -> Pattern:
    """
    Parse the pattern file format

    One directive per line: 'v <count>', 'e <i> <j>', optional
    'roots <i1> ... <id>'; '#' starts a comment line.

    Returns:
        PatternGraph, or RootedNetwork when a roots directive is present
    """
    vcount: Optional[int] = None
    edges: List[Edge] = []
    seen = set()
    roots: Optional[Tuple[int, ...]] = None

    def fail(line_no: int, message: str):
        raise DistGraphError(f"line {line_no}: {message}", "parse")

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        directive, args = parts[0], parts[1:]
        try:
            values = [int(a) for a in args]
        except ValueError:
            fail(line_no, f"non-integer argument in {line!r}")

        if directive == "v":
            if len(values) != 1:
                fail(line_no, "'v' takes exactly one count")
            if vcount is not None:
                fail(line_no, "duplicate 'v' directive")
            if not 1 <= values[0] <= MAX_PATTERN_VERTICES:
                fail(line_no, f"vertex count must be 1..{MAX_PATTERN_VERTICES} (got {values[0]})")
            vcount = values[0]
        elif directive == "e":
            if len(values) != 2:
                fail(line_no, "'e' takes exactly two labels")
            if vcount is None:
                fail(line_no, "'e' before 'v'")
            i, j = values
            if i == j:
                fail(line_no, f"loop at vertex {i}")
            if not (0 <= i < vcount and 0 <= j < vcount):
                fail(line_no, f"edge label out of range 0..{vcount - 1}")
            edge = _normalize_edge(i, j)
            if edge in seen:
                fail(line_no, f"duplicate edge {i} {j}")
            seen.add(edge)
            edges.append(edge)
        elif directive == "roots":
            if vcount is None:
                fail(line_no, "'roots' before 'v'")
            if roots is not None:
                fail(line_no, "duplicate 'roots' directive")
            if not values:
                fail(line_no, "'roots' needs at least one label")
            for r in values:
                if not 0 <= r < vcount:
                    fail(line_no, f"root label {r} out of range 0..{vcount - 1}")
            if len(set(values)) != len(values):
                fail(line_no, "repeated root label")
            if len(values) >= vcount:
                fail(line_no, "a network needs at least one non-root vertex")
            roots = tuple(values)
        else:
            fail(line_no, f"unknown directive {directive!r}")

    if vcount is None:
        raise DistGraphError("line 0: missing 'v' directive", "parse")

    graph = PatternGraph.from_edges(vcount, edges)
    if roots is not None:
        return RootedNetwork(graph, roots)
    return graph


def format_pattern(pattern: Pattern) -> str:
    """Render a pattern or network in the pattern file format"""
    graph = pattern.h if isinstance(pattern, RootedNetwork) else pattern
    lines = [f"v {graph.vcount}"]
    lines.extend(f"e {i} {j}" for i, j in sorted(graph.edges))
    if isinstance(pattern, RootedNetwork):
        lines.append("roots " + " ".join(str(r) for r in pattern.roots))
    return "\n".join(lines) + "\n"
