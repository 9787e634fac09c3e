#!/usr/bin/env python3
"""
Embedding Search for distgraph-lab
Backtracking over images of pattern vertices in a host graph given by
neighbor sets. Shared by the brute-force counters, copy counting in samples
and the extension check.
"""

import logging
from math import factorial
from typing import AbstractSet, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from graphs.common import DistGraphError, set_partitions
from graphs.patterns import PatternGraph, Edge

logger = logging.getLogger(__name__)

# Largest independent group of pattern vertices counted in closed form
MAX_TAIL = 5

NeighborFn = Callable[[int], AbstractSet[int]]


class EmbeddingSearch:
    """
    Maps of pattern labels to host vertices that realize every required edge

    Labels in fixed_labels receive their images from the caller. The free
    labels are split into a prefix, enumerated by backtracking, and a tail:
    an independent set whose members only depend on prefix images, counted
    in closed form (a product of candidate-set sizes, with a Möbius sum over
    coincidence patterns when images must be distinct).
    """

    def __init__(self, neighbors: NeighborFn, vertex_count: int, pattern: PatternGraph,
                 fixed_labels: Sequence[int] = (), required: Optional[Iterable[Edge]] = None,
                 injective: bool = True, active: Optional[Sequence[int]] = None):
        self.neighbors = neighbors
        self.vertex_count = vertex_count
        self.pattern = pattern
        self.fixed_labels = tuple(fixed_labels)
        self.injective = injective
        self.active = active if active is not None else range(vertex_count)

        edges = pattern.edges if required is None else required
        self.adj: List[set] = [set() for _ in range(pattern.vcount)]
        for i, j in edges:
            self.adj[i].add(j)
            self.adj[j].add(i)

        fixed = set(self.fixed_labels)
        self.free_labels = [v for v in range(pattern.vcount) if v not in fixed]
        self.tail = self._choose_tail()
        self.prefix = self._prefix_order([v for v in self.free_labels if v not in self.tail])
        self._tail_partitions = list(set_partitions(self.tail)) if injective else []
        logger.debug(f"Embedding search: prefix={self.prefix} tail={self.tail} injective={injective}")

    def _choose_tail(self) -> Tuple[int, ...]:
        fixed = set(self.fixed_labels)
        best, best_key = (), None
        free = self.free_labels
        for mask in range(1, 1 << len(free)):
            members = [free[i] for i in range(len(free)) if mask >> i & 1]
            if len(members) > MAX_TAIL or any(self.adj[a] & set(members) for a in members):
                continue
            inside = fixed | (set(free) - set(members))
            prefix_edges = sum(len(self.adj[v] & inside) for v in inside if v not in fixed)
            key = (len(members), prefix_edges)
            if best_key is None or key > best_key:
                best, best_key = tuple(members), key
        return best

    def _prefix_order(self, labels: List[int]) -> List[int]:
        placed = set(self.fixed_labels)
        order = []
        remaining = set(labels)
        while remaining:
            v = max(remaining, key=lambda u: (len(self.adj[u] & placed), len(self.adj[u]), -u))
            order.append(v)
            placed.add(v)
            remaining.remove(v)
        return order

    def _candidates(self, label: int, images: Dict[int, int]) -> AbstractSet[int]:
        anchors = [images[u] for u in self.adj[label] if u in images]
        if not anchors:
            if self.adj[label]:
                return set(self.active)
            return set(range(self.vertex_count))
        sets = sorted((self.neighbors(a) for a in anchors), key=len)
        return sets[0].intersection(*sets[1:]) if len(sets) > 1 else sets[0]

    def _fixed_images(self, fixed_images: Sequence[int]) -> Optional[Dict[int, int]]:
        if len(fixed_images) != len(self.fixed_labels):
            raise DistGraphError(
                f"expected {len(self.fixed_labels)} fixed images (got {len(fixed_images)})", "precondition")
        if self.injective and len(set(fixed_images)) != len(fixed_images):
            return None
        return dict(zip(self.fixed_labels, fixed_images))

    def _tail_count(self, images: Dict[int, int], used: set) -> int:
        sets = []
        for label in self.tail:
            candidates = self._candidates(label, images)
            if self.injective:
                candidates = candidates - used
            if not candidates:
                return 0
            sets.append(candidates)
        if not self.injective:
            total = 1
            for s in sets:
                total *= len(s)
            return total

        position = {label: i for i, label in enumerate(self.tail)}
        total = 0
        for partition in self._tail_partitions:
            term = 1
            for block in partition:
                members = sorted((sets[position[v]] for v in block), key=len)
                size = len(members[0].intersection(*members[1:])) if len(members) > 1 else len(members[0])
                if size == 0:
                    term = 0
                    break
                term *= size
                if len(block) > 1:
                    term *= (-1) ** (len(block) - 1) * factorial(len(block) - 1)
            total += term
        return total

    def count(self, fixed_images: Sequence[int] = ()) -> int:
        """Number of label maps extending the fixed images"""
        images = self._fixed_images(fixed_images)
        if images is None:
            return 0
        used = set(images.values())

        def extend(position: int) -> int:
            if position == len(self.prefix):
                return self._tail_count(images, used) if self.tail else 1
            label = self.prefix[position]
            total = 0
            for w in self._candidates(label, images):
                if self.injective and w in used:
                    continue
                images[label] = w
                used.add(w)
                total += extend(position + 1)
                used.discard(w)
                del images[label]
            return total

        return extend(0)

    def exists(self, fixed_images: Sequence[int] = ()) -> bool:
        """
        True if at least one extension exists; free labels are placed
        smallest candidate set first
        """
        images = self._fixed_images(fixed_images)
        if images is None:
            return False
        used = set(images.values())
        unplaced = set(self.free_labels)

        def extend() -> bool:
            if not unplaced:
                return True
            best_label, best_set = None, None
            for label in sorted(unplaced):
                candidates = self._candidates(label, images)
                if self.injective:
                    candidates = candidates - used
                if not candidates:
                    return False
                if best_set is None or len(candidates) < len(best_set):
                    best_label, best_set = label, candidates
            unplaced.discard(best_label)
            for w in sorted(best_set):
                images[best_label] = w
                used.add(w)
                found = extend()
                used.discard(w)
                del images[best_label]
                if found:
                    unplaced.add(best_label)
                    return True
            unplaced.add(best_label)
            return False

        return extend()
