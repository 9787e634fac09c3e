#!/usr/bin/env python3
"""
Tests for the complete distance graph
"""

import itertools
import math
import unittest
import sys
import os

import numpy as np

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from graphs.common import DistGraphError
from graphs.distgraph import (
    build_graph, enumerate_vertex_words, find_no_common_neighbor_triple, is_vertex_word,
    random_vertex_words, stirling_estimates, word_from_coordinates, word_to_coordinates,
)


class TestVertexWords(unittest.TestCase):
    """Test cases for vertex word helpers"""

    def test_coordinates_map_to_low_bits(self):
        """Coordinate i+1 is bit i"""
        self.assertEqual(word_from_coordinates("1100"), 0b0011)
        self.assertEqual(word_from_coordinates("1010"), 0b0101)
        self.assertEqual(word_to_coordinates(0b0101, 4), "1010")

    def test_invalid_coordinate_string(self):
        """Test rejection of non 0/1 strings"""
        with self.assertRaises(DistGraphError):
            word_from_coordinates("1021")

    def test_enumeration_matches_combinations(self):
        """Vertices are the n/2-subsets in increasing numeric order"""
        expected = sorted(sum(1 << i for i in c) for c in itertools.combinations(range(8), 4))
        self.assertEqual(enumerate_vertex_words(8).tolist(), expected)

    def test_random_vertex_words_are_vertices(self):
        """Test random words have n/2 ones inside the low n bits"""
        rng = np.random.default_rng(3)
        for word in random_vertex_words(16, rng, 200).tolist():
            self.assertTrue(is_vertex_word(16, word))


class TestDistGraph(unittest.TestCase):
    """Test cases for DistGraph"""

    @classmethod
    def setUpClass(cls):
        cls.g4 = build_graph(4)
        cls.g8 = build_graph(8)
        cls.g12 = build_graph(12)

    def test_vertex_and_degree_counts(self):
        """N and N1 for small n"""
        for g, big_n, n1 in ((self.g4, 6, 4), (self.g8, 70, 36), (self.g12, 924, 400)):
            with self.subTest(n=g.n):
                self.assertEqual(g.N, big_n)
                self.assertEqual(g.N1, n1)
                self.assertEqual(g.edge_count, big_n * n1 // 2)

    def test_vertices_strictly_increasing(self):
        """Test canonical order"""
        vertices = self.g12.vertices.tolist()
        self.assertTrue(all(a < b for a, b in zip(vertices, vertices[1:])))
        self.assertTrue(all(is_vertex_word(12, w) for w in vertices))

    def test_adjacency_examples(self):
        """Adjacent iff the supports share n/4 positions"""
        g = self.g4
        u, v, w = (word_from_coordinates(s) for s in ("1100", "1010", "0011"))
        self.assertTrue(g.adjacent(u, v))
        self.assertFalse(g.adjacent(u, w))
        self.assertFalse(g.adjacent(u, u))

    def test_degree_is_n1_everywhere(self):
        """Every vertex has degree N1"""
        for g in (self.g4, self.g8, self.g12):
            with self.subTest(n=g.n):
                degrees = {g.degree(int(w)) for w in g.vertices}
                self.assertEqual(degrees, {g.N1})

    def test_degree_sampled_n16(self):
        """Test sampled degrees at n=16"""
        g = build_graph(16)
        self.assertEqual(g.N, 12870)
        rng = np.random.default_rng(1)
        for index in rng.choice(g.N, size=100, replace=False).tolist():
            self.assertEqual(g.degree(g.word(index)), 4900)

    def test_common_neighbors_of_adjacent_pairs(self):
        """Common neighbor counts of adjacent pairs"""
        u, v = word_from_coordinates("1100"), word_from_coordinates("1010")
        self.assertEqual(self.g4.common_neighbor_count((u, v)), 2)

        for g, expected in ((self.g8, 18), (self.g12, 164)):
            with self.subTest(n=g.n):
                edges = g.edge_array()
                rng = np.random.default_rng(g.n)
                for i, j in edges[rng.choice(len(edges), size=30, replace=False)].tolist():
                    self.assertEqual(g.common_neighbor_count((g.word(i), g.word(j))), expected)

    def test_edge_array(self):
        """Edges are the adjacent pairs i < j"""
        edges = self.g8.edge_array()
        self.assertEqual(len(edges), 1260)
        self.assertTrue(all(i < j for i, j in edges.tolist()))
        self.assertTrue(all(self.g8.adjacent(self.g8.word(i), self.g8.word(j)) for i, j in edges.tolist()))
        self.assertEqual(len(self.g12.edge_array()), 184800)

    def test_neighbor_cache_matches_masks(self):
        """Cached neighbor lists agree with adjacency masks"""
        cached = build_graph(8, cache_neighbors=True)
        for index in range(cached.N):
            self.assertEqual(cached.neighbors(index).tolist(),
                             np.flatnonzero(self.g8.adjacency_mask(self.g8.word(index))).tolist())

    def test_index_of(self):
        """Test index lookup and rejection of non-vertices"""
        self.assertEqual(self.g8.index_of(self.g8.word(17)), 17)
        with self.assertRaises(DistGraphError) as ctx:
            self.g8.index_of(0b111)
        self.assertEqual(ctx.exception.error_type, "precondition")

    def test_invalid_n(self):
        """n must be a positive multiple of 4 up to 64"""
        for n in (0, 6, 10, 68):
            with self.subTest(n=n):
                with self.assertRaises(DistGraphError) as ctx:
                    build_graph(n)
                self.assertEqual(ctx.exception.error_type, "precondition")
                self.assertIn("n ≡ 0 (mod 4)", str(ctx.exception))

    def test_enumeration_budget(self):
        """Test refusal above the vertex limit"""
        with self.assertRaises(DistGraphError) as ctx:
            build_graph(12, max_vertices=100)
        self.assertEqual(ctx.exception.error_type, "budget")

    def test_stirling_estimates(self):
        """Asymptotic forms approach the exact counts"""
        approx_n, approx_n1 = stirling_estimates(4)
        self.assertAlmostEqual(approx_n, math.sqrt(2 / math.pi) * 8, places=9)
        ratios = []
        for n in (8, 16, 32):
            approx_n, _ = stirling_estimates(n)
            ratios.append(abs(math.comb(n, n // 2) / approx_n - 1))
        self.assertTrue(ratios[0] > ratios[1] > ratios[2])


class TestNoCommonNeighborTriple(unittest.TestCase):
    """Test cases for the triple search"""

    def test_witness_at_n12(self):
        """A witness exists at n=12 and has no common neighbor"""
        g = build_graph(12)
        triple = find_no_common_neighbor_triple(g, 200_000)
        self.assertIsNotNone(triple)
        self.assertEqual(len(set(triple)), 3)
        self.assertEqual(g.common_neighbor_count(triple), 0)
        # independent check over every vertex
        self.assertFalse(any(all(g.adjacent(int(w), t) for t in triple) for w in g.vertices))

    def test_n8_agrees_with_exhaustive_scan(self):
        """The finder never reports a witness the exhaustive scan rules out"""
        g = build_graph(8)
        triple = find_no_common_neighbor_triple(g, 2000)

        adjacency = np.array([g.adjacency_mask(int(w)) for w in g.vertices], dtype=np.int64)
        witness_exists = False
        for a, b in itertools.combinations(range(g.N), 2):
            common = (adjacency[a] & adjacency[b]) @ adjacency.T
            if np.any(common[b + 1:] == 0):
                witness_exists = True
                break

        if triple is not None:
            self.assertTrue(witness_exists)
            self.assertEqual(g.common_neighbor_count(triple), 0)
        if not witness_exists:
            self.assertIsNone(triple)

    def test_budget_zero_and_negative(self):
        """Zero budget examines nothing; negative budget is an error"""
        g = build_graph(12)
        self.assertIsNone(find_no_common_neighbor_triple(g, 0))
        with self.assertRaises(DistGraphError):
            find_no_common_neighbor_triple(g, -1)


if __name__ == '__main__':
    unittest.main()
