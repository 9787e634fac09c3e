#!/usr/bin/env python3
"""
Tests for the experiment drivers
"""

import json
import math
import unittest
import sys
import os
from dataclasses import asdict
from fractions import Fraction

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from graphs.common import DistGraphError, wilson_interval
from graphs.experiments import (
    ExtSettings, convergence_report, default_grid, ext_sweep, factorial_moment, lln_check,
    poisson_experiment, poisson_tv_distance, threshold_sweep, uniformity_check,
)
from graphs.pattern_factory import PatternFactory
from graphs.patterns import PatternGraph, RootedNetwork
from graphs.sampler import RootFilter
from graphs.trial_runner import split_range
from models import CheckMode


class TestHelpers(unittest.TestCase):
    """Test cases for grids, intervals and summary statistics"""

    def test_default_grid(self):
        """Nine geometric points from 0.1 to 10"""
        grid = default_grid()
        self.assertEqual(len(grid), 9)
        self.assertAlmostEqual(grid[0], 0.1)
        self.assertAlmostEqual(grid[4], 1.0)
        self.assertAlmostEqual(grid[-1], 10.0)

    def test_split_range(self):
        """Chunks cover every trial once, in order"""
        chunks = split_range(10, 4)
        self.assertEqual([t for chunk in chunks for t in chunk], list(range(10)))
        self.assertEqual(split_range(2, 8), [range(0, 1), range(1, 2)])

    def test_wilson_interval(self):
        """Test Wilson score interval"""
        low, high = wilson_interval(0, 100)
        self.assertEqual(low, 0.0)
        self.assertAlmostEqual(high, 0.0370, places=3)
        low, high = wilson_interval(50, 100)
        self.assertAlmostEqual(low, 0.4038, places=3)
        self.assertAlmostEqual(high, 0.5962, places=3)

    def test_poisson_tv_distance(self):
        """Total variation against Poisson"""
        # the tail beyond the largest observed count folds into its bin
        self.assertAlmostEqual(poisson_tv_distance({0: 1.0}, 1.0), 0.0)
        self.assertAlmostEqual(poisson_tv_distance({0: 0.5, 1: 0.5}, 1.0), 0.5 - math.exp(-1))

    def test_factorial_moment(self):
        """E[(X)_j] from samples"""
        self.assertEqual(factorial_moment([0, 1, 2, 3], 1), 1.5)
        self.assertEqual(factorial_moment([0, 1, 2, 3], 2), 2.0)


class TestThresholdSweep(unittest.TestCase):
    """Test cases for threshold_sweep"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_preconditions(self):
        """Too few trials and unsorted grids are rejected"""
        k3 = self.factory.create_pattern('k3')
        with self.assertRaises(DistGraphError):
            threshold_sweep(k3, 12, [1.0], trials=0, seed=1, threads=1)
        with self.assertRaises(DistGraphError):
            threshold_sweep(k3, 12, [2.0, 1.0], trials=50, seed=1, threads=1)

    def test_far_from_threshold(self):
        """Below p* copies are rare, above p* they are everywhere"""
        k3 = self.factory.create_pattern('k3')
        result = threshold_sweep(k3, 12, [0.1, 10.0], trials=200, seed=1, threads=1)
        low, high = result.rows
        self.assertEqual((low.alpha, high.alpha), (0.1, 10.0))
        self.assertLessEqual(low.estimate, 0.1)
        self.assertGreaterEqual(high.estimate, 0.9)
        for row in result.rows:
            self.assertLessEqual(row.hit_count, row.trials)
            self.assertLessEqual(row.wilson_ci_low, row.estimate)
            self.assertLessEqual(row.estimate, row.wilson_ci_high)
            self.assertAlmostEqual(row.expected_copies, 10102400 * row.p ** 3)

    def test_wilson_coverage_for_edges(self):
        """Intervals cover the exact P(X > 0) for K2"""
        k2 = self.factory.create_pattern('k2')
        alphas = [0.2 * (i + 1) for i in range(10)]
        result = threshold_sweep(k2, 8, alphas, trials=100, seed=3, threads=1)
        covered = 0
        for row in result.rows:
            exact = 1 - (1 - row.p) ** 1260
            covered += row.wilson_ci_low <= exact <= row.wilson_ci_high
        self.assertGreaterEqual(covered, 7)

    def test_dense_rows_are_nested(self):
        """Dense rows share one coupling, so hits grow with α"""
        k2 = self.factory.create_pattern('k2')
        alphas = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
        result = threshold_sweep(k2, 8, alphas, trials=100, seed=4, threads=1)
        hits = [row.hit_count for row in result.rows]
        copies = [row.mean_copies for row in result.rows]
        self.assertEqual(hits, sorted(hits))
        self.assertEqual(copies, sorted(copies))

    def test_clamping(self):
        """p above 1 is clamped and flagged"""
        k2 = self.factory.create_pattern('k2')
        with self.assertLogs('graphs.experiments', level='WARNING'):
            result = threshold_sweep(k2, 8, [1e4], trials=50, seed=1, threads=1)
        row = result.rows[0]
        self.assertTrue(row.clamped)
        self.assertEqual(row.p, 1.0)
        self.assertEqual(row.estimate, 1.0)

    def test_independent_of_worker_count(self):
        """Results do not depend on the number of workers"""
        k2 = self.factory.create_pattern('k2')
        one = threshold_sweep(k2, 8, [1.0, 2.0], trials=60, seed=5, threads=1)
        eight = threshold_sweep(k2, 8, [1.0, 2.0], trials=60, seed=5, threads=8)
        self.assertEqual(json.dumps([asdict(r) for r in one.rows]),
                         json.dumps([asdict(r) for r in eight.rows]))


class TestLawOfLargeNumbers(unittest.TestCase):
    """Test cases for lln_check"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_complete_graph(self):
        """At p=1 the count is exact"""
        result = lln_check(self.factory.create_pattern('k3'), 8, 1.0, trials=3, seed=0, threads=1)
        self.assertTrue(all(v == 0.0 for v in result.quantiles.values()))

    def test_zero_expectation(self):
        """p=0 has no relative deviation"""
        with self.assertRaises(DistGraphError):
            lln_check(self.factory.create_pattern('k3'), 8, 0.0, trials=3, seed=0, threads=1)

    def test_concentration(self):
        """Relative deviations are small above the threshold"""
        k2 = lln_check(self.factory.create_pattern('k2'), 12, 0.5, trials=200, seed=2, threads=1)
        self.assertLessEqual(k2.quantiles[0.5], 0.01)
        k3 = lln_check(self.factory.create_pattern('k3'), 12, 0.05, trials=200, seed=2, threads=1)
        self.assertLess(k3.quantiles[0.95], 0.2)


class TestPoissonExperiment(unittest.TestCase):
    """Test cases for poisson_experiment"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_preconditions(self):
        """Strict balance and enough trials are required"""
        with self.assertRaises(DistGraphError):
            poisson_experiment(self.factory.create_pattern('tailed-triangle'), 12, 1.0, 1000, seed=0, threads=1)
        with self.assertRaises(DistGraphError):
            poisson_experiment(self.factory.create_pattern('k3'), 12, 1.0, 999, seed=0, threads=1)

    def test_triangles_at_n16(self):
        """Triangle counts are close to Poisson"""
        result = poisson_experiment(self.factory.create_pattern('k3'), 16, 1.0, 2000, seed=0, threads=1)
        self.assertAlmostEqual(result.lambda_theory, 1 / 6)
        self.assertAlmostEqual(result.p, 1 / 4900)
        self.assertTrue(result.mean_within_tolerance())
        self.assertLessEqual(result.tv_distance, 0.1)
        self.assertAlmostEqual(sum(result.empirical_pmf.values()), 1.0)


class TestExtSweep(unittest.TestCase):
    """Test cases for ext_sweep"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_sharp_threshold_for_root_edge(self):
        """No isolated vertex well above the threshold, many below"""
        result = ext_sweep(self.factory.create_pattern('root-edge'), 12, [0.5, 2.0], trials=300,
                           root_filter=RootFilter(0.6), seed=7, threads=1)
        low, high = result.rows
        self.assertLessEqual(low.estimate, 0.05)
        self.assertGreaterEqual(high.estimate, 0.9)

    def test_clamped_multiplier(self):
        """Huge multipliers reach the complete graph"""
        result = ext_sweep(self.factory.create_pattern('root-edge'), 8, [100.0], trials=5,
                           root_filter=RootFilter(0.6), seed=1, threads=1)
        row = result.rows[0]
        self.assertTrue(row.clamped)
        self.assertEqual(row.estimate, 1.0)

    def test_sampled_mode_without_admitted_tuples(self):
        """A filter admitting nothing is a precondition error"""
        star = RootedNetwork(PatternGraph.from_edges(4, [(0, 3), (1, 3), (2, 3)]), (0, 1, 2))
        ext = ExtSettings(mode=CheckMode.SAMPLED, tuples=10, rejection_factor=5)
        with self.assertRaises(DistGraphError) as ctx:
            ext_sweep(star, 12, [1.0], trials=2, root_filter=RootFilter(0.0, f_value=0), seed=0,
                      ext=ext, threads=1)
        self.assertEqual(ctx.exception.error_type, "precondition")

    def test_exhaustive_budget(self):
        """Exhaustive sweeps check the tuple budget up front"""
        ext = ExtSettings(max_tuples=1000)
        with self.assertRaises(DistGraphError) as ctx:
            ext_sweep(self.factory.create_pattern('cherry'), 12, [1.0], trials=2,
                      root_filter=RootFilter(0.6), seed=0, ext=ext, threads=1)
        self.assertEqual(ctx.exception.error_type, "budget")


class TestUniformity(unittest.TestCase):
    """Test cases for uniformity_check"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_single_root_counts_are_flat(self):
        """One root: the count is N1 at every vertex"""
        results = uniformity_check(self.factory.create_pattern('root-edge'), [8, 12], RootFilter(0.6),
                                   samples_per_n=50, seed=0)
        self.assertEqual([r.spread for r in results], [0, 0])
        self.assertEqual([r.min_count for r in results], [36, 400])

    def test_cherry_spread_shrinks(self):
        """Relative spread of cherry counts falls with n"""
        results = uniformity_check(self.factory.create_pattern('cherry'), [8, 12, 16, 20], RootFilter(0.6),
                                   samples_per_n=200, seed=0)
        spreads = {r.n: r.spread for r in results}
        self.assertLess(spreads[20], spreads[8])
        at16 = next(r for r in results if r.n == 16)
        self.assertIsNotNone(at16.zero_ratio)
        self.assertGreaterEqual(at16.zero_ratio, 0.8)
        self.assertLessEqual(at16.zero_ratio, 1.2)
        self.assertIn((0, 0, 0, 0), at16.x_vectors)
        self.assertEqual(at16.counts[at16.x_vectors.index((0, 0, 0, 0))], 1810)


class TestConvergence(unittest.TestCase):
    """Test cases for convergence_report"""

    def setUp(self):
        self.factory = PatternFactory()

    def test_triangle_ratio(self):
        """Exact ratios against M(k, l)"""
        rows = convergence_report(self.factory.create_pattern('k3'), [8, 12, 16, 20, 24])
        self.assertEqual([r.n for r in rows], [8, 12, 16, 20, 24])
        self.assertEqual(rows[0].exact_monomorphisms, 45360)
        self.assertEqual(rows[0].ratio, Fraction(45360, 46656))
        self.assertEqual(rows[1].exact_monomorphisms, 924 * 400 * 164)
        self.assertTrue(all(r.ratio < 1 for r in rows))
        gaps = [1 - r.ratio for r in rows]
        self.assertLess(gaps[-1], gaps[0])
        # n=8 is below the trend; from n=12 on the gap shrinks
        self.assertEqual(gaps[1:], sorted(gaps[1:], reverse=True))
        self.assertEqual(len(set(gaps[1:])), 4)

    def test_edge_ratio_is_one(self):
        """K2 has exactly N·N1 monomorphisms"""
        for row in convergence_report(self.factory.create_pattern('k2'), [8, 12, 16]):
            self.assertEqual(row.ratio, 1)


if __name__ == '__main__':
    unittest.main()
