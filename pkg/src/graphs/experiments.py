#!/usr/bin/env python3
"""
Experiment Drivers for distgraph-lab

Every driver is a pure function of its arguments and seed: trial t of a
sweep samples from the stream (seed, t), and chunks return exact integer
aggregates that are combined in task order. In dense mode rows at
different multipliers are nested samples of one coupling, so hit counts
are monotone in the multiplier; sparse rows are independent draws and
carry no such guarantee.
"""

import math
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import poisson

from graphs.common import DistGraphError, require, validate_n, wilson_interval
from graphs.distgraph import DEFAULT_MAX_VERTICES, DistGraph, build_graph, random_vertex_words
from graphs.exactcount import (
    analytic_M, analytic_M_exact, blockprofile_rooted_count, blockprofile_unrooted_count,
    exact_copy_count, ext_sharp_p, partition_vector, poisson_p, threshold_p_star,
)
from graphs.patterns import (
    PatternGraph, RootedNetwork, automorphism_count, densest_subset, induced,
    is_strictly_balanced,
)
from graphs.sampler import (
    DEFAULT_DENSE_MAX_N, DEFAULT_DENSE_P_THRESHOLD, DEFAULT_MAX_TUPLES, DEFAULT_REJECTION_FACTOR,
    DEFAULT_SAMPLED_TUPLES, RootFilter, check_ext, count_copies, make_rng, max_deviation, sample_gp,
)
from graphs.trial_runner import TrialRunner, split_range
from models import (
    CheckMode, ConvergenceRow, LLNResult, PoissonResult, SweepResult, SweepRow, UniformityResult,
)

logger = logging.getLogger(__name__)

DEFAULT_MIN_SWEEP_TRIALS = 50
DEFAULT_MIN_POISSON_TRIALS = 1000
LLN_QUANTILES = (0.5, 0.9, 0.95, 0.99, 1.0)
MAX_CONVERGENCE_VERTICES = 5


@dataclass(frozen=True)
class SamplingSettings:
    """Knobs that fix the sampling contract; part of every trial task"""
    dense_p_threshold: float = DEFAULT_DENSE_P_THRESHOLD
    dense_max_n: int = DEFAULT_DENSE_MAX_N
    max_vertices: int = DEFAULT_MAX_VERTICES


@dataclass(frozen=True)
class ExtSettings:
    mode: CheckMode = CheckMode.EXHAUSTIVE
    tuples: int = DEFAULT_SAMPLED_TUPLES
    max_tuples: int = DEFAULT_MAX_TUPLES
    rejection_factor: int = DEFAULT_REJECTION_FACTOR


@dataclass(frozen=True)
class _CopyTask:
    n: int
    pattern: PatternGraph
    p: float
    seed: int
    trials: range
    settings: SamplingSettings


@dataclass(frozen=True)
class _ExtTask:
    n: int
    network: RootedNetwork
    p: float
    seed: int
    trials: range
    root_filter: RootFilter
    ext: ExtSettings
    settings: SamplingSettings


@lru_cache(maxsize=4)
def _graph(n: int, max_vertices: int) -> DistGraph:
    return build_graph(n, max_vertices=max_vertices)


def _sample(task, g: DistGraph, trial: int):
    return sample_gp(g, task.p, task.seed, (trial,),
                     dense_p_threshold=task.settings.dense_p_threshold,
                     dense_max_n=task.settings.dense_max_n)


def _copy_counts(task: _CopyTask) -> List[int]:
    g = _graph(task.n, task.settings.max_vertices)
    return [count_copies(task.pattern, _sample(task, g, t)) for t in task.trials]


def _ext_hits(task: _ExtTask) -> int:
    g = _graph(task.n, task.settings.max_vertices)
    hits = 0
    for t in task.trials:
        report = check_ext(_sample(task, g, t), task.network, task.root_filter, task.ext.mode,
                           tuples=task.ext.tuples, seed=task.seed, stream=(t, 1),
                           max_tuples=task.ext.max_tuples, rejection_factor=task.ext.rejection_factor)
        hits += report.holds
    return hits


def _chunks(trials: int, runner: TrialRunner) -> List[range]:
    return split_range(trials, runner.workers * 4)


def _collect_counts(runner: TrialRunner, tasks: List[_CopyTask]) -> List[int]:
    counts: List[int] = []
    for chunk in runner.map(_copy_counts, tasks):
        counts.extend(chunk)
    return counts


def default_grid(low: float = 0.1, high: float = 10.0, points: int = 9) -> List[float]:
    """Geometric multiplier grid from low to high"""
    require(0 < low <= high and points >= 1, f"invalid grid low={low} high={high} points={points}")
    if points == 1:
        return [float(low)]
    return [float(x) for x in np.geomspace(low, high, points)]


def _check_grid(values: Sequence[float], name: str) -> None:
    require(len(values) >= 1, f"{name} must not be empty")
    require(all(v > 0 for v in values), f"{name} must be positive (got {list(values)})")
    require(all(a < b for a, b in zip(values, values[1:])), f"{name} must be ascending (got {list(values)})")


def _clamp(p: float, label: str) -> Tuple[float, bool]:
    if p > 1.0:
        logger.warning(f"p = {p:.4g} at {label} exceeds 1; clamped")
        return 1.0, True
    return p, False


def threshold_sweep(f: PatternGraph, n: int, alphas: Sequence[float], trials: int, seed: int,
                    threads: int = 0, settings: SamplingSettings = SamplingSettings(),
                    min_trials: int = DEFAULT_MIN_SWEEP_TRIALS) -> SweepResult:
    """
    Estimate P(X_F > 0) at p = α·p* for every α

    Rows are coupled only when sampling is dense (p above
    settings.dense_p_threshold or n <= settings.dense_max_n); sparse rows
    are independent, so their estimates need not be monotone in α.

    Returns:
        SweepResult with Wilson intervals, mean copy counts, exact E[X_F]
        and the first-moment bound from the densest subgraph
    """
    validate_n(n)
    require(trials >= min_trials, f"trials must be at least {min_trials} (got {trials})")
    _check_grid(alphas, "alphas")

    p_star = threshold_p_star(f, n)
    copies = exact_copy_count(f, n)
    densest = induced(f, densest_subset(f))
    densest_copies = exact_copy_count(densest, n)
    runner = TrialRunner(threads)
    result = SweepResult(pattern=f"v={f.vcount},e={f.edge_count}")

    for row, alpha in enumerate(alphas):
        p, clamped = _clamp(alpha * p_star, f"alpha={alpha}")
        logger.info(f"Running row {row + 1}/{len(alphas)}: alpha={alpha:.4g} p={p:.4g}")
        tasks = [_CopyTask(n, f, p, seed, chunk, settings) for chunk in _chunks(trials, runner)]
        counts = _collect_counts(runner, tasks)
        hits = sum(1 for c in counts if c > 0)
        low, high = wilson_interval(hits, trials)
        result.add_row(SweepRow(
            n=n, alpha=alpha, p=p, trials=trials, hit_count=hits, estimate=hits / trials,
            wilson_ci_low=low, wilson_ci_high=high, mean_copies=sum(counts) / trials, clamped=clamped,
            expected_copies=copies * p ** f.edge_count,
            markov_bound=densest_copies * p ** densest.edge_count,
        ))
    return result


def lln_check(f: PatternGraph, n: int, p: float, trials: int, seed: int, threads: int = 0,
              settings: SamplingSettings = SamplingSettings()) -> LLNResult:
    """Quantiles of |X_F/E[X_F] - 1| over independent samples"""
    validate_n(n)
    require(trials >= 1, f"trials must be positive (got {trials})")
    require(0.0 <= p <= 1.0, f"p must lie in [0, 1] (got {p})")
    expected = exact_copy_count(f, n) * p ** f.edge_count
    require(expected > 0, "E[X_F] = 0; relative deviation is undefined")

    runner = TrialRunner(threads)
    logger.info(f"Running {trials} trials at p={p:.4g}")
    tasks = [_CopyTask(n, f, p, seed, chunk, settings) for chunk in _chunks(trials, runner)]
    counts = np.array(_collect_counts(runner, tasks), dtype=float)
    deviations = np.abs(counts / expected - 1.0)
    values = np.quantile(deviations, LLN_QUANTILES)
    return LLNResult(n=n, p=p, trials=trials, expected=expected,
                     quantiles={q: float(v) for q, v in zip(LLN_QUANTILES, values)},
                     mean_deviation=float(counts.mean() / expected - 1.0))


def poisson_tv_distance(pmf: Dict[int, float], lam: float) -> float:
    """Total variation to Poisson(lam), the tail from the largest observed count folded into one bin"""
    top = max(pmf)
    distance = sum(abs(pmf.get(k, 0.0) - poisson.pmf(k, lam)) for k in range(top))
    distance += abs(pmf.get(top, 0.0) - poisson.sf(top - 1, lam))
    return min(1.0, max(0.0, 0.5 * distance))


def factorial_moment(counts: Sequence[int], order: int) -> float:
    """E[(X)_order] estimated from samples"""
    total = 0
    for x in counts:
        term = 1
        for i in range(order):
            term *= x - i
        total += term
    return total / len(counts)


def poisson_experiment(f: PatternGraph, n: int, c: float, trials: int, seed: int, threads: int = 0,
                       settings: SamplingSettings = SamplingSettings(),
                       min_trials: int = DEFAULT_MIN_POISSON_TRIALS) -> PoissonResult:
    """Empirical law of X_F at p = poisson_p(F, n, c) against Poisson(E[X_F])"""
    validate_n(n)
    require(is_strictly_balanced(f), "Poisson experiment needs a strictly balanced pattern")
    require(trials >= min_trials, f"trials must be at least {min_trials} (got {trials})")
    p = poisson_p(f, n, c)
    l = f.edge_count
    lambda_exact = exact_copy_count(f, n) * p ** l
    lambda_theory = c ** l / automorphism_count(f)

    runner = TrialRunner(threads)
    logger.info(f"Running {trials} trials at p={p:.4g} (lambda={lambda_exact:.4g})")
    tasks = [_CopyTask(n, f, p, seed, chunk, settings) for chunk in _chunks(trials, runner)]
    counts = _collect_counts(runner, tasks)

    histogram = Counter(counts)
    pmf = {k: histogram[k] / trials for k in sorted(histogram)}
    return PoissonResult(
        n=n, c=c, p=p, trials=trials, lambda_theory=lambda_theory, lambda_exact=lambda_exact,
        empirical_pmf=pmf, empirical_mean=sum(counts) / trials,
        tv_distance=poisson_tv_distance(pmf, lambda_exact),
        factorial_moments={j: factorial_moment(counts, j) for j in (1, 2, 3)},
        lambda_ratio=lambda_exact / lambda_theory,
        mean_tolerance=4 * math.sqrt(lambda_exact / trials),
    )


def ext_sweep(net: RootedNetwork, n: int, multipliers: Sequence[float], trials: int,
              root_filter: RootFilter, seed: int, ext: ExtSettings = ExtSettings(), threads: int = 0,
              settings: SamplingSettings = SamplingSettings(),
              min_trials: int = 1) -> SweepResult:
    """
    Estimate P(extension property holds) at p = m·p_sharp for every multiplier m

    As in threshold_sweep, rows share one nested coupling only in dense mode.
    """
    validate_n(n)
    require(trials >= min_trials, f"trials must be at least {min_trials} (got {trials})")
    _check_grid(multipliers, "multipliers")
    g = _graph(n, settings.max_vertices)
    if CheckMode(ext.mode) is CheckMode.EXHAUSTIVE:
        require(g.N ** net.d <= ext.max_tuples,
                f"exhaustive check needs N^d = {g.N ** net.d} root tuples (limit {ext.max_tuples})", "budget")

    p_sharp = ext_sharp_p(net, n)
    runner = TrialRunner(threads)
    result = SweepResult(pattern=f"d={net.d},k={net.k},l={net.l}")
    for row, multiplier in enumerate(multipliers):
        p, clamped = _clamp(multiplier * p_sharp, f"multiplier={multiplier}")
        logger.info(f"Running row {row + 1}/{len(multipliers)}: m={multiplier:.4g} p={p:.4g}")
        tasks = [_ExtTask(n, net, p, seed, chunk, root_filter, ext, settings)
                 for chunk in _chunks(trials, runner)]
        hits = sum(runner.map(_ext_hits, tasks))
        low, high = wilson_interval(hits, trials)
        result.add_row(SweepRow(n=n, alpha=multiplier, p=p, trials=trials, hit_count=hits,
                                estimate=hits / trials, wilson_ci_low=low, wilson_ci_high=high,
                                clamped=clamped))
    return result


def uniformity_check(net: RootedNetwork, n_list: Sequence[int], root_filter: RootFilter,
                     samples_per_n: int, seed: int, name: str = "") -> List[UniformityResult]:
    """
    Exact rooted counts at the partition vectors of sampled admitted root tuples

    Tuples are uniform over V^d; only the distinct partition vectors matter,
    since the count depends on the roots through them alone.
    """
    require(net.d <= 2 and net.k <= 2, f"uniformity check supports d ≤ 2 and k ≤ 2 (got d={net.d}, k={net.k})")
    require(samples_per_n >= 1, f"samples per n must be positive (got {samples_per_n})")
    results = []
    for index, n in enumerate(n_list):
        validate_n(n)
        bound = root_filter.f(n)
        rng = make_rng(seed, (index,))
        rows = random_vertex_words(n, rng, samples_per_n * net.d).reshape(samples_per_n, net.d)
        admitted = rows[max_deviation(n, rows) <= bound]
        if not len(admitted):
            raise DistGraphError(f"no sampled root tuple passed the filter f={bound} at n={n}", "precondition")

        vectors = {}
        for roots in admitted.tolist():
            pv = partition_vector(n, roots)
            vectors.setdefault(pv.x, pv)
        x_vectors = sorted(vectors)
        counts = [blockprofile_rooted_count(net, vectors[x], n) for x in x_vectors]
        reference = analytic_M(net.k, net.l, n)
        low, high = min(counts), max(counts)
        zero = tuple([0] * len(x_vectors[0]))
        logger.info(f"n={n}: {len(x_vectors)} distinct partition vectors, counts {low}..{high}")
        results.append(UniformityResult(
            n=n, network=name, f=bound, samples=samples_per_n, x_vectors=x_vectors, counts=counts,
            min_count=low, max_count=high, spread=high / low - 1 if low else math.inf,
            reference_M=reference, ratio_min=low / reference, ratio_max=high / reference,
            zero_ratio=counts[x_vectors.index(zero)] / reference if zero in vectors else None,
        ))
    return results


def convergence_report(f: PatternGraph, n_list: Sequence[int]) -> List[ConvergenceRow]:
    """Exact monomorphism counts against N^k (N1/N)^l"""
    require(f.vcount <= MAX_CONVERGENCE_VERTICES,
            f"convergence report supports up to {MAX_CONVERGENCE_VERTICES} vertices (got {f.vcount})")
    rows = []
    for n in n_list:
        exact = blockprofile_unrooted_count(f, n, injective=True)
        reference = analytic_M_exact(f.vcount, f.edge_count, n)
        rows.append(ConvergenceRow(n=n, exact_monomorphisms=exact, M=reference, ratio=Fraction(exact) / reference))
    return rows
