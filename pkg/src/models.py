#!/usr/bin/env python3
"""
Data models for distgraph-lab
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Dict, Any, Tuple
from enum import Enum


class CheckMode(Enum):
    """How root tuples are visited by the extension check"""
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


class OutputFormat(Enum):
    """Supported result formats"""
    CSV = "csv"
    JSON = "json"


@dataclass
class ExtReport:
    """Outcome of one extension check on a sampled graph"""
    holds: bool
    tuples_checked: int
    first_failure: Optional[Tuple[int, ...]] = None
    tuples_rejected: int = 0


@dataclass
class TildeEstimate:
    """Fraction of root tuples whose partition vector passes the filter"""
    n: int
    d: int
    f: int
    estimate: float
    ci_low: float
    ci_high: float
    exact: bool
    samples: int
    accepted: int


@dataclass
class SweepRow:
    """One grid point of a threshold or extension sweep"""
    n: int
    alpha: float
    p: float
    trials: int
    hit_count: int
    estimate: float
    wilson_ci_low: float
    wilson_ci_high: float
    mean_copies: Optional[float] = None
    clamped: bool = False
    expected_copies: Optional[float] = None
    markov_bound: Optional[float] = None


@dataclass
class SweepResult:
    """Rows ordered by (n, alpha)"""
    pattern: str
    rows: List[SweepRow] = field(default_factory=list)

    def add_row(self, row: SweepRow) -> None:
        self.rows.append(row)
        self.rows.sort(key=lambda r: (r.n, r.alpha))


@dataclass
class LLNResult:
    """Relative deviations |X/E[X] - 1| over repeated samples"""
    n: int
    p: float
    trials: int
    expected: float
    quantiles: Dict[float, float]
    mean_deviation: float


@dataclass
class PoissonResult:
    """Empirical law of X_F against Poisson(lambda_exact)"""
    n: int
    c: float
    p: float
    trials: int
    lambda_theory: float
    lambda_exact: float
    empirical_pmf: Dict[int, float]
    empirical_mean: float
    tv_distance: float
    factorial_moments: Dict[int, float] = field(default_factory=dict)
    lambda_ratio: float = 0.0
    mean_tolerance: float = 0.0

    def mean_within_tolerance(self) -> bool:
        return abs(self.empirical_mean - self.lambda_exact) <= self.mean_tolerance


@dataclass
class UniformityResult:
    """Exact rooted counts over the distinct partition vectors seen at one n"""
    n: int
    network: str
    f: int
    samples: int
    x_vectors: List[Tuple[int, ...]]
    counts: List[int]
    min_count: int
    max_count: int
    spread: float
    reference_M: float
    ratio_min: float
    ratio_max: float
    zero_ratio: Optional[float] = None


@dataclass
class ConvergenceRow:
    """Exact monomorphism count against N^k (N1/N)^l"""
    n: int
    exact_monomorphisms: int
    M: Fraction
    ratio: Fraction


@dataclass
class RunConfig:
    """Resolved options of one CLI invocation"""
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    # Options that only affect how a run executes, never its results
    EXECUTION_KEYS = ("threads", "out", "verbose", "settings", "config")

    def echo(self) -> Dict[str, Any]:
        """Options as echoed into JSON output"""
        return {k: v for k, v in sorted(self.options.items())
                if k not in self.EXECUTION_KEYS and v is not None}
