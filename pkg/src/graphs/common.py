#!/usr/bin/env python3
"""
Common Components for distgraph-lab
Provides the error type, centralized error handling and the exact binomial table.
"""

import math
import logging
from typing import Optional, List, Sequence, Callable, Tuple, Iterator

from scipy.stats import norm

logger = logging.getLogger(__name__)

# Largest coordinate count a vertex word can hold
MAX_N = 64


class DistGraphError(Exception):
    """Base exception for every failure raised by the library"""

    def __init__(self, message: str, error_type: str = "general", context: Optional[str] = None):
        super().__init__(message)
        self.error_type = error_type
        self.context = context

    def __reduce__(self):
        # keep the error type when raised inside a worker process
        return (DistGraphError, (str(self), self.error_type, self.context))


class ErrorHandler:
    """Centralized error handling for library and CLI failures"""

    EXIT_CODES = {
        "usage": 2,
        "precondition": 3,
        "parse": 3,
        "budget": 4,
    }

    @staticmethod
    def handle_error(error: Exception, context: str = "") -> DistGraphError:
        """
        Convert generic exceptions to structured DistGraphError

        Args:
            error: Original exception
            context: Where the error occurred (command name, operation)

        Returns:
            Structured DistGraphError
        """
        if isinstance(error, DistGraphError):
            if context and not error.context:
                error.context = context
            return error

        error_type = "general"
        if isinstance(error, (ValueError, TypeError)):
            error_type = "precondition"
        elif isinstance(error, MemoryError):
            error_type = "budget"

        return DistGraphError(str(error), error_type, context or None)

    @staticmethod
    def exit_code(error: DistGraphError) -> int:
        """Exit code of the CLI for a structured error"""
        return ErrorHandler.EXIT_CODES.get(error.error_type, 1)

    @staticmethod
    def format_error_line(error: DistGraphError) -> str:
        """Single-line machine-parsable error message"""
        message = " ".join(str(error).split())
        if error.context:
            message = f"{error.context}: {message}"
        return f"rdg: error[{error.error_type}]: {message}"


def require(condition: bool, message: str, error_type: str = "precondition") -> None:
    """Raise DistGraphError with the given message unless condition holds"""
    if not condition:
        raise DistGraphError(message, error_type)


def validate_n(n: int) -> None:
    """Check the model constraint n ≡ 0 (mod 4), 4 ≤ n ≤ 64"""
    require(
        isinstance(n, int) and n % 4 == 0 and 4 <= n <= MAX_N,
        f"n must satisfy n ≡ 0 (mod 4) and 4 ≤ n ≤ {MAX_N} (got {n})",
    )


class BinomialTable:
    """Pascal triangle of exact binomial coefficients"""

    def __init__(self, size: int = MAX_N):
        self.size = size
        self.rows: List[List[int]] = [[1]]
        for n in range(1, size + 1):
            previous = self.rows[-1]
            row = [1] * (n + 1)
            for k in range(1, n):
                row[k] = previous[k - 1] + previous[k]
            self.rows.append(row)

    def choose(self, n: int, k: int) -> int:
        """C(n, k), zero outside 0 ≤ k ≤ n"""
        if k < 0 or k > n or n < 0:
            return 0
        if n > self.size:
            raise DistGraphError(f"binomial table holds n ≤ {self.size} (got {n})", "budget")
        return self.rows[n][k]


BINOMIALS = BinomialTable()


def set_partitions(items: Sequence, compatible: Optional[Callable[[Tuple, object], bool]] = None) -> Iterator[List[Tuple]]:
    """
    All partitions of items into blocks, built by placing each item either
    in a new singleton block or in an existing block

    Args:
        items: Elements to partition (order is kept inside blocks)
        compatible: Optional predicate (block, item) allowing item to join block
    """
    items = list(items)
    if not items:
        yield []
        return
    *rest, last = items
    for partition in set_partitions(rest, compatible):
        yield partition + [(last,)]
        for i, block in enumerate(partition):
            if compatible is None or compatible(block, last):
                yield [b if j != i else b + (last,) for j, b in enumerate(partition)]


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a Bernoulli proportion"""
    if total <= 0:
        return (0.0, 1.0)
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    margin = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    return (max(0.0, center - margin), min(1.0, center + margin))
