#!/usr/bin/env python3
"""
Pattern Factory for distgraph-lab
Creates named fixture patterns and resolves pattern sources (fixture name or file).
"""

from pathlib import Path
from typing import Dict, Any, Callable
import logging

from graphs.common import DistGraphError
from graphs.patterns import PatternGraph, RootedNetwork, Pattern, parse_pattern

logger = logging.getLogger(__name__)


def _graph(vcount: int, *edges) -> Callable[[], PatternGraph]:
    return lambda: PatternGraph.from_edges(vcount, edges)


def _network(vcount: int, roots, *edges) -> Callable[[], RootedNetwork]:
    return lambda: RootedNetwork(PatternGraph.from_edges(vcount, edges), tuple(roots))


class PatternFactory:
    """Factory for built-in fixtures and pattern files"""

    FIXTURES: Dict[str, Callable[[], Pattern]] = {
        'k2': _graph(2, (0, 1)),
        'p3': _graph(3, (0, 1), (1, 2)),
        'k3': _graph(3, (0, 1), (1, 2), (0, 2)),
        'p4': _graph(4, (0, 1), (1, 2), (2, 3)),
        'c4': _graph(4, (0, 1), (1, 2), (2, 3), (0, 3)),
        'k4': _graph(4, (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
        'tailed-triangle': _graph(4, (0, 1), (1, 2), (0, 2), (2, 3)),
        'two-triangles-path': _graph(8, (0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5),
                                     (2, 6), (6, 7), (7, 3)),
        'k4-path': _graph(7, (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
                          (3, 4), (4, 5), (5, 6)),
        # networks: roots are listed first in each label set
        'root-edge': _network(2, (0,), (0, 1)),
        'cherry': _network(3, (0, 1), (0, 2), (1, 2)),
        'two-children': _network(3, (0,), (0, 1), (0, 2)),
        'root-triangle': _network(3, (0,), (0, 1), (0, 2), (1, 2)),
        'path-extension': _network(4, (0, 1), (0, 2), (2, 3), (3, 1)),
    }

    def __init__(self, config: Dict[str, Any] = None):
        self.config = config or {}

    def create_pattern(self, name: str) -> Pattern:
        """
        Create a fixture pattern by name

        Raises:
            DistGraphError: If the fixture is unknown
        """
        name = name.lower()
        if name not in self.FIXTURES:
            supported = ', '.join(self.FIXTURES.keys())
            raise DistGraphError(f"Unknown fixture: {name}. Supported fixtures: {supported}", "usage")
        logger.debug(f"Creating fixture {name}")
        return self.FIXTURES[name]()

    def resolve(self, source: str) -> Pattern:
        """Fixture name, or path to a file in the pattern format"""
        if self.is_supported_fixture(source):
            return self.create_pattern(source)
        path = Path(source).expanduser()
        if not path.is_file():
            raise DistGraphError(f"{source!r} is neither a fixture name nor a readable pattern file", "usage")
        logger.debug(f"Parsing pattern file {path}")
        try:
            return parse_pattern(path.read_text(encoding="utf-8"))
        except DistGraphError as e:
            e.context = str(path)
            raise

    def resolve_graph(self, source: str) -> PatternGraph:
        """A pattern graph; a network source contributes its graph H"""
        pattern = self.resolve(source)
        return pattern.h if isinstance(pattern, RootedNetwork) else pattern

    def resolve_network(self, source: str) -> RootedNetwork:
        pattern = self.resolve(source)
        if not isinstance(pattern, RootedNetwork):
            raise DistGraphError(f"{source!r} has no roots; a rooted network is required", "precondition")
        return pattern

    def get_supported_fixtures(self) -> list:
        return list(self.FIXTURES.keys())

    def is_supported_fixture(self, name: str) -> bool:
        return name.lower() in self.FIXTURES
