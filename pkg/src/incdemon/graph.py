"""Dynamic undirected simple graph with CSV edge-list ingestion.

Vertices are arbitrary non-negative integers taken from the input file.
Adjacency is a dict of sets keyed by those ids, so there is no separate
internal index space to translate back on output.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)


class GraphError(Exception):
    """Base class for graph-store errors."""


class SelfLoopError(GraphError, ValueError):
    pass


class IngestionError(GraphError):
    """Raised when an edge-list file cannot be read or parsed.

    ``line`` is the 1-based line number of the offending record, or None
    when the file itself is unreadable.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class EdgeEvent:
    """One stream element: add the undirected edge source--target."""

    source: int
    target: int
    op: str = "add"

    def __post_init__(self):
        if self.source == self.target:
            raise SelfLoopError(f"self-loop on vertex {self.source}")


class Graph:
    """Undirected simple graph backed by adjacency sets."""

    __slots__ = ("_adj", "_m")

    def __init__(self, edges: Iterable[tuple[int, int]] = ()) -> None:
        self._adj: dict[int, set[int]] = {}
        self._m = 0
        for u, v in edges:
            self.add_edge(u, v)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def add_vertex(self, v: int) -> None:
        if v not in self._adj:
            self._adj[v] = set()

    def add_edge(self, u: int, v: int) -> bool:
        """Insert u--v; return True if the edge was not already present."""
        if u == v:
            raise SelfLoopError(f"self-loop on vertex {u}")
        self.add_vertex(u)
        self.add_vertex(v)
        nu = self._adj[u]
        if v in nu:
            return False
        nu.add(v)
        self._adj[v].add(u)
        self._m += 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def has_vertex(self, v: int) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> set[int]:
        # Callers must not mutate the returned set.
        return self._adj.get(v, _EMPTY)

    def degree(self, v: int) -> int:
        return len(self._adj.get(v, _EMPTY))

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (min, max), sorted."""
        for u in sorted(self._adj):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    def average_degree(self) -> float:
        return 2.0 * self._m / self.n if self.n else 0.0

    def copy(self) -> Graph:
        g = Graph()
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g._m = self._m
        return g

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


_EMPTY: frozenset[int] = frozenset()


def neighbors(g: Graph, v: int) -> set[int]:
    return g.neighbors(v)


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


def add_edge(g: Graph, u: int, v: int) -> bool:
    return g.add_edge(u, v)


@dataclass
class LoadStats:
    lines: int = 0
    edges_read: int = 0
    self_loops: int = 0
    duplicates: int = 0
    skipped: list[int] = field(default_factory=list)


def parse_edge_lines(
    lines: Iterable[str], *, lenient: bool = False, stats: LoadStats | None = None
) -> Iterator[tuple[int, int]]:
    """Parse "src,dst" records, yielding (src, dst) pairs.

    Blank lines and lines starting with ``#`` are ignored. Self-loops are
    counted in ``stats`` and dropped. A malformed record raises
    IngestionError unless ``lenient`` is set, in which case it is skipped
    and its line number recorded.
    """
    if stats is None:
        stats = LoadStats()
    for lineno, raw in enumerate(lines, start=1):
        stats.lines += 1
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split(",")
        try:
            if len(parts) != 2:
                raise ValueError(f"expected 2 fields, got {len(parts)}")
            u, v = int(parts[0]), int(parts[1])
            if u < 0 or v < 0:
                raise ValueError("vertex ids must be non-negative")
        except ValueError as exc:
            if lenient:
                stats.skipped.append(lineno)
                logger.warning("skipping line %d: %s", lineno, exc)
                continue
            raise IngestionError(f"{exc}: {text!r}", line=lineno) from None
        if u == v:
            stats.self_loops += 1
            continue
        stats.edges_read += 1
        yield u, v


def load_edge_list(
    path: str | Path, *, lenient: bool = False, stats: LoadStats | None = None
) -> Graph:
    """Read a CSV edge list into a new Graph."""
    if stats is None:
        stats = LoadStats()
    g = Graph()
    try:
        with open(path, encoding="utf-8") as fh:
            for u, v in parse_edge_lines(fh, lenient=lenient, stats=stats):
                if not g.add_edge(u, v):
                    stats.duplicates += 1
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if stats.self_loops:
        logger.info("%s: skipped %d self-loop lines", path, stats.self_loops)
    return g


def load_edge_events(
    path: str | Path, *, lenient: bool = False, stats: LoadStats | None = None
) -> list[EdgeEvent]:
    """Read a stream file in edge-list format, preserving line order."""
    try:
        with open(path, encoding="utf-8") as fh:
            return [
                EdgeEvent(u, v)
                for u, v in parse_edge_lines(fh, lenient=lenient, stats=stats)
            ]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc


def format_edges(g: Graph) -> str:
    """Canonical dump: one "min,max" per line, sorted."""
    return "".join(f"{u},{v}\n" for u, v in g.edges())


def write_edge_list(g: Graph | Iterable[tuple[int, int]], path: str | Path) -> None:
    edges = g.edges() if isinstance(g, Graph) else g
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in edges:
            fh.write(f"{u},{v}\n")
