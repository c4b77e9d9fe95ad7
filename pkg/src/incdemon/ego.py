"""Ego-minus-ego subgraphs and their incremental maintenance.

The ego-minus-ego network of ``v`` is the subgraph induced by the
neighbours of ``v`` with ``v`` itself (and every edge touching it) taken
out. Each entry is stored as a local adjacency map so label propagation
can run on it without rebuilding anything.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph


@dataclass
class EgoMinusEgo:
    ego: int
    adjacency: dict[int, set[int]] = field(default_factory=dict)

    @property
    def vertices(self) -> set[int]:
        return set(self.adjacency)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a, nb in self.adjacency.items() for b in nb if a < b}

    def __len__(self) -> int:
        return len(self.adjacency)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EgoMinusEgo):
            return NotImplemented
        return self.ego == other.ego and self.adjacency == other.adjacency

    def copy(self) -> EgoMinusEgo:
        return EgoMinusEgo(self.ego, {v: set(nb) for v, nb in self.adjacency.items()})

    def dump(self) -> str:
        verts = ",".join(str(v) for v in sorted(self.adjacency))
        edges = ",".join(f"({a},{b})" for a, b in sorted(self.edges))
        return f"ego {self.ego}: vertices=[{verts}] edges=[{edges}]"


def extract_ego_minus_ego(g: Graph, v: int) -> EgoMinusEgo:
    """Induced subgraph on neighbors(v), excluding v."""
    nbrs = g.neighbors(v)
    return EgoMinusEgo(v, {w: g.neighbors(w) & nbrs for w in nbrs})


def affected_egos(g: Graph, u: int, v: int) -> set[int]:
    """Egos whose entry may change once u--v is in ``g``.

    Only u, v and their common neighbours can actually change; the full
    closed neighbourhood is returned as the conservative bound.
    """
    return {u, v} | g.neighbors(u) | g.neighbors(v)


class EgoCache:
    """Ego-minus-ego entries for every vertex with at least one edge.

    ``lookups`` counts adjacency-set probes made by incremental updates,
    which the tests use to check the per-edge cost bound.
    """

    def __init__(self) -> None:
        self.entries: dict[int, EgoMinusEgo] = {}
        self.lookups = 0

    @classmethod
    def build(cls, g: Graph) -> EgoCache:
        cache = cls()
        for v in g.vertices():
            if g.degree(v):
                cache.entries[v] = extract_ego_minus_ego(g, v)
        return cache

    def __getitem__(self, v: int) -> EgoMinusEgo:
        return self.entries[v]

    def __contains__(self, v: object) -> bool:
        return v in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, v: int) -> EgoMinusEgo | None:
        return self.entries.get(v)

    def _entry(self, v: int) -> EgoMinusEgo:
        entry = self.entries.get(v)
        if entry is None:
            entry = self.entries[v] = EgoMinusEgo(v)
        return entry

    def apply_edge(self, g: Graph, u: int, v: int) -> dict[int, EgoDelta]:
        """Bring the cache up to date after u--v was added to ``g``.

        Returns the delta applied to each changed ego.
        """
        nu, nv = g.neighbors(u), g.neighbors(v)
        # set intersection probes the smaller side
        self.lookups += min(len(nu), len(nv))
        common = (nu & nv) if len(nu) <= len(nv) else (nv & nu)

        deltas: dict[int, EgoDelta] = {}
        for ego, other in ((u, v), (v, u)):
            entry = self._entry(ego)
            adj = entry.adjacency
            adj[other] = set(common)
            changed = set()
            for w in common:
                adj[w].add(other)
                changed.add((min(w, other), max(w, other)))
            self.lookups += len(common)
            deltas[ego] = EgoDelta(added={other}, edges=changed)

        edge = (min(u, v), max(u, v))
        for w in common:
            adj = self.entries[w].adjacency
            adj[u].add(v)
            adj[v].add(u)
            self.lookups += 2
            deltas[w] = EgoDelta(added=set(), edges={edge})
        return deltas

    def dump(self) -> str:
        return "\n".join(self.entries[v].dump() for v in sorted(self.entries))


@dataclass
class EgoDelta:
    """What an edge insertion did to one ego-minus-ego network."""

    added: set[int]
    edges: set[tuple[int, int]]


def apply_edge_to_cache(cache: EgoCache, g: Graph, u: int, v: int) -> set[int]:
    """Incremental update for a single added edge; returns changed egos."""
    return set(cache.apply_edge(g, u, v))


def cache_mismatches(cache: EgoCache, g: Graph) -> list[int]:
    """Egos whose cached entry differs from a fresh extraction."""
    fresh = EgoCache.build(g)
    bad = [v for v in fresh.entries if cache.entries.get(v) != fresh.entries[v]]
    bad.extend(
        v for v, e in cache.entries.items() if v not in fresh.entries and e.adjacency
    )
    return sorted(bad)
