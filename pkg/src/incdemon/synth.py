"""Deterministic synthetic graph generators for benchmarks and tests."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from .graph import write_edge_list
from .merge import write_snapshot

KINDS = ("preferential-attachment", "planted-cliques", "gnm")


@dataclass
class SyntheticGraph:
    base: list[tuple[int, int]]
    stream: list[tuple[int, int]]
    truth: list[frozenset[int]] = field(default_factory=list)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return self.base + self.stream


def preferential_attachment(n: int, m: int, seed: int) -> list[tuple[int, int]]:
    """Barabasi-Albert edges in generation order.

    Starts from a clique on m+1 vertices; each later vertex attaches to m
    distinct existing vertices chosen proportionally to degree.
    """
    if m < 1 or n <= m:
        raise ValueError(f"need 1 <= m < n, got n={n}, m={m}")
    rng = random.Random(seed)
    edges = list(combinations(range(m + 1), 2))
    # each vertex appears once per incident edge
    pool = [v for e in edges for v in e]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(pool[rng.randrange(len(pool))])
        for t in sorted(targets):
            edges.append((t, new))
            pool.append(t)
            pool.append(new)
    return edges


def planted_cliques(
    k: int, size: int, inter_edges: int, seed: int
) -> tuple[list[tuple[int, int]], list[frozenset[int]]]:
    """k disjoint cliques of ``size`` vertices, ``inter_edges`` random edges per pair."""
    if k < 1 or size < 2:
        raise ValueError("need k >= 1 cliques of size >= 2")
    if inter_edges > size * size:
        raise ValueError("more inter-clique edges than vertex pairs")
    rng = random.Random(seed)
    truth = [frozenset(range(i * size, (i + 1) * size)) for i in range(k)]
    edges = [e for c in truth for e in combinations(sorted(c), 2)]
    for a, b in combinations(range(k), 2):
        chosen: set[tuple[int, int]] = set()
        while len(chosen) < inter_edges:
            chosen.add((a * size + rng.randrange(size), b * size + rng.randrange(size)))
        edges.extend(sorted(chosen))
    rng.shuffle(edges)
    return edges, truth


def gnm(n: int, m: int, seed: int) -> list[tuple[int, int]]:
    """Uniform random simple graph with n vertices and m edges, in random order."""
    if m > n * (n - 1) // 2:
        raise ValueError("too many edges for a simple graph")
    rng = random.Random(seed)
    seen: set[tuple[int, int]] = set()
    out = []
    while len(out) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        e = (min(u, v), max(u, v))
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def gen_synthetic(
    kind: str,
    n: int,
    m_or_k: int,
    seed: int,
    stream: int = 100,
    *,
    inter_edges: int = 1,
) -> SyntheticGraph:
    """Build a synthetic graph and split its last ``stream`` edges off.

    ``m_or_k`` is edges per new vertex for preferential attachment, the
    number of cliques for planted-cliques, and the total edge count for gnm.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    truth: list[frozenset[int]] = []
    if kind == "preferential-attachment":
        edges = preferential_attachment(n, m_or_k, seed)
    elif kind == "planted-cliques":
        if m_or_k < 1 or n % m_or_k:
            raise ValueError(f"n={n} is not divisible into {m_or_k} cliques")
        edges, truth = planted_cliques(m_or_k, n // m_or_k, inter_edges, seed)
    elif kind == "gnm":
        edges = gnm(n, m_or_k, seed)
    else:
        raise ValueError(f"unknown generator {kind!r}")
    if not 0 <= stream <= len(edges):
        raise ValueError(f"stream of {stream} edges but only {len(edges)} generated")
    cut = len(edges) - stream
    return SyntheticGraph(edges[:cut], edges[cut:], truth)


def write_synthetic(sg: SyntheticGraph, out_dir: str | Path, prefix: str = "synthetic") -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"base": out / f"{prefix}_base.csv", "stream": out / f"{prefix}_stream.csv"}
    write_edge_list(sg.base, paths["base"])
    write_edge_list(sg.stream, paths["stream"])
    if sg.truth:
        paths["truth"] = out / f"{prefix}_truth.txt"
        write_snapshot(sg.truth, paths["truth"])
    return paths
