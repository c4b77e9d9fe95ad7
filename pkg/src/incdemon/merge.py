"""Global pool of overlapping communities and the epsilon-merge rule.

Two communities merge when at most ``epsilon`` of the smaller one lies
outside the larger one. The pool keeps a vertex -> community-ids table so
that a submitted community is only compared against communities it
actually shares a vertex with, plus a per-community table of sizes and
overlapping community ids.

Each community also records *support*: for every member, how many
contributed groups covered it. That lets the incremental engine withdraw
a stale contribution and shrink the community it had been merged into.
"""
from __future__ import annotations

import random
from collections import Counter
from itertools import chain
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Iterable, Mapping

from .errors import CoherenceError

_EPS_SLACK = 1e-9


class SnapshotError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class Community:
    id: int
    support: Counter = field(default_factory=Counter)
    contributions: set[int] = field(default_factory=set)

    @property
    def members(self):
        return self.support.keys()

    @property
    def size(self) -> int:
        return len(self.support)

    def __len__(self) -> int:
        return len(self.support)


@dataclass
class CommunityStats:
    size: int
    overlapping: set[int] = field(default_factory=set)


@dataclass
class MergeReport:
    absorbed: list[int]
    result_id: int
    comparisons: int = 0


def _members(c) -> Collection[int]:
    return c.members if isinstance(c, Community) else c


def _intersection_size(a: Collection[int], b: Collection[int]) -> int:
    if len(a) > len(b):
        a, b = b, a
    return sum(1 for v in a if v in b)


def overlap_fraction(a, b) -> float:
    """|a & b| / min(|a|, |b|)."""
    a, b = _members(a), _members(b)
    small = min(len(a), len(b))
    if small == 0:
        raise ValueError("overlap of an empty community is undefined")
    return _intersection_size(a, b) / small


def check_epsilon(epsilon: float) -> float:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return float(epsilon)


def should_merge(a, b, epsilon: float) -> bool:
    check_epsilon(epsilon)
    a, b = _members(a), _members(b)
    small = min(len(a), len(b))
    if small == 0:
        raise ValueError("cannot compare an empty community")
    # integer form of overlap/small >= 1 - epsilon; slack absorbs 1-0.7 != 0.3
    return _intersection_size(a, b) >= (1.0 - epsilon) * small - _EPS_SLACK


class CommunityPool:
    """Live community set plus its two lookup tables.

    ``shuffle_seed`` switches candidate scanning from ascending id to a
    seeded shuffle.
    """

    def __init__(self, epsilon: float = 0.25, shuffle_seed: int | None = None) -> None:
        self.epsilon = check_epsilon(epsilon)
        self.communities: dict[int, Community] = {}
        self.vertex_table: dict[int, set[int]] = {}
        self.stats_table: dict[int, CommunityStats] = {}
        self.owner: dict[int, int] = {}
        self.next_id = 0
        self.comparisons = 0
        self._rng = random.Random(shuffle_seed) if shuffle_seed is not None else None

    def __len__(self) -> int:
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities.values())

    def candidates(self, members: Iterable[int]) -> set[int]:
        found: set[int] = set()
        table = self.vertex_table
        for v in members:
            ids = table.get(v)
            if ids:
                found |= ids
        return found

    def _ordered(self, ids) -> list[int]:
        order = sorted(ids)
        if self._rng is not None:
            self._rng.shuffle(order)
        return order

    def submit(
        self,
        members: Iterable[int] | Counter,
        contributions: Iterable[int] = (),
    ) -> MergeReport:
        """Merge a community into the pool.

        The first candidate (sharing at least one vertex) that passes
        ``should_merge`` is absorbed and the union is re-submitted, until no
        candidate merges; the result is then inserted under a fresh id.
        ``members`` may be a Counter of per-vertex support.
        """
        if isinstance(members, Counter):
            support = Counter(members)
        else:
            support = Counter(dict.fromkeys(members, 1))
        if not support:
            raise ValueError("cannot submit an empty community")
        contribs = set(contributions)
        absorbed: list[int] = []
        comparisons = 0
        need = 1.0 - self.epsilon
        comms = self.communities
        while True:
            # one pass over the vertex table yields |c & c'| for every candidate
            table = self.vertex_table
            shared = Counter(chain.from_iterable([table[v] for v in support if v in table]))
            size = len(support)
            for cid in self._ordered(shared.keys()):
                comparisons += 1
                other = comms[cid]
                if shared[cid] >= need * min(size, len(other.support)) - _EPS_SLACK:
                    self._retire(cid)
                    support.update(other.support)
                    contribs |= other.contributions
                    absorbed.append(cid)
                    break
            else:
                break
        self.comparisons += comparisons
        cid = self._insert(support, contribs)
        return MergeReport(absorbed, cid, comparisons)

    def _insert(self, support: Counter, contributions: set[int]) -> int:
        cid = self.next_id
        self.next_id += 1
        overlapping = self.candidates(support.keys())
        self.communities[cid] = Community(cid, support, contributions)
        self.stats_table[cid] = CommunityStats(len(support), overlapping)
        for other in overlapping:
            self.stats_table[other].overlapping.add(cid)
        table = self.vertex_table
        for v in support:
            ids = table.get(v)
            if ids is None:
                table[v] = {cid}
            else:
                ids.add(cid)
        for k in contributions:
            self.owner[k] = cid
        return cid

    def _retire(self, cid: int) -> Community:
        comm = self.communities.pop(cid)
        stats = self.stats_table.pop(cid)
        for other in stats.overlapping:
            self.stats_table[other].overlapping.discard(cid)
        table = self.vertex_table
        for v in comm.support:
            ids = table[v]
            ids.discard(cid)
            if not ids:
                del table[v]
        for k in comm.contributions:
            if self.owner.get(k) == cid:
                del self.owner[k]
        return comm

    def withdraw(self, removals: Mapping[int, Iterable[int]]) -> list[Community]:
        """Take contributions back out of the pool.

        ``removals`` maps contribution id to the members it contributed.
        Every community holding one of them is retired and its support
        reduced; the non-empty residuals are returned (ascending old id) for
        the caller to re-submit.
        """
        by_owner: dict[int, list[int]] = {}
        for k in removals:
            cid = self.owner.get(k)
            if cid is not None:
                by_owner.setdefault(cid, []).append(k)
        residuals = []
        for cid in sorted(by_owner):
            comm = self._retire(cid)
            for k in by_owner[cid]:
                comm.contributions.discard(k)
                comm.support.subtract(removals[k])
            comm.support = +comm.support
            if comm.support:
                residuals.append(comm)
        return residuals

    def fresh_tables(self) -> tuple[dict[int, set[int]], dict[int, CommunityStats]]:
        vt: dict[int, set[int]] = {}
        for cid, comm in self.communities.items():
            for v in comm.support:
                vt.setdefault(v, set()).add(cid)
        st = {cid: CommunityStats(c.size, set()) for cid, c in self.communities.items()}
        for ids in vt.values():
            for cid in ids:
                st[cid].overlapping |= ids
        for cid, s in st.items():
            s.overlapping.discard(cid)
        return vt, st

    def rebuild_tables(self) -> None:
        self.vertex_table, self.stats_table = self.fresh_tables()
        self.owner = {
            k: cid for cid, c in self.communities.items() for k in c.contributions
        }

    def check(self) -> None:
        """Raise CoherenceError if either table disagrees with a rebuild."""
        vt, st = self.fresh_tables()
        if vt != self.vertex_table:
            bad = sorted(v for v in vt.keys() | self.vertex_table.keys()
                         if vt.get(v) != self.vertex_table.get(v))
            raise CoherenceError(f"vertex table incoherent at vertices {bad[:10]}")
        if st != self.stats_table:
            raise CoherenceError("stats table incoherent")
        for cid, c in self.communities.items():
            if not c.support or any(n <= 0 for n in c.support.values()):
                raise CoherenceError(f"community {cid} has empty or non-positive support")
            for k in c.contributions:
                if self.owner.get(k) != cid:
                    raise CoherenceError(f"contribution {k} not owned by {cid}")

    def member_sets(self) -> list[frozenset[int]]:
        return [frozenset(c.support) for c in self.communities.values()]

    def snapshot(self) -> str:
        return format_snapshot(self.member_sets())


def merge_into_pool(pool: CommunityPool, c: Iterable[int]) -> MergeReport:
    return pool.submit(c)


def rebuild_tables(pool: CommunityPool) -> None:
    pool.rebuild_tables()


def naive_merge(communities: Iterable[Iterable[int]], epsilon: float) -> list[frozenset[int]]:
    """All-pairs reference merge without lookup tables.

    Communities are taken in input order; each is compared with every live
    community in ascending id order, merged with the first match and the
    union re-compared from scratch. A final all-pairs sweep then merges any
    remaining qualifying pair until none is left.
    """
    check_epsilon(epsilon)
    live: list[tuple[int, frozenset[int]]] = []
    next_id = 0
    for c in communities:
        cur = frozenset(c)
        if not cur:
            continue
        while True:
            for i, (_, other) in enumerate(live):
                if should_merge(other, cur, epsilon):
                    del live[i]
                    cur = cur | other
                    break
            else:
                live.append((next_id, cur))
                next_id += 1
                break

    changed = True
    while changed:
        changed = False
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                if should_merge(live[i][1], live[j][1], epsilon):
                    union = live[i][1] | live[j][1]
                    del live[j], live[i]
                    live.append((next_id, union))
                    next_id += 1
                    changed = True
                    break
            if changed:
                break
    return [s for _, s in live]


def snapshot_order(communities: Iterable[Collection[int]]) -> list[list[int]]:
    rows = [sorted(c) for c in communities if c]
    rows.sort(key=lambda r: (-len(r), r))
    return rows


def format_snapshot(communities: Iterable[Collection[int]]) -> str:
    return "".join(" ".join(map(str, r)) + "\n" for r in snapshot_order(communities))


def write_snapshot(communities: Iterable[Collection[int]], path: str | Path) -> None:
    Path(path).write_text(format_snapshot(communities), encoding="utf-8")


def parse_snapshot(text: str) -> list[frozenset[int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            members = [int(tok) for tok in line.split()]
        except ValueError:
            raise SnapshotError(f"non-integer member in {line!r}", line=lineno) from None
        if len(set(members)) != len(members):
            raise SnapshotError("duplicate member", line=lineno)
        out.append(frozenset(members))
    return out


def read_snapshot(path: str | Path) -> list[frozenset[int]]:
    return parse_snapshot(Path(path).read_text(encoding="utf-8"))
