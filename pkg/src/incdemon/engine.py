"""Batch and incremental DEMON pipelines over one shared analysis state.

Batch: for every vertex, extract its ego-minus-ego network, propagate
labels, put the ego back into each label group and submit the groups to
the community pool.

Incremental: for each added edge, patch the ego cache, update labels only
for the egos whose network changed, and swap their stale groups in the
pool for the new ones. Which groups came from which ego is tracked in a
provenance ledger so a stale group can be withdrawn again.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .ego import EgoCache, cache_mismatches
from .errors import CoherenceError
from .graph import EdgeEvent, Graph
from .labelprop import (
    DEFAULT_MAX_ITER,
    LabelState,
    incremental_label_update,
    labels_to_communities,
    propagate_labels,
)
from .merge import CommunityPool, check_epsilon

logger = logging.getLogger(__name__)


@dataclass
class Config:
    epsilon: float = 0.25
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    tie_break: str = "det"
    # a group, with its ego re-added, must reach this size to be submitted
    min_community_size: int = 3
    shuffle_merge: bool = False
    full_fallback: bool = False

    def __post_init__(self):
        check_epsilon(self.epsilon)
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tie_break not in ("det", "random"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


@dataclass
class StepReport:
    event: EdgeEvent
    egos_touched: int = 0
    communities_resubmitted: int = 0
    merges: int = 0
    elapsed_ns: int = 0
    new_edge: bool = True


@dataclass
class SyncResult:
    retired: list[int] = field(default_factory=list)
    resubmitted: int = 0
    merges: int = 0


@dataclass
class AnalysisState:
    graph: Graph
    ego_cache: EgoCache
    pool: CommunityPool
    config: Config
    label_states: dict[int, LabelState] = field(default_factory=dict)
    # provenance ledger: ego -> {submitted member set -> contribution id}
    contributions: dict[int, dict[frozenset[int], int]] = field(default_factory=dict)
    contribution_members: dict[int, frozenset[int]] = field(default_factory=dict)
    next_contribution: int = 0
    counters: dict[str, int] = field(default_factory=dict)

    def bump(self, key: str, by: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + by

    def snapshot(self) -> str:
        return self.pool.snapshot()

    def communities(self) -> list[frozenset[int]]:
        return self.pool.member_sets()


def _new_pool(config: Config) -> CommunityPool:
    return CommunityPool(config.epsilon, config.seed if config.shuffle_merge else None)


def local_groups(state: AnalysisState, ego: int) -> list[frozenset[int]]:
    """The ego's label groups with the ego added back, filtered by size."""
    lstate = state.label_states.get(ego)
    if lstate is None:
        return []
    floor = state.config.min_community_size
    out = []
    for grp in labels_to_communities(lstate):
        members = grp | {ego}
        if len(members) >= floor:
            out.append(members)
    return out


def run_batch(g: Graph, config: Config | None = None) -> AnalysisState:
    """Full DEMON pass over ``g``; the returned state owns ``g``."""
    config = config or Config()
    t0 = time.perf_counter_ns()
    state = AnalysisState(g, EgoCache.build(g), _new_pool(config), config)
    for v in sorted(state.ego_cache.entries):
        state.label_states[v] = propagate_labels(
            state.ego_cache[v], config.max_iter, config.seed, config.tie_break
        )
        ledger = state.contributions.setdefault(v, {})
        for members in local_groups(state, v):
            k = _register(state, v, members)
            ledger[members] = k
            rep = state.pool.submit(members, (k,))
            state.bump("submissions")
            state.bump("merges", len(rep.absorbed))
        if not ledger:
            del state.contributions[v]
    state.bump("batch_ns", time.perf_counter_ns() - t0)
    return state


def _register(state: AnalysisState, ego: int, members: frozenset[int]) -> int:
    k = state.next_contribution
    state.next_contribution += 1
    state.contribution_members[k] = members
    return k


def sync_contributions(state: AnalysisState, egos) -> SyncResult:
    """Make the pool reflect the current label groups of ``egos``.

    Groups that disappeared are withdrawn (their pool communities shrink
    and are re-submitted); new groups are submitted. Unchanged groups are
    left alone.
    """
    result = SyncResult()
    removals: dict[int, frozenset[int]] = {}
    fresh: list[tuple[int, frozenset[int]]] = []
    for ego in sorted(egos):
        ledger = state.contributions.setdefault(ego, {})
        wanted = local_groups(state, ego)
        wanted_set = set(wanted)
        for members in [m for m in ledger if m not in wanted_set]:
            k = ledger.pop(members)
            removals[k] = state.contribution_members.pop(k)
        for members in wanted:
            if members not in ledger:
                ledger[members] = _register(state, ego, members)
                fresh.append((ledger[members], members))
        if not ledger:
            del state.contributions[ego]

    pool = state.pool
    if removals:
        result.retired = sorted({pool.owner[k] for k in removals if k in pool.owner})
        for comm in pool.withdraw(removals):
            rep = pool.submit(comm.support, comm.contributions)
            result.resubmitted += 1
            result.merges += len(rep.absorbed)
    for k, members in fresh:
        rep = pool.submit(members, (k,))
        result.resubmitted += 1
        result.merges += len(rep.absorbed)
    return result


def provenance_retire(state: AnalysisState, ego: int) -> list[int]:
    """Withdraw the ego's stale groups from the pool; return retired pool ids."""
    if ego not in state.ego_cache:
        return []
    return sync_contributions(state, [ego]).retired


def apply_event(state: AnalysisState, e: EdgeEvent | tuple[int, int]) -> StepReport:
    """Process one edge addition incrementally."""
    if not isinstance(e, EdgeEvent):
        e = EdgeEvent(*e)
    t0 = time.perf_counter_ns()
    u, v = e.source, e.target
    g, cfg = state.graph, state.config
    report = StepReport(e)
    state.bump("events")

    if cfg.full_fallback:
        report.new_edge = g.add_edge(u, v)
        fresh = run_batch(g, cfg)
        report.egos_touched = len(fresh.ego_cache)
        report.communities_resubmitted = fresh.counters.get("submissions", 0)
        report.merges = fresh.counters.get("merges", 0)
        counters = state.counters
        state.__dict__.update(fresh.__dict__)
        state.counters = counters
        report.elapsed_ns = time.perf_counter_ns() - t0
        return report

    if not g.add_edge(u, v):
        report.new_edge = False
        report.elapsed_ns = time.perf_counter_ns() - t0
        return report

    deltas = state.ego_cache.apply_edge(g, u, v)
    for ego in sorted(deltas):
        d = deltas[ego]
        sub = state.ego_cache[ego]
        old = state.label_states.get(ego) or LabelState({}, 0, cfg.max_iter, cfg.seed)
        if set(old.labels) == sub.adjacency.keys() - d.added:
            new = incremental_label_update(sub, old, d.added, d.edges, cfg.tie_break)
        else:
            state.bump("lp_fallbacks")
            new = propagate_labels(sub, cfg.max_iter, cfg.seed, cfg.tie_break)
        state.label_states[ego] = new
    report.egos_touched = len(deltas)

    res = sync_contributions(state, deltas.keys())
    report.communities_resubmitted = res.resubmitted
    report.merges = res.merges
    state.bump("submissions", res.resubmitted)
    state.bump("merges", res.merges)
    report.elapsed_ns = time.perf_counter_ns() - t0
    return report


def rebuild_pool(state: AnalysisState) -> CommunityPool:
    """Pool built from scratch out of every ego's current groups, in ego order."""
    pool = _new_pool(state.config)
    for ego in sorted(state.label_states):
        for members in local_groups(state, ego):
            pool.submit(members)
    return pool


def check_coherence(state: AnalysisState, *, ego_cache: bool = True) -> None:
    """Raise CoherenceError unless every derived structure matches its source."""
    if ego_cache:
        bad = cache_mismatches(state.ego_cache, state.graph)
        if bad:
            raise CoherenceError(f"ego cache stale for egos {bad[:10]}")
    if state.label_states.keys() != state.ego_cache.entries.keys():
        raise CoherenceError("label states not keyed by cached egos")
    for ego, ls in state.label_states.items():
        if ls.labels.keys() != state.ego_cache[ego].adjacency.keys():
            raise CoherenceError(f"labels of ego {ego} do not cover its network")
    state.pool.check()

    owned = set(state.pool.owner)
    ledger_ids = set()
    for ego in state.label_states:
        ledger = state.contributions.get(ego, {})
        if set(ledger) != set(local_groups(state, ego)):
            raise CoherenceError(f"ledger of ego {ego} out of date")
        for members, k in ledger.items():
            ledger_ids.add(k)
            cid = state.pool.owner.get(k)
            if cid is None:
                raise CoherenceError(f"contribution {k} missing from pool")
            comm = state.pool.communities[cid]
            if any(v not in comm.support for v in members):
                raise CoherenceError(f"contribution {k} not contained in community {cid}")
    if ledger_ids != owned or ledger_ids != state.contribution_members.keys():
        raise CoherenceError("provenance ledger and pool ownership disagree")
