"""Label propagation over ego-minus-ego networks.

Every vertex starts labelled with its own id. Sweeps visit vertices in a
seeded shuffled order and set each label to the most frequent label among
the vertex's neighbours; the vertex's own label is not counted. Ties go to
the smallest label unless ``tie_break="random"``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ego import EgoMinusEgo
from .errors import CoherenceError

DEFAULT_MAX_ITER = 100
TIE_BREAK_MODES = ("det", "random")


@dataclass
class LabelState:
    labels: dict[int, int]
    t: int = 0
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    converged: bool = True

    def dump(self) -> str:
        return " ".join(f"{v}:{self.labels[v]}" for v in sorted(self.labels))


@dataclass
class LocalCommunities:
    groups: list[frozenset[int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)


def ego_rng(seed: int, ego: int, *salt: object) -> random.Random:
    # str seeds hash through sha512, so the stream is stable across
    # platforms and independent of PYTHONHASHSEED
    key = ":".join(str(x) for x in (seed, ego, *salt))
    return random.Random(key)


def _majority(
    nbrs: Iterable[int],
    labels: Mapping[int, int],
    tie_break: str,
    rng: random.Random | None,
) -> int | None:
    counts: dict[int, int] = {}
    for w in nbrs:
        lab = labels.get(w)
        if lab is not None:
            counts[lab] = counts.get(lab, 0) + 1
    if not counts:
        return None
    if len(counts) == 1:
        for lab in counts:
            return lab
    top = max(counts.values())
    best = [lab for lab, c in counts.items() if c == top]
    if len(best) == 1:
        return best[0]
    if tie_break == "random" and rng is not None:
        best.sort()
        return rng.choice(best)
    return min(best)


def _check_mode(tie_break: str) -> None:
    if tie_break not in TIE_BREAK_MODES:
        raise ValueError(f"unknown tie_break {tie_break!r}")


def propagate_labels(
    sub: EgoMinusEgo,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    tie_break: str = "det",
) -> LabelState:
    """Run label propagation on ``sub`` until a sweep changes nothing.

    The sweep order is drawn from an RNG keyed on (seed, ego), so results
    for one ego do not depend on which egos were processed before it.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    _check_mode(tie_break)
    adj = sub.adjacency
    labels = {v: v for v in adj}
    rng = ego_rng(seed, sub.ego)
    order = sorted(adj)
    t = 0
    converged = False
    while t < max_iter:
        t += 1
        rng.shuffle(order)
        changed = False
        for v in order:
            new = _majority(adj[v], labels, tie_break, rng)
            if new is not None and new != labels[v]:
                labels[v] = new
                changed = True
        if not changed:
            converged = True
            break
    return LabelState(labels, t, max_iter, seed, converged)


def labels_to_communities(state: LabelState | Mapping[int, int]) -> LocalCommunities:
    """Group vertices by label, ordered by smallest member."""
    labels = state.labels if isinstance(state, LabelState) else state
    by_label: dict[int, set[int]] = {}
    for v, lab in labels.items():
        by_label.setdefault(lab, set()).add(v)
    groups = sorted((frozenset(g) for g in by_label.values()), key=min)
    return LocalCommunities(groups)


def incremental_label_update(
    sub: EgoMinusEgo,
    state: LabelState,
    added: Iterable[int] = (),
    changed_edges: Iterable[tuple[int, int]] = (),
    tie_break: str = "det",
) -> LabelState:
    """Update ``state`` for vertices/edges that were just added to ``sub``.

    New vertices take the majority label of their neighbours (their own id
    if none are labelled yet). Then only the vertices at distance <= 1 from
    the change are re-swept, in ascending order, until stable or until
    ``state.max_iter`` sweeps. Nothing else is touched.
    """
    _check_mode(tie_break)
    adj = sub.adjacency
    added = set(added)
    expected = set(adj) - added
    if set(state.labels) != expected:
        raise CoherenceError(
            f"ego {sub.ego}: label state covers {len(state.labels)} vertices, "
            f"subgraph minus additions has {len(expected)}"
        )
    labels = dict(state.labels)
    rng = ego_rng(state.seed, sub.ego, "inc", len(adj)) if tie_break == "random" else None

    for v in sorted(added):
        lab = _majority(adj[v], labels, tie_break, rng)
        labels[v] = v if lab is None else lab

    seeds = set(added)
    for a, b in changed_edges:
        seeds.add(a)
        seeds.add(b)
    frontier = set(seeds)
    for s in seeds:
        frontier |= adj.get(s, set())
    order = sorted(frontier & adj.keys())

    t = 0
    converged = False
    while t < state.max_iter:
        t += 1
        changed = False
        for v in order:
            new = _majority(adj[v], labels, tie_break, rng)
            if new is not None and new != labels[v]:
                labels[v] = new
                changed = True
        if not changed:
            converged = True
            break
    return LabelState(labels, t, state.max_iter, state.seed, converged)
