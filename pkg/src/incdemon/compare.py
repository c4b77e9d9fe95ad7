"""Best-match F1 between two community snapshots."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Sequence

from .merge import read_snapshot, snapshot_order


@dataclass
class SimilarityReport:
    best_match_f1: float
    per_community_matches: list[tuple[int, int | None, float]] = field(default_factory=list)
    unmatched_a: int = 0
    unmatched_b: int = 0
    # True when the matches run from b's communities into a's
    swapped: bool = False

    def to_text(self) -> str:
        lines = [
            f"best_match_f1 {self.best_match_f1:.6f}",
            f"unmatched_a {self.unmatched_a}",
            f"unmatched_b {self.unmatched_b}",
        ]
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["id_a", "id_b", "f1"])
            for ia, ib, f in self.per_community_matches:
                if self.swapped:
                    ia, ib = ib, ia
                w.writerow(["" if ia is None else ia, "" if ib is None else ib, f"{f:.6f}"])


def f1(a: Collection[int], b: Collection[int]) -> float:
    if not a and not b:
        return 1.0
    inter = len(set(a) & set(b))
    return 2.0 * inter / (len(a) + len(b))


def similarity(
    a: Sequence[Collection[int]], b: Sequence[Collection[int]]
) -> SimilarityReport:
    """For every community on the larger side, its best F1 on the other side.

    Both sides are put in snapshot order first (size desc, smallest member)
    and ids are positions in that order. Ties pick the lowest id.
    """
    rows_a = [frozenset(r) for r in snapshot_order(a)]
    rows_b = [frozenset(r) for r in snapshot_order(b)]
    if not rows_a and not rows_b:
        return SimilarityReport(1.0)
    swapped = len(rows_b) > len(rows_a)
    big, small = (rows_b, rows_a) if swapped else (rows_a, rows_b)

    index: dict[int, list[int]] = {}
    for j, c in enumerate(small):
        for v in c:
            index.setdefault(v, []).append(j)

    matches = []
    used: set[int] = set()
    for i, c in enumerate(big):
        shared: dict[int, int] = {}
        for v in c:
            for j in index.get(v, ()):
                shared[j] = shared.get(j, 0) + 1
        best_j, best = None, 0.0
        for j in sorted(shared):
            score = 2.0 * shared[j] / (len(c) + len(small[j]))
            if score > best:
                best_j, best = j, score
        if best_j is not None:
            used.add(best_j)
        matches.append((i, best_j, best))

    mean = sum(m[2] for m in matches) / len(matches)
    unmatched_big = sum(1 for m in matches if m[1] is None)
    unmatched_small = len(small) - len(used)
    if swapped:
        return SimilarityReport(mean, matches, unmatched_small, unmatched_big, True)
    return SimilarityReport(mean, matches, unmatched_big, unmatched_small, False)


def compare_snapshots(path_a: str | Path, path_b: str | Path) -> SimilarityReport:
    return similarity(read_snapshot(path_a), read_snapshot(path_b))
