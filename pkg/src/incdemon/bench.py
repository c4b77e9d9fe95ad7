"""Stream replay harness: batch-replay vs incremental timing runs."""
from __future__ import annotations

import csv
import logging
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .compare import SimilarityReport, similarity
from .engine import AnalysisState, Config, StepReport, apply_event, check_coherence, run_batch
from .graph import EdgeEvent, Graph, load_edge_events, load_edge_list
from .merge import format_snapshot

logger = logging.getLogger(__name__)

MODES = ("batch-replay", "incremental")
STEP_FIELDS = [
    "event_index", "src", "dst", "egos_touched",
    "communities_resubmitted", "merges", "elapsed_ns",
]


@dataclass
class RunConfig:
    base_path: Path
    stream_path: Path | None = None
    mode: str = "incremental"
    epsilon: float = 0.25
    seed: int = 0
    max_iter: int = 100
    snapshot_every: int = 10
    output_dir: Path = Path("out")
    tie_break: str = "det"
    lenient: bool = False
    min_community_size: int = 3
    full_fallback: bool = False
    check_every: int = 0
    verify: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        self.engine_config()  # validates epsilon, max_iter, tie_break

    def engine_config(self) -> Config:
        return Config(
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            seed=self.seed,
            tie_break=self.tie_break,
            min_community_size=self.min_community_size,
            full_fallback=self.full_fallback,
        )


@dataclass
class RunResult:
    mode: str
    first_step_s: float
    steps: list[StepReport] = field(default_factory=list)
    snapshots: dict[int, str] = field(default_factory=dict)
    final: AnalysisState | None = None

    @property
    def stream_total_s(self) -> float:
        return sum(s.elapsed_ns for s in self.steps) / 1e9


def replay_batch(
    base: Sequence[tuple[int, int]],
    stream: Sequence[EdgeEvent | tuple[int, int]],
    config: Config,
    snapshot_every: int = 0,
) -> RunResult:
    """Recompute everything from scratch on base + each stream prefix."""
    t0 = time.perf_counter_ns()
    state = run_batch(Graph(base), config)
    res = RunResult("batch-replay", (time.perf_counter_ns() - t0) / 1e9)
    res.snapshots[0] = state.snapshot()
    edges = list(base)
    for i, e in enumerate(stream, start=1):
        e = e if isinstance(e, EdgeEvent) else EdgeEvent(*e)
        edges.append((e.source, e.target))
        t0 = time.perf_counter_ns()
        state = run_batch(Graph(edges), config)
        elapsed = time.perf_counter_ns() - t0
        res.steps.append(StepReport(
            e,
            egos_touched=len(state.ego_cache),
            communities_resubmitted=state.counters.get("submissions", 0),
            merges=state.counters.get("merges", 0),
            elapsed_ns=elapsed,
        ))
        if snapshot_every and (i % snapshot_every == 0 or i == len(stream)):
            res.snapshots[i] = state.snapshot()
    res.final = state
    return res


def replay_incremental(
    base: Sequence[tuple[int, int]],
    stream: Sequence[EdgeEvent | tuple[int, int]],
    config: Config,
    snapshot_every: int = 0,
    check_every: int = 0,
) -> RunResult:
    """One batch pass over the base graph, then one incremental step per edge."""
    t0 = time.perf_counter_ns()
    state = run_batch(Graph(base), config)
    res = RunResult("incremental", (time.perf_counter_ns() - t0) / 1e9)
    res.snapshots[0] = state.snapshot()
    for i, e in enumerate(stream, start=1):
        res.steps.append(apply_event(state, e))
        if check_every and i % check_every == 0:
            check_coherence(state)
        if snapshot_every and (i % snapshot_every == 0 or i == len(stream)):
            res.snapshots[i] = state.snapshot()
    res.final = state
    return res


def measure_speedup(
    base: Sequence[tuple[int, int]],
    stream: Sequence[tuple[int, int]],
    config: Config,
    repeats: int = 3,
) -> tuple[float, list[float]]:
    """Median over ``repeats`` of batch-replay stream time / incremental stream time."""
    ratios = []
    for r in range(repeats):
        inc = replay_incremental(base, stream, config)
        bat = replay_batch(base, stream, config)
        ratio = bat.stream_total_s / inc.stream_total_s if inc.stream_total_s else float("inf")
        logger.info(
            "repeat %d: batch %.3fs incremental %.4fs ratio %.1f",
            r, bat.stream_total_s, inc.stream_total_s, ratio,
        )
        ratios.append(ratio)
    return statistics.median(ratios), ratios


def write_steps_csv(steps: Sequence[StepReport], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(STEP_FIELDS)
        for i, s in enumerate(steps, start=1):
            w.writerow([
                i, s.event.source, s.event.target, s.egos_touched,
                s.communities_resubmitted, s.merges, s.elapsed_ns,
            ])


def _fmt(x: float | None) -> str:
    return "N/A" if x is None else f"{x:.6f}"


def cli_run(cfg: RunConfig) -> RunResult:
    """Run one mode end to end and write its artifacts under ``output_dir``.

    Writes snapshots/step_NNNNNN.txt, steps.csv and summary.txt; the
    incremental mode with ``verify`` also writes similarity.txt/.csv
    against a batch run on the final graph.
    """
    base = list(load_edge_list(cfg.base_path, lenient=cfg.lenient).edges())
    stream = (
        load_edge_events(cfg.stream_path, lenient=cfg.lenient) if cfg.stream_path else []
    )
    config = cfg.engine_config()
    if cfg.mode == "batch-replay":
        res = replay_batch(base, stream, config, cfg.snapshot_every)
    else:
        res = replay_incremental(base, stream, config, cfg.snapshot_every, cfg.check_every)

    out = Path(cfg.output_dir)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    for i, text in sorted(res.snapshots.items()):
        (snap_dir / f"step_{i:06d}.txt").write_text(text, encoding="utf-8")
    write_steps_csv(res.steps, out / "steps.csv")

    n = len(stream)
    speedup = None
    if n and cfg.mode == "incremental" and res.stream_total_s > 0:
        # each batch-replay step costs about one full pass, i.e. the first step
        speedup = res.first_step_s * n / res.stream_total_s
    summary = {
        "mode": cfg.mode,
        "events": str(n),
        "first_step_s": _fmt(res.first_step_s),
        "stream_total_s": _fmt(res.stream_total_s),
        "speedup": _fmt(speedup),
        "final_community_count": str(len(res.final.pool)),
    }

    if cfg.verify and cfg.mode == "incremental" and n:
        oracle = run_batch(res.final.graph.copy(), config)
        rep = similarity(res.final.communities(), oracle.communities())
        (out / "batch_final.txt").write_text(format_snapshot(oracle.communities()), encoding="utf-8")
        (out / "similarity.txt").write_text(rep.to_text(), encoding="utf-8")
        rep.write_csv(out / "similarity.csv")
        summary["best_match_f1_vs_batch"] = f"{rep.best_match_f1:.6f}"

    (out / "summary.txt").write_text(
        "".join(f"{k} {v}\n" for k, v in summary.items()), encoding="utf-8"
    )
    return res


def read_summary(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(" ")
        out[key] = value
    return out


def write_similarity(rep: SimilarityReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "similarity.txt").write_text(rep.to_text(), encoding="utf-8")
    rep.write_csv(out_dir / "similarity.csv")
