"""Command-line entry point.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal coherence failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import MODES, RunConfig, cli_run, measure_speedup, write_similarity
from .compare import compare_snapshots
from .engine import Config
from .errors import CoherenceError
from .graph import IngestionError, load_edge_events, load_edge_list
from .merge import SnapshotError
from .synth import KINDS, gen_synthetic, write_synthetic

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COHERENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ratio(text: str) -> float:
    x = float(text)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError("must be in [0, 1]")
    return x


def _positive(text: str) -> int:
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=_ratio, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=_positive, default=100)
    p.add_argument("--tie-break", choices=["det", "random"], default="det")
    p.add_argument("--min-size", type=_positive, default=3,
                   help="smallest community (ego included) submitted to the pool")
    p.add_argument("--lenient", action="store_true",
                   help="skip malformed edge-list lines instead of failing")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="incdemon", description="Batch and incremental DEMON community detection")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one mode over a base graph and an edge stream")
    run.add_argument("--base", type=Path, required=True)
    run.add_argument("--stream", type=Path)
    run.add_argument("--mode", choices=MODES, default="incremental")
    run.add_argument("--snapshot-every", type=_positive, default=10)
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--full-fallback", action="store_true",
                     help="recompute everything on every event (debugging)")
    run.add_argument("--check-every", type=int, default=0,
                     help="verify internal coherence every N events")
    run.add_argument("--no-verify", action="store_true",
                     help="skip the final comparison against a batch run")
    _add_engine_flags(run)

    cmp_ = sub.add_parser("compare", help="best-match F1 between two snapshot files")
    cmp_.add_argument("a", type=Path)
    cmp_.add_argument("b", type=Path)
    cmp_.add_argument("--out", type=Path, help="write similarity.txt/.csv here")

    gen = sub.add_parser("gen", help="write a synthetic base graph and edge stream")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m-or-k", type=int, required=True,
                     help="edges per vertex (PA), clique count (planted), total edges (gnm)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--stream-size", type=int, default=100)
    gen.add_argument("--inter-edges", type=int, default=1)
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--prefix", default="synthetic")

    bench = sub.add_parser("bench", help="measure batch-replay / incremental speedup")
    bench.add_argument("--base", type=Path, required=True)
    bench.add_argument("--stream", type=Path, required=True)
    bench.add_argument("--repeats", type=_positive, default=3)
    _add_engine_flags(bench)
    return parser


def _require_files(*paths: Path | None) -> None:
    for p in paths:
        if p is not None and not p.is_file():
            raise UsageError(f"no such file: {p}")


def _cmd_run(args) -> int:
    _require_files(args.base, args.stream)
    cfg = RunConfig(
        base_path=args.base,
        stream_path=args.stream,
        mode=args.mode,
        epsilon=args.epsilon,
        seed=args.seed,
        max_iter=args.max_iter,
        snapshot_every=args.snapshot_every,
        output_dir=args.out,
        tie_break=args.tie_break,
        lenient=args.lenient,
        min_community_size=args.min_size,
        full_fallback=args.full_fallback,
        check_every=args.check_every,
        verify=not args.no_verify,
    )
    cli_run(cfg)
    print((args.out / "summary.txt").read_text(), end="")
    return EXIT_OK


def _cmd_compare(args) -> int:
    _require_files(args.a, args.b)
    rep = compare_snapshots(args.a, args.b)
    if args.out:
        write_similarity(rep, args.out)
    print(rep.to_text(), end="")
    return EXIT_OK


def _cmd_gen(args) -> int:
    try:
        sg = gen_synthetic(args.kind, args.n, args.m_or_k, args.seed, args.stream_size,
                           inter_edges=args.inter_edges)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for name, path in write_synthetic(sg, args.out, args.prefix).items():
        print(f"{name} {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    _require_files(args.base, args.stream)
    base = list(load_edge_list(args.base, lenient=args.lenient).edges())
    stream = [(e.source, e.target) for e in load_edge_events(args.stream, lenient=args.lenient)]
    config = Config(epsilon=args.epsilon, max_iter=args.max_iter, seed=args.seed,
                    tie_break=args.tie_break, min_community_size=args.min_size)
    median, ratios = measure_speedup(base, stream, config, args.repeats)
    print(f"speedup_median {median:.2f}")
    print("speedups " + " ".join(f"{r:.2f}" for r in ratios))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "compare": _cmd_compare, "gen": _cmd_gen, "bench": _cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"incdemon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, SnapshotError) as exc:
        print(f"incdemon: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CoherenceError as exc:
        print(f"incdemon: internal coherence failure: {exc}", file=sys.stderr)
        return EXIT_COHERENCE


if __name__ == "__main__":
    sys.exit(main())
