"""Command-line front end.

Subcommands: mine, rank, score, eval, sweep, gen. Exit codes: 0 success,
1 usage, 2 I/O or parse failure, 3 mining guard tripped, 4 schema
fingerprint mismatch. Diagnostics go to stderr; data files and stdout
carry only the declared formats, so cron jobs can branch on the code and
pipe the output.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from .errors import AlertFpError, PatternExplosionError, SchemaMismatchError
from .evaluate import (
    SyntheticSpec,
    gen_synthetic,
    locate_attacks,
    reduction,
    resolve_attack_selectors,
    sweep,
    write_attack_ids,
    write_sweep_report,
)
from .ingest import (
    LogFormat,
    load_schema,
    parse_log,
    write_log,
    write_rejects,
    write_schema,
)
from .miner import MiningConfig, mine
from .scorer import (
    ScoreConfig,
    ScoredAlert,
    rank,
    read_ranked,
    top_candidates,
    write_ranked,
)
from .store import ClassifierModel, load_model, save_model, score_new

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_GUARD = 3
EXIT_SCHEMA = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_minisupport(text: str):
    text = text.strip()
    if text.endswith("%"):
        return Fraction(text[:-1]) / 100
    return int(text)


def _parse_max_patterns(text: str):
    if text.strip().lower() in ("off", "none", "0"):
        return None
    return int(text)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ALERTFP_WORKERS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alertfp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_io(p, with_input=True):
        if with_input:
            p.add_argument("--input", required=True, help="alert log file")
            p.add_argument("--schema", required=True, help="schema config file")
            p.add_argument("--delimiter", default="\t", help="field delimiter (default tab)")
            p.add_argument("--rejects-out", help="write rejected lines report here")

    def add_mining(p):
        p.add_argument(
            "--minisupport",
            type=_parse_minisupport,
            default=2,
            help="absolute count N or percentage P%% (default 2)",
        )
        p.add_argument(
            "--max-patterns",
            type=_parse_max_patterns,
            default=5_000_000,
            help="pattern explosion guard; 'off' disables (default 5000000)",
        )
        p.add_argument("--max-pattern-len", type=int, default=None)

    def add_scoring(p):
        p.add_argument("--score", choices=("simple", "fpof"), default="simple")
        p.add_argument("--top-p", type=float, default=None, help="write top P%% candidate tids")
        p.add_argument("--candidates-out", help="candidate-set output path")

    def add_workers(p):
        p.add_argument("--workers", type=int, default=_default_workers())

    p_mine = sub.add_parser("mine", help="mine a log into a classifier model")
    add_common_io(p_mine)
    add_mining(p_mine)
    add_workers(p_mine)
    p_mine.add_argument("--out", required=True, help="model output path")
    p_mine.add_argument("--emit-tidlists", action="store_true", help="store tidlists for audit")

    p_rank = sub.add_parser("rank", help="mine and rank a log in one pass")
    add_common_io(p_rank)
    add_mining(p_rank)
    add_scoring(p_rank)
    add_workers(p_rank)
    p_rank.add_argument("--out", required=True, help="ranked output path")

    p_score = sub.add_parser("score", help="rank new alerts against a stored model")
    add_common_io(p_score)
    add_scoring(p_score)
    add_workers(p_score)
    p_score.add_argument("--model", required=True)
    p_score.add_argument("--out", required=True)
    p_score.add_argument(
        "--force-schema", action="store_true", help="score despite a fingerprint mismatch"
    )

    p_eval = sub.add_parser("eval", help="attack placement and reduction of a ranked file")
    p_eval.add_argument("--ranked", required=True)
    p_eval.add_argument("--attacks", required=True, help="attack-id file (tid or field=value per line)")
    p_eval.add_argument("--input", help="original log, needed for field=value selectors")
    p_eval.add_argument("--schema", help="schema config, needed for field=value selectors")
    p_eval.add_argument("--delimiter", default="\t")

    p_sweep = sub.add_parser("sweep", help="mine/rank/evaluate across minisupport values")
    add_common_io(p_sweep)
    add_workers(p_sweep)
    p_sweep.add_argument(
        "--minisupport",
        required=True,
        help="comma-separated list, each N or P%%",
    )
    p_sweep.add_argument("--attacks", required=True)
    p_sweep.add_argument("--out", required=True, help="sweep report path")
    p_sweep.add_argument("--max-patterns", type=_parse_max_patterns, default=5_000_000)

    p_gen = sub.add_parser("gen", help="generate a seeded synthetic log with planted attacks")
    p_gen.add_argument("--records", type=int, required=True)
    p_gen.add_argument("--attacks", type=int, default=5, dest="n_attack")
    p_gen.add_argument("--profiles", type=int, default=7)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True, help="log output path")
    p_gen.add_argument("--attacks-out", required=True, help="attack-id output path")
    p_gen.add_argument("--schema-out", help="also write the generator's schema config")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return _dispatch(args)
    except PatternExplosionError as exc:
        print(f"alertfp: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except SchemaMismatchError as exc:
        print(f"alertfp: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (AlertFpError, OSError) as exc:
        print(f"alertfp: {exc}", file=sys.stderr)
        return EXIT_DATA


def _dispatch(args) -> int:
    handlers = {
        "mine": _cmd_mine,
        "rank": _cmd_rank,
        "score": _cmd_score,
        "eval": _cmd_eval,
        "sweep": _cmd_sweep,
        "gen": _cmd_gen,
    }
    return handlers[args.command](args)


def _load_inputs(args):
    schema = load_schema(args.schema)
    fmt = LogFormat(delimiter=args.delimiter)
    result = parse_log(args.input, schema, fmt)
    if result.rejects:
        print(f"alertfp: rejected {len(result.rejects)} line(s)", file=sys.stderr)
        if args.rejects_out:
            write_rejects(args.rejects_out, result.rejects)
    return schema, result.dataset


def _mining_config(args) -> MiningConfig:
    return MiningConfig(
        minisupport=args.minisupport,
        max_pattern_len=getattr(args, "max_pattern_len", None),
        emit_tidlists=getattr(args, "emit_tidlists", False),
        max_patterns=args.max_patterns,
    )


def _cmd_mine(args) -> int:
    schema, dataset = _load_inputs(args)
    config = _mining_config(args)
    started = time.perf_counter()
    fps = mine(dataset, config, workers=args.workers)
    elapsed = time.perf_counter() - started
    model = ClassifierModel.from_pattern_set(
        fps, schema, include_tidlists=config.emit_tidlists
    )
    save_model(model, args.out)
    print(
        f"alertfp: mined {fps.count} patterns from {dataset.n} alerts "
        f"in {elapsed:.2f}s (minisupport {fps.minisupport_abs})",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_rank(args) -> int:
    _, dataset = _load_inputs(args)
    config = _mining_config(args)
    score_config = ScoreConfig(metric=args.score)
    started = time.perf_counter()
    fps = mine(dataset, config, workers=args.workers)
    ranked = rank(dataset, fps, score_config, workers=args.workers)
    elapsed = time.perf_counter() - started
    write_ranked(args.out, ranked, dataset, args.score, args.delimiter)
    _write_candidates(args, ranked)
    print(
        f"alertfp: ranked {dataset.n} alerts against {fps.count} patterns "
        f"in {elapsed:.2f}s",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_score(args) -> int:
    _, dataset = _load_inputs(args)
    model = load_model(args.model)
    score_config = ScoreConfig(metric=args.score)
    ranked = score_new(
        dataset, model, score_config, force_schema=args.force_schema, workers=args.workers
    )
    write_ranked(args.out, ranked, dataset, args.score, args.delimiter)
    _write_candidates(args, ranked)
    print(
        f"alertfp: scored {dataset.n} alerts against {model.pattern_count} "
        f"stored patterns (trained on {model.n_train})",
        file=sys.stderr,
    )
    return EXIT_OK


def _write_candidates(args, ranked) -> None:
    if args.top_p is None:
        return
    tids = top_candidates(ranked, args.top_p)
    path = args.candidates_out or f"{args.out}.candidates"
    write_attack_ids(path, tids)
    print(f"alertfp: wrote {len(tids)} candidate tid(s) to {path}", file=sys.stderr)


def _read_attack_file(args, dataset=None) -> set[int]:
    with open(args.attacks, "r", encoding="utf-8") as stream:
        lines = stream.readlines()
    return resolve_attack_selectors(lines, dataset)


def _cmd_eval(args) -> int:
    ranked_file = read_ranked(args.ranked)
    dataset = None
    if args.input and args.schema:
        schema = load_schema(args.schema)
        dataset = parse_log(args.input, schema, LogFormat(delimiter=args.delimiter)).dataset
    attack_tids = _read_attack_file(args, dataset)
    rows = [
        ScoredAlert(r.tid, r.simple_fpof, r.fpof, r.rank) for r in ranked_file.rows
    ]
    ranks = locate_attacks(rows, attack_tids)
    worst = max(ranks)
    print(f"n={ranked_file.n} attacks={len(ranks)}")
    print("attack_ranks=" + ",".join(str(r) for r in ranks))
    print(f"last_attack_rank={worst}")
    print(f"reduction={reduction(ranked_file.n, worst):.3f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    _, dataset = _load_inputs(args)
    attack_tids = _read_attack_file(args, dataset)
    values = [_parse_minisupport(v) for v in args.minisupport.split(",") if v.strip()]
    rows = sweep(
        dataset,
        values,
        attack_tids,
        MiningConfig(max_patterns=args.max_patterns),
        workers=args.workers,
    )
    write_sweep_report(args.out, rows)
    failures = sum(1 for r in rows if r.error)
    print(
        f"alertfp: swept {len(rows)} threshold(s), {failures} failed", file=sys.stderr
    )
    return EXIT_OK


def _cmd_gen(args) -> int:
    spec = SyntheticSpec(
        n_records=args.records,
        n_attack=args.n_attack,
        routine_profiles=args.profiles,
        seed=args.seed,
    )
    dataset, attack_tids = gen_synthetic(spec)
    with open(args.out, "w", encoding="utf-8", newline="") as out:
        out.write(
            f"# alertfp-gen v1 records={spec.n_records} attacks={spec.n_attack} "
            f"profiles={spec.routine_profiles} seed={spec.seed}\n"
        )
        write_log(out, dataset)
    write_attack_ids(args.attacks_out, attack_tids)
    if args.schema_out:
        write_schema(args.schema_out, dataset.schema)
    print(
        f"alertfp: wrote {dataset.n} records ({len(attack_tids)} attacks) to {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
