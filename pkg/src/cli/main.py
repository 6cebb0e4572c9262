"""
Command-line entry points.

    python -m cli build-corpus data/*.mrg --out corpus.jsonl
    python -m cli synth --n 200 --seed 7 --out synth.jsonl
    python -m cli run --corpus corpus.jsonl --model mock-oracle --conditions f,s --shots 0,1,3,5 --out runs
    python -m cli score --corpus corpus.jsonl --outputs runs
    python -m cli report --summary runs/summary.jsonl --out runs

Exit codes: 0 success, 1 partial run (some units failed), 2 input error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from core import DresError, TreebankError, read_treebank
from extraction import CorpusConfig, DisfluencyRates, build_corpus, load_corpus, save_corpus, synthesize_corpus
from harness import EvalConfig, EvalRunner, ResponseCache, create_backend, load_cells, save_cell, score_outputs
from report import build_cell, read_summary, write_report, write_summary, write_unit_scores
from scoring import Scope, ScoringOptions

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_INPUT_ERROR = 2


def _rate(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"rate must be in [0, 1], got {value}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected non-negative integers, got {text!r}")
    return values


def _str_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _scoring_options(args) -> ScoringOptions:
    return ScoringOptions(
        scope=Scope(args.scope),
        z_include_punct=not args.z_exclude_punct,
        std_mode=args.std,
        gap_threshold=args.gap,
        high_threshold=args.high,
    )


def cmd_build_corpus(args) -> int:
    diagnostics: List[TreebankError] = []

    def report(error: TreebankError):
        diagnostics.append(error)
        logger.error("%s", error)

    pairs = read_treebank(args.paths, on_error=report)
    if diagnostics:
        logger.error("%d malformed trees; corpus not written", len(diagnostics))
        return EXIT_INPUT_ERROR
    config = CorpusConfig(train_fraction=args.train_fraction, seed=args.seed, drop_none=args.drop_none,
                          drop_markup=args.drop_markup, skip_speaker_turns=args.skip_speaker_turns)
    corpus = build_corpus(pairs, config)
    save_corpus(corpus, args.out)
    logger.info("Wrote %d utterances to %s", len(corpus), args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    rates = DisfluencyRates(edited=args.edited, intj=args.intj, prn=args.prn)
    corpus = synthesize_corpus(args.n, seed=args.seed, rates=rates,
                               utterances_per_conversation=args.per_conversation,
                               train_fraction=args.train_fraction)
    save_corpus(corpus, args.out)
    logger.info("Wrote %d synthetic utterances to %s", len(corpus), args.out)
    return EXIT_OK


def _base_config(args) -> EvalConfig:
    overrides = dict(
        cache_dir=args.cache_dir,
        base_url=args.base_url,
        concurrency=args.concurrency,
        segment_size=args.segment_size,
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        exemplar_seed=args.exemplar_seed,
        max_retries=args.max_retries,
        timeout=args.timeout,
    )
    if args.config:
        return EvalConfig.from_file(args.config, **overrides)
    return EvalConfig.from_dict({}, **overrides)


def cmd_run(args) -> int:
    corpus = load_corpus(args.corpus)
    base = _base_config(args)
    models = args.model or [base.model_id]
    shared = ResponseCache(base.cache_dir) if base.cache_dir else None
    failures = 0
    for model_id in models:
        model_config = replace(base, model_id=model_id)
        backend = create_backend(model_config)
        cache = shared
        # Nondeterministic replies are always cached
        if cache is None and not backend.deterministic:
            cache = ResponseCache(Path(args.out) / "cache")
            logger.info("Caching %s replies under %s", model_id, cache.root)
        for condition in args.conditions:
            for shots in args.shots:
                config = model_config.for_cell(condition, shots)
                runner = EvalRunner(backend, config, cache, show_progress=not args.quiet)
                outputs = runner.run(corpus)
                runner.stats.log_summary(f"{model_id} {config.cell_name}")
                save_cell(args.out, config, outputs)
                failures += runner.stats.failures
    if failures:
        logger.warning("%d units failed; results are partial", failures)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_score(args) -> int:
    corpus = load_corpus(args.corpus)
    options = _scoring_options(args)
    cells = []
    for info, directory, outputs in load_cells(args.outputs):
        scored = score_outputs(corpus, outputs, options)
        write_unit_scores(directory, scored.conversations, scored.segments)
        cells.append(build_cell(info.model_id, info.condition, info.shots, scored.conversations,
                                scored.excluded, options))
    if not cells:
        raise DresError(f"No stored cells under {args.outputs}")
    write_summary(args.outputs, cells)
    write_report(args.outputs, cells)
    return EXIT_OK


def cmd_report(args) -> int:
    cells = read_summary(args.summary)
    if args.gap is not None or args.high is not None:
        defaults = ScoringOptions()
        options = ScoringOptions(
            gap_threshold=defaults.gap_threshold if args.gap is None else args.gap,
            high_threshold=defaults.high_threshold if args.high is None else args.high,
        )
        cells = [cell.reclassify(options.gap_threshold, options.high_threshold) for cell in cells]
    write_report(args.out or Path(args.summary).parent, cells)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dres", description="Disfluency removal evaluation toolkit")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only, no progress bars")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build-corpus", help="Extract utterance tuples from treebank files")
    build.add_argument("paths", nargs="+", help=".mrg files")
    build.add_argument("--out", required=True, help="Corpus JSONL file")
    build.add_argument("--drop-none", dest="drop_none", action="store_true", default=True,
                       help="Remove -NONE- trace terminals (default)")
    build.add_argument("--keep-none", dest="drop_none", action="store_false", help="Keep trace terminals")
    build.add_argument("--keep-markup", dest="drop_markup", action="store_false",
                       help="Keep -DFL- dysfluency markup terminals (dropped by default)")
    build.add_argument("--keep-speaker-turns", dest="skip_speaker_turns", action="store_false",
                       help="Keep CODE speaker-turn trees (skipped by default)")
    build.add_argument("--train-fraction", type=float, default=0.5)
    build.add_argument("--seed", type=int, default=0)
    build.set_defaults(handler=cmd_build_corpus)

    synth = commands.add_parser("synth", help="Generate a synthetic corpus")
    synth.add_argument("--n", type=int, required=True, help="Number of utterances")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--edited", type=_rate, default=0.1, help="Edited-phrase rate per token")
    synth.add_argument("--intj", type=_rate, default=0.15, help="Filler rate per token")
    synth.add_argument("--prn", type=_rate, default=0.05, help="Parenthetical rate per token")
    synth.add_argument("--per-conversation", type=int, default=10)
    synth.add_argument("--train-fraction", type=float, default=0.5)
    synth.add_argument("--out", required=True)
    synth.set_defaults(handler=cmd_synth)

    run = commands.add_parser("run", help="Run models over the condition x shots grid")
    run.add_argument("--corpus", required=True)
    run.add_argument("--model", type=_str_list, help="Model ids, comma separated")
    run.add_argument("--conditions", type=_str_list, default=["f", "s"])
    run.add_argument("--shots", type=_int_list, default=[0, 1, 3, 5])
    run.add_argument("--config", help="YAML configuration file")
    run.add_argument("--cache-dir")
    run.add_argument("--base-url")
    run.add_argument("--concurrency", type=int)
    run.add_argument("--segment-size", type=int)
    run.add_argument("--temperature", type=float)
    run.add_argument("--max-tokens", type=int)
    run.add_argument("--exemplar-seed", type=int)
    run.add_argument("--max-retries", type=int)
    run.add_argument("--timeout", type=float)
    run.add_argument("--out", required=True, help="Output directory")
    run.set_defaults(handler=cmd_run)

    score = commands.add_parser("score", help="Score stored outputs and write the report")
    score.add_argument("--corpus", required=True)
    score.add_argument("--outputs", required=True, help="Directory written by run")
    score.add_argument("--scope", choices=[s.value for s in Scope], default=Scope.WORDS.value)
    score.add_argument("--z-exclude-punct", action="store_true",
                       help="Ignore punctuation when checking full node removal")
    score.add_argument("--std", choices=["sample", "population"], default="sample")
    score.add_argument("--gap", type=float, default=40.0, help="Failure-mode gap threshold (%%)")
    score.add_argument("--high", type=float, default=80.0, help="Failure-mode high threshold (%%)")
    score.set_defaults(handler=cmd_score)

    report = commands.add_parser("report", help="Render report.md and report.csv from a summary")
    report.add_argument("--summary", required=True, help="summary.jsonl written by score")
    report.add_argument("--out", help="Output directory (default: next to the summary)")
    report.add_argument("--gap", type=float)
    report.add_argument("--high", type=float)
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")
    try:
        return args.handler(args)
    except (DresError, ValueError, OSError) as error:
        logger.error("%s", error)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
