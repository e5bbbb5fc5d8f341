"""Command-line entry point: lexicalize, split, sweep, evaluate, report, serve.

Settings come from CLI flags, then a ``--config`` key=value file, then
``FREQINFL_<KEY>`` environment variables. Negative temperature lists need the
``--temperatures=-1,0,0.5`` spelling so argparse does not read them as flags.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from freqinfl.config import (ExperimentConfig, FilterConfig, SplitConfig, build, environment_values,
                             load_config_file, merge_settings)
from freqinfl.corpus_ingest import ingest_files
from freqinfl.errors import DataError, FreqInflError, UsageError
from freqinfl.metrics import evaluate
from freqinfl.pipeline import run_language
from freqinfl.report import collect_results, percent, read_results, render_report
from freqinfl.schema import AppConfig, ModelKind, SelectionMetric, TrainingMode
from freqinfl.splitter import read_split, split_lexicon, write_split
from freqinfl.utils.tsv_io import read_lexicon, read_predictions, write_lexicon, write_records

logger = logging.getLogger(__name__)

EXPERIMENT_KEYS = ("language", "temperatures", "model", "mode", "seed", "seeds", "batch_size",
                   "epochs", "rule_context", "select_by")
INTERNAL_KEYS = ("command", "handler", "config")


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def _pick(settings: Mapping[str, Any], *keys: str) -> Dict[str, Any]:
    return {key: settings[key] for key in keys if settings.get(key) not in (None, "")}


def _require(settings: Mapping[str, Any], key: str, flag: str) -> Any:
    if settings.get(key) in (None, ""):
        raise UsageError(f"missing required setting {flag} (or {key}= in the config file)")
    return settings[key]


def _int(settings: Mapping[str, Any], key: str, default: int) -> int:
    try:
        return int(settings.get(key, default))
    except (TypeError, ValueError) as e:
        raise UsageError(f"{key} must be an integer, got {settings.get(key)!r}") from e


def cmd_lexicalize(settings: Mapping[str, Any]) -> int:
    inputs = settings.get("inputs") or []
    if isinstance(inputs, str):
        inputs = [part for part in inputs.split(",") if part]
    if not inputs:
        raise UsageError("lexicalize needs at least one treebank file or directory")
    out = _require(settings, "out", "-o/--out")
    filters = build(FilterConfig, **_pick(settings, "lowercase", "drop_upos"))
    ingest = ingest_files(inputs, filters, workers=_int(settings, "workers", 4))
    write_lexicon(ingest.lexicon, out)
    write_records(ingest.metadata(), f"{out}.meta")
    logger.info(f"Wrote {ingest.lexicon.type_count} entries ({ingest.lexicon.token_mass} tokens) to {out}")
    return 0


def cmd_split(settings: Mapping[str, Any]) -> int:
    path = _require(settings, "lexicon", "LEXICON")
    out = _require(settings, "out", "-o/--out")
    lexicon = read_lexicon(path)
    config = SplitConfig.from_ratios(settings.get("ratios", "8:1:1"), seed=_int(settings, "seed", 0))
    split = split_lexicon(lexicon, config)
    write_split(split, out)
    for warning in split.provenance.warnings:
        logger.warning(warning)
    masses = ", ".join(f"{name}={part.token_mass}" for name, part in split.parts().items())
    logger.info(f"Wrote split to {out}: {masses}")
    return 0


def cmd_sweep(settings: Mapping[str, Any]) -> int:
    split_dir = _require(settings, "split_dir", "SPLIT_DIR")
    out = _require(settings, "out", "-o/--out")
    values = _pick(settings, *EXPERIMENT_KEYS)
    values.setdefault("language", Path(split_dir).resolve().name)
    config = build(ExperimentConfig, output_dir=out, **values)
    result = run_language(config, data_split=read_split(split_dir), workers=_int(settings, "workers", 1))
    print(f"{result.language}\ttau-best={result.tau_best!r}")
    return 0


def cmd_evaluate(settings: Mapping[str, Any]) -> int:
    gold = read_lexicon(_require(settings, "gold", "GOLD"))
    predictions = read_predictions(_require(settings, "predictions", "PREDICTIONS"))
    outcome = evaluate(predictions, gold)
    print("type_acc\ttoken_acc\titems\ttokens")
    print(f"{percent(outcome.type_accuracy)}\t{percent(outcome.token_accuracy)}\t"
          f"{outcome.item_total}\t{outcome.token_total}")
    return 0


def cmd_report(settings: Mapping[str, Any]) -> int:
    results = _require(settings, "results", "RESULTS")
    sweeps = collect_results(results) if Path(results).is_dir() else read_results(results)
    paths = render_report(sweeps, settings.get("out") or "report.tsv")
    for kind, path in paths.items():
        logger.info(f"{kind}: {path}")
    return 0


def cmd_serve(settings: Mapping[str, Any]) -> int:
    import uvicorn

    uvicorn.run("freqinfl.main:app", host=settings.get("host", "127.0.0.1"), port=_int(settings, "port", 8000))
    return 0


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="freqinfl", description="Frequency-aware morphological inflection toolkit")
    parser.add_argument("--config", help="key=value settings file (CLI flags win)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (default INFO)")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    lex = commands.add_parser("lexicalize", help="CoNLL-U treebanks -> lexicon TSV")
    lex.add_argument("inputs", nargs="*", help="treebank files or directories")
    lex.add_argument("-o", "--out", help="output lexicon TSV; metadata goes to <out>.meta")
    lex.add_argument("--lowercase", action="store_true", default=None, help="lowercase lemma and form")
    lex.add_argument("--drop-upos", help="comma-separated UPOS classes to exclude")
    lex.add_argument("--workers", type=int, help="parallel parse threads")
    lex.set_defaults(handler=cmd_lexicalize)

    split = commands.add_parser("split", help="frequency-weighted lemma-disjoint split")
    split.add_argument("lexicon", nargs="?", help="lexicon TSV")
    split.add_argument("--ratios", help="train:dev:test token-mass ratios (default 8:1:1)")
    split.add_argument("--seed", help="split seed")
    split.add_argument("-o", "--out", help="output directory")
    split.set_defaults(handler=cmd_split)

    sweep = commands.add_parser("sweep", help="fit and score every temperature on a split")
    sweep.add_argument("split_dir", nargs="?", help="directory written by `split`")
    sweep.add_argument("--language", help="language id (default: split directory name)")
    sweep.add_argument("--temperatures", help="comma-separated tau grid")
    sweep.add_argument("--model", choices=[kind.value for kind in ModelKind])
    sweep.add_argument("--mode", choices=[mode.value for mode in TrainingMode])
    sweep.add_argument("--seed", help="master seed")
    sweep.add_argument("--seeds", help="comma-separated training seeds")
    sweep.add_argument("--batch-size", help=f"sampled-mode batch size (default {AppConfig.BATCH_SIZE})")
    sweep.add_argument("--epochs", help="sampled-mode epochs")
    sweep.add_argument("--rule-context", help="characters of context for generalized rules")
    sweep.add_argument("--select-by", choices=[metric.value for metric in SelectionMetric])
    sweep.add_argument("--workers", type=int, help="parallel (tau, seed) cells")
    sweep.add_argument("-o", "--out", help="results directory")
    sweep.set_defaults(handler=cmd_sweep)

    ev = commands.add_parser("evaluate", help="score a predictions TSV against a gold lexicon")
    ev.add_argument("gold", nargs="?", help="gold lexicon TSV")
    ev.add_argument("predictions", nargs="?", help="predictions TSV (lemma, tag, prediction)")
    ev.set_defaults(handler=cmd_evaluate)

    rep = commands.add_parser("report", help="render comparison and dev tables")
    rep.add_argument("results", nargs="?", help="results directory or results.tsv")
    rep.add_argument("-o", "--out", help="report TSV path (default report.tsv)")
    rep.set_defaults(handler=cmd_report)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host")
    serve.add_argument("--port")
    serve.set_defaults(handler=cmd_serve)
    return parser


def resolve_settings(args: argparse.Namespace) -> Dict[str, Any]:
    cli = {key: value for key, value in vars(args).items() if key not in INTERNAL_KEYS}
    if cli.get("inputs") == []:
        cli["inputs"] = None
    return merge_settings({}, environment_values(), load_config_file(args.config), cli)


def configure_logging(level: Optional[str]) -> None:
    name = (level or "INFO").upper()
    if not isinstance(logging.getLevelName(name), int):
        raise UsageError(f"unknown log level {level!r}")
    logging.basicConfig(level=name, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = resolve_settings(args)
        configure_logging(settings.get("log_level"))
        return args.handler(settings)
    except FreqInflError as e:
        logger.error(str(e))
        return e.exit_code
    except (OSError, KeyError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
