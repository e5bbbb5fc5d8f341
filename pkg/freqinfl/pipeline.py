import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from freqinfl import report
from freqinfl.config import ExperimentConfig
from freqinfl.corpus_ingest import ingest_files
from freqinfl.errors import EmptyInputError, FreqInflError
from freqinfl.inflectors import CopyInflector, RuleInflector, make_inflector
from freqinfl.metrics import evaluate
from freqinfl.schema import (AppConfig, CellOutcome, DataSplit, EvalOutcome, Lexicon, ModelKind,
                             SelectionMetric, SweepResult, TrainingMode)
from freqinfl.splitter import split_lexicon, write_split
from freqinfl.utils.tsv_io import write_predictions, write_records

logger = logging.getLogger(__name__)

# Stage codes of the seed derivation; never renumber, recorded runs depend on them.
STAGES = {"split": 0, "sampler": 1, "model": 2}


def derive_seed(master: int, stage: str, *path: int) -> int:
    """Per-stage 64-bit seed: SeedSequence(master, spawn_key=(stage code, *path))"""
    sequence = np.random.SeedSequence(entropy=master, spawn_key=(STAGES[stage], *path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def select_tau_best(
    dev_outcomes: Mapping[float, Union[EvalOutcome, float]],
    metric: SelectionMetric = SelectionMetric.TOKEN,
) -> float:
    """Temperature with the best dev score; ties go to tau closer to 0, then to the smaller tau"""
    if not dev_outcomes:
        raise EmptyInputError("no dev outcomes to select a temperature from")

    def score(value: Union[EvalOutcome, float]) -> float:
        return value.accuracy(metric) if isinstance(value, EvalOutcome) else float(value)

    return min(dev_outcomes, key=lambda tau: (-score(dev_outcomes[tau]), abs(tau), tau))


def _fit_cell(
    config: ExperimentConfig,
    split: DataSplit,
    tau: float,
    seed: int,
    output_dir: Optional[str],
) -> CellOutcome:
    sampler_seed = derive_seed(config.seed, "sampler", seed)
    n_draws = config.draws_per_fit(split.train.token_mass) if config.mode == TrainingMode.SAMPLED else None
    model = make_inflector(config.model, config.rule_context)
    model.fit(split.train, temperature=tau, seed=sampler_seed, mode=config.mode, n_draws=n_draws)
    dev_predictions = model.predict_lexicon(split.dev)
    test_predictions = model.predict_lexicon(split.test)
    cell = CellOutcome(
        tau=tau,
        seed=seed,
        dev=evaluate(dev_predictions, split.dev),
        test=evaluate(test_predictions, split.test),
    )
    if output_dir:
        name = f"{tau!r}_{seed}"
        if isinstance(model, RuleInflector) and model.model is not None:
            model.model.save(f"{output_dir}/models/{name}.tsv")
        write_predictions(dev_predictions, f"{output_dir}/predictions/dev_{name}.tsv")
        write_predictions(test_predictions, f"{output_dir}/predictions/test_{name}.tsv")
    logger.info(f"[{config.language}] tau={tau:+.2f} seed={seed}: dev token {cell.dev.token_accuracy:.4f}, "
                f"test token {cell.test.token_accuracy:.4f}")
    return cell


def _seed_view(result: SweepResult, seed: int) -> Tuple[Dict[float, EvalOutcome], Dict[float, EvalOutcome]]:
    dev = {cell.tau: cell.dev for cell in result.cells if cell.seed == seed and cell.tau in result.swept}
    test = {cell.tau: cell.test for cell in result.cells if cell.seed == seed and cell.tau in result.swept}
    return dev, test


def selection_drop(result: SweepResult) -> float:
    """Largest per-seed loss in test token accuracy from selecting tau on dev type accuracy instead of token"""
    drops = []
    for seed in result.seeds():
        dev, test = _seed_view(result, seed)
        by_token = select_tau_best(dev, SelectionMetric.TOKEN)
        by_type = select_tau_best(dev, SelectionMetric.TYPE)
        drops.append(test[by_token].token_accuracy - test[by_type].token_accuracy)
    return max(drops) if drops else 0.0


def prepare_split(config: ExperimentConfig, lexicon: Optional[Lexicon] = None) -> Tuple[DataSplit, Dict[str, object]]:
    meta: Dict[str, object] = {}
    if lexicon is None:
        ingest = ingest_files(config.treebanks, config.filters)
        lexicon = ingest.lexicon
        meta.update({f"lexicon_{key}": value for key, value in ingest.metadata().items()})
    split_config = config.split.model_copy(update={"seed": derive_seed(config.seed, "split")})
    return split_lexicon(lexicon, split_config), meta


def run_language(
    config: ExperimentConfig,
    lexicon: Optional[Lexicon] = None,
    data_split: Optional[DataSplit] = None,
    workers: int = 1,
) -> SweepResult:
    """Split, sweep every (tau, seed) cell, select tau-best on dev, score the test systems"""
    try:
        return _run_language(config, lexicon, data_split, workers)
    except FreqInflError as e:
        logger.error(f"[{config.language}] {e}")
        raise e.with_context(config.language)


def _run_language(
    config: ExperimentConfig,
    lexicon: Optional[Lexicon],
    data_split: Optional[DataSplit],
    workers: int,
) -> SweepResult:
    meta: Dict[str, object] = {}
    if data_split is None:
        data_split, meta = prepare_split(config, lexicon)
    output_dir = config.output_dir
    if output_dir:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        write_split(data_split, f"{output_dir}/split")

    copy = CopyInflector()
    copy_dev = evaluate(copy.predict_lexicon(data_split.dev), data_split.dev)
    copy_test = evaluate(copy.predict_lexicon(data_split.test), data_split.test)

    grid = [(tau, seed) for tau in AppConfig.reported_taus(config.temperatures) for seed in config.seeds]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        cells = list(pool.map(lambda cell: _fit_cell(config, data_split, cell[0], cell[1], output_dir), grid))

    result = SweepResult(
        language=config.language,
        cells=cells,
        copy_dev=copy_dev,
        copy_test=copy_test,
        tau_best=0.0,
        swept=tuple(config.temperatures),
        selection_metric=config.select_by,
    )
    dev_by_tau = {tau: result.dev_outcome(tau) for tau in result.swept}
    result.tau_best = select_tau_best(dev_by_tau, config.select_by)
    best = dev_by_tau[result.tau_best].accuracy(config.select_by)
    assert all(best >= outcome.accuracy(config.select_by) for outcome in dev_by_tau.values())

    meta.update({
        "language": config.language,
        "model": ModelKind(config.model).value,
        "mode": TrainingMode(config.mode).value,
        "master_seed": config.seed,
        "seeds": ",".join(str(seed) for seed in config.seeds),
        "split_seed": data_split.provenance.config.seed,
        "split_source_digest": data_split.provenance.source_digest,
        "rng": data_split.provenance.rng,
        "temperatures": ",".join(repr(tau) for tau in result.swept),
        "select_by": SelectionMetric(config.select_by).value,
        "tau_best": repr(result.tau_best),
        "selection_drop": repr(selection_drop(result)),
        "rule_context": config.rule_context,
        "batch_size": config.batch_size,
        "epochs": config.epochs,
    })
    result.metadata = {key: str(value) for key, value in meta.items()}
    if output_dir:
        report.write_results([result], f"{output_dir}/{AppConfig.RESULTS_FILE}")
        write_records(result.metadata, f"{output_dir}/{AppConfig.SWEEP_META}")
    logger.info(f"[{config.language}] tau-best={result.tau_best} "
                f"(dev {SelectionMetric(config.select_by).value} accuracy {best:.4f})")
    return result


def run_languages(configs: List[ExperimentConfig], workers: int = 1) -> List[SweepResult]:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(run_language, configs))
