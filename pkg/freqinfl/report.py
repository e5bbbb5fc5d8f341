"""Results TSV, the test comparison table and the dev temperature tables."""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from freqinfl.errors import EmptyInputError, LexiconFormatError
from freqinfl.metrics import macro_average
from freqinfl.schema import AppConfig, CellOutcome, EvalOutcome, SelectionMetric, SweepResult, System

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "language", "system", "tau", "type_acc", "token_acc", "items", "tokens",
    "seed", "split", "correct_items", "correct_tokens", "type_acc_full", "token_acc_full",
    "free_variation_keys", "swept", "tau_best", "select_by",
]
MACRO = "macro avg"
BASELINE = "copy"


def percent(value: float) -> str:
    return f"{100 * value:.2f}"


def _write_tsv(frame: pd.DataFrame, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep="\t", index=False, lineterminator="\n", encoding="utf-8")


def _result_row(result: SweepResult, system: str, tau: str, seed: str, split: str, outcome: EvalOutcome) -> Dict:
    return {
        "language": result.language,
        "system": system,
        "tau": tau,
        "seed": seed,
        "split": split,
        "type_acc": percent(outcome.type_accuracy),
        "token_acc": percent(outcome.token_accuracy),
        "items": outcome.item_total,
        "tokens": outcome.token_total,
        "correct_items": outcome.correct_items,
        "correct_tokens": outcome.correct_tokens,
        "type_acc_full": repr(outcome.type_accuracy),
        "token_acc_full": repr(outcome.token_accuracy),
        "free_variation_keys": outcome.free_variation_keys,
        "swept": "",
        "tau_best": repr(result.tau_best),
        "select_by": SelectionMetric(result.selection_metric).value,
    }


def results_frame(results: Iterable[SweepResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        model = result.metadata.get("model", "rules")
        rows.append(_result_row(result, BASELINE, "", "", "dev", result.copy_dev))
        rows.append(_result_row(result, BASELINE, "", "", "test", result.copy_test))
        for cell in sorted(result.cells, key=lambda c: (c.tau, c.seed)):
            for split, outcome in (("dev", cell.dev), ("test", cell.test)):
                row = _result_row(result, model, repr(cell.tau), str(cell.seed), split, outcome)
                row["swept"] = "1" if cell.tau in result.swept else "0"
                rows.append(row)
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def write_results(results: Iterable[SweepResult], path: str) -> None:
    _write_tsv(results_frame(results), path)


def _outcome(row: pd.Series) -> EvalOutcome:
    return EvalOutcome(
        item_total=int(row["items"]),
        token_total=int(row["tokens"]),
        correct_items=int(row["correct_items"]),
        correct_tokens=int(row["correct_tokens"]),
        free_variation_keys=int(row["free_variation_keys"]),
    )


def read_results(path: str) -> List[SweepResult]:
    try:
        frame = pd.read_csv(path, sep="\t", dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise EmptyInputError(f"no results file at {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise LexiconFormatError(f"{path}: {e}") from e
    missing = set(RESULT_COLUMNS) - set(frame.columns)
    if missing:
        raise LexiconFormatError(f"{path}: missing columns {sorted(missing)}")
    try:
        return [_sweep_from_rows(str(language), rows) for language, rows in frame.groupby("language", sort=False)]
    except (KeyError, ValueError) as e:
        raise LexiconFormatError(f"{path}: malformed results row ({e!r})") from e


def _sweep_from_rows(language: str, rows: pd.DataFrame) -> SweepResult:
    baseline = rows[rows["tau"] == ""]
    copy = {row["split"]: _outcome(row) for _, row in baseline.iterrows()}
    cells: Dict[tuple, Dict[str, EvalOutcome]] = {}
    swept = []
    model = BASELINE
    for _, row in rows[rows["tau"] != ""].iterrows():
        tau = float(row["tau"])
        model = row["system"]
        cells.setdefault((tau, int(row["seed"])), {})[row["split"]] = _outcome(row)
        if row["swept"] == "1" and tau not in swept:
            swept.append(tau)
    first = rows.iloc[0]
    return SweepResult(
        language=language,
        cells=[CellOutcome(tau, seed, parts["dev"], parts["test"]) for (tau, seed), parts in cells.items()],
        copy_dev=copy["dev"],
        copy_test=copy["test"],
        tau_best=float(first["tau_best"]),
        swept=tuple(swept),
        selection_metric=SelectionMetric(first["select_by"]),
        metadata={"model": model},
    )


def collect_results(results_dir: str) -> List[SweepResult]:
    """Every results.tsv below ``results_dir``, in path order"""
    paths = sorted(Path(results_dir).rglob(AppConfig.RESULTS_FILE))
    if not paths:
        raise EmptyInputError(f"no {AppConfig.RESULTS_FILE} under {results_dir}")
    results = []
    for path in paths:
        results.extend(read_results(str(path)))
    return results


def _best(values: Dict[System, float]) -> List[System]:
    top = max(values.values())
    return [system for system, value in values.items() if value == top]


def comparison_frame(results: Sequence[SweepResult]) -> pd.DataFrame:
    """One row per language plus the macro row: four systems x two metrics"""
    if not results:
        raise EmptyInputError("nothing to report")
    rows = []
    outcomes: Dict[System, List[EvalOutcome]] = {system: [] for system in System}
    for result in results:
        per_system = {system: result.system_outcome(system) for system in System}
        for system, outcome in per_system.items():
            outcomes[system].append(outcome)
        rows.append(_comparison_row(
            result.language,
            {s: o.token_accuracy for s, o in per_system.items()},
            {s: o.type_accuracy for s, o in per_system.items()},
            repr(result.tau_best),
        ))
    macro = {system: macro_average(outcomes[system]) for system in System}
    rows.append(_comparison_row(
        MACRO,
        {s: token for s, (_, token) in macro.items()},
        {s: type_ for s, (type_, _) in macro.items()},
        "",
    ))
    return pd.DataFrame(rows)


def _comparison_row(language: str, token: Dict[System, float], type_: Dict[System, float], tau_best: str) -> Dict:
    row: Dict[str, str] = {"language": language}
    for system in System:
        row[f"{system.value} token"] = percent(token[system])
    for system in System:
        row[f"{system.value} type"] = percent(type_[system])
    row["tau_best"] = tau_best
    row["best token"] = ",".join(s.value for s in _best(token))
    row["best type"] = ",".join(s.value for s in _best(type_))
    return row


def dev_frame(results: Sequence[SweepResult], metric: SelectionMetric) -> pd.DataFrame:
    """tau x language dev table with a macro column over the languages that swept each tau"""
    taus = sorted({tau for result in results for tau in result.swept})
    rows = []
    for tau in taus:
        row: Dict[str, str] = {"tau": repr(tau)}
        present = []
        for result in results:
            if tau in result.swept:
                outcome = result.dev_outcome(tau)
                present.append(outcome)
                row[result.language] = percent(outcome.accuracy(metric))
            else:
                row[result.language] = ""
        type_macro, token_macro = macro_average(present)
        row[MACRO] = percent(token_macro if metric == SelectionMetric.TOKEN else type_macro)
        rows.append(row)
    return pd.DataFrame(rows, columns=["tau"] + [r.language for r in results] + [MACRO])


def _markdown(frame: pd.DataFrame) -> str:
    marked = frame.copy()
    for index, row in frame.iterrows():
        for metric in ("token", "type"):
            for system in str(row[f"best {metric}"]).split(","):
                if system:
                    column = f"{system} {metric}"
                    marked.at[index, column] = f"**{row[column]}**"
    return marked.drop(columns=["best token", "best type"]).to_markdown(index=False) + "\n"


def render_report(sweep_results: Sequence[SweepResult], out_path: str) -> Dict[str, str]:
    """Write the comparison table (TSV + markdown) and dev tables next to ``out_path``"""
    comparison = comparison_frame(sweep_results)
    base = Path(out_path)
    paths = {
        "comparison": str(base),
        "markdown": str(base.with_suffix(".md")),
        "dev_token": str(base.with_name("dev_token.tsv")),
        "dev_type": str(base.with_name("dev_type.tsv")),
    }
    _write_tsv(comparison, paths["comparison"])
    Path(paths["markdown"]).write_text(_markdown(comparison), encoding="utf-8")
    _write_tsv(dev_frame(sweep_results, SelectionMetric.TOKEN), paths["dev_token"])
    _write_tsv(dev_frame(sweep_results, SelectionMetric.TYPE), paths["dev_type"])
    flagged = [r.language for r in sweep_results if r.copy_test.free_variation_keys]
    if flagged:
        logger.warning(f"Free-variation rows present in test data of: {', '.join(flagged)}")
    logger.info(f"Wrote report for {len(sweep_results)} language(s) to {out_path}")
    return paths


def load_table(path: str, columns: Optional[List[str]] = None) -> pd.DataFrame:
    return pd.read_csv(path, sep="\t", dtype=str, keep_default_na=False, usecols=columns)
