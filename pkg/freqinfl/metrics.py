"""Type accuracy (share of correct triples) and token accuracy (share of correct occurrences)."""
import logging
import unicodedata
from typing import Dict, Iterable, Sequence, Tuple

from freqinfl.errors import CoverageError, EmptyInputError
from freqinfl.schema import EvalOutcome, Lexicon, Prediction

logger = logging.getLogger(__name__)


def normalize(form: str) -> str:
    return unicodedata.normalize("NFC", form)


def index_predictions(predictions: Iterable[Prediction], gold_lexicon: Lexicon) -> Dict[Tuple[str, str], str]:
    """Map (lemma, tag) -> predicted form, requiring exactly one prediction per gold key"""
    by_key: Dict[Tuple[str, str], str] = {}
    duplicate = set()
    for prediction in predictions:
        if prediction.key in by_key:
            duplicate.add(prediction.key)
        else:
            by_key[prediction.key] = prediction.predicted_form
    gold_keys = {(entry.lemma, str(entry.tag)) for entry in gold_lexicon.entries}
    missing = gold_keys - by_key.keys()
    duplicate &= gold_keys
    if missing or duplicate:
        raise CoverageError(missing, duplicate)
    extra = by_key.keys() - gold_keys
    if extra:
        logger.warning(f"Ignoring {len(extra)} prediction(s) for keys absent from the gold lexicon")
    return by_key


def evaluate(predictions: Iterable[Prediction], gold_lexicon: Lexicon) -> EvalOutcome:
    """Score every gold row independently; free-variation rows share one prediction"""
    if not gold_lexicon.entries:
        logger.warning("Empty gold lexicon; both accuracies reported as 0")
        return EvalOutcome(item_total=0, token_total=0, correct_items=0, correct_tokens=0)
    predicted = index_predictions(predictions, gold_lexicon)
    correct_items = 0
    correct_tokens = 0
    for entry in gold_lexicon.entries:
        if normalize(predicted[(entry.lemma, str(entry.tag))]) == normalize(entry.form):
            correct_items += 1
            correct_tokens += entry.count
    free_variation = len(gold_lexicon.free_variation_keys())
    if free_variation:
        logger.warning(f"{free_variation} (lemma, tag) key(s) have several gold forms; each row is scored separately")
    return EvalOutcome(
        item_total=gold_lexicon.type_count,
        token_total=gold_lexicon.token_mass,
        correct_items=correct_items,
        correct_tokens=correct_tokens,
        free_variation_keys=free_variation,
    )


def type_accuracy(predictions: Iterable[Prediction], gold_lexicon: Lexicon) -> float:
    return evaluate(predictions, gold_lexicon).type_accuracy


def token_accuracy(predictions: Iterable[Prediction], gold_lexicon: Lexicon) -> float:
    return evaluate(predictions, gold_lexicon).token_accuracy


def macro_average(outcomes: Sequence[EvalOutcome]) -> Tuple[float, float]:
    """Unweighted mean of (type accuracy, token accuracy) across languages"""
    if not outcomes:
        raise EmptyInputError("macro average over no outcomes")
    n = len(outcomes)
    return (
        sum(o.type_accuracy for o in outcomes) / n,
        sum(o.token_accuracy for o in outcomes) / n,
    )
