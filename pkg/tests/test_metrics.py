import numpy as np
import pandas as pd
import pytest

from freqinfl.errors import CoverageError, EmptyInputError
from freqinfl.inflectors import CopyInflector
from freqinfl.metrics import evaluate, macro_average, token_accuracy, type_accuracy
from freqinfl.schema import EvalOutcome, Lexicon, MorphTag, Prediction
from tests.conftest import make_lexicon

NOUN = MorphTag("NOUN", "Number=Plur")


def gold(rows):
    return make_lexicon((lemma, NOUN, form, count) for lemma, form, count in rows)


def predict(lexicon, wrong=()):
    return [Prediction(e.lemma, e.tag, e.form + ("x" if e.lemma in wrong else "")) for e in lexicon]


def test_all_correct():
    lexicon = gold([("a", "as", 3), ("b", "bs", 1)])
    assert type_accuracy(predict(lexicon), lexicon) == 1.0
    assert token_accuracy(predict(lexicon), lexicon) == 1.0


def test_three_of_four_types():
    lexicon = gold([("a", "as", 1), ("b", "bs", 1), ("c", "cs", 1), ("d", "ds", 5)])
    assert type_accuracy(predict(lexicon, wrong={"d"}), lexicon) == 0.75


def test_token_accuracy_weights_by_count():
    lexicon = gold([("a", "as", 3), ("b", "bs", 1)])
    outcome = evaluate(predict(lexicon, wrong={"b"}), lexicon)
    assert outcome.token_accuracy == 0.75
    assert outcome.type_accuracy == 0.5
    assert (outcome.correct_items, outcome.item_total, outcome.correct_tokens, outcome.token_total) == (1, 2, 3, 4)


def test_uniform_counts_give_equal_accuracies():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        c = int(rng.integers(1, 9))
        lexicon = gold([(f"l{i}", f"f{i}", c) for i in range(n)])
        wrong = {f"l{i}" for i in range(n) if rng.random() < 0.4}
        outcome = evaluate(predict(lexicon, wrong), lexicon)
        assert outcome.token_accuracy == outcome.type_accuracy


def test_copy_baseline_matches_identity_scan(mini_conllu):
    from freqinfl.corpus_ingest import lexicalize, parse_conllu

    lexicon = lexicalize(parse_conllu(mini_conllu.read_bytes()))
    identity = [e for e in lexicon if e.form == e.lemma]
    outcome = evaluate(CopyInflector().predict_lexicon(lexicon), lexicon)
    assert outcome.type_accuracy == len(identity) / lexicon.type_count
    assert outcome.token_accuracy == sum(e.count for e in identity) / lexicon.token_mass


def test_token_accuracy_matches_expansion_oracle():
    rng = np.random.default_rng(17)
    for trial in range(500):
        n = int(rng.integers(1, 51))
        counts = rng.integers(1, max(2, 100_000 // n), size=n)
        lexicon = gold([(f"l{i}", f"f{i}", int(c)) for i, c in enumerate(counts)])
        wrong = {f"l{i}" for i in range(n) if rng.random() < 0.5}
        predictions = predict(lexicon, wrong)
        by_key = {p.key: p.predicted_form for p in predictions}
        hits = np.array([e.form == by_key[(e.lemma, str(e.tag))] for e in lexicon])
        occurrences = np.repeat(hits, lexicon.counts)  # one row per running-text token
        assert occurrences.size == lexicon.token_mass <= 100_000
        brute = occurrences.sum() / occurrences.size
        assert token_accuracy(predictions, lexicon) == pytest.approx(brute, rel=0, abs=1e-12)


def test_token_accuracy_scaling_and_flip_increment():
    lexicon = gold([("a", "as", 7), ("b", "bs", 2), ("c", "cs", 1)])
    base = evaluate(predict(lexicon, wrong={"a", "b"}), lexicon)
    scaled = gold([(e.lemma, e.form, e.count * 6) for e in lexicon])
    assert evaluate(predict(scaled, wrong={"a", "b"}), scaled).token_accuracy == pytest.approx(base.token_accuracy)
    flipped = evaluate(predict(lexicon, wrong={"b"}), lexicon)
    assert flipped.token_accuracy - base.token_accuracy == pytest.approx(7 / 10)


def test_bounds():
    lexicon = gold([("a", "as", 3), ("b", "bs", 1)])
    none = evaluate(predict(lexicon, wrong={"a", "b"}), lexicon)
    assert none.type_accuracy == 0.0 and none.token_accuracy == 0.0


def test_nfc_normalization():
    lexicon = gold([("cafe", "caf\u00e9", 2)])
    decomposed = [Prediction("cafe", NOUN, "cafe\u0301")]
    assert token_accuracy(decomposed, lexicon) == 1.0


def test_missing_and_duplicate_predictions():
    lexicon = gold([("a", "as", 1), ("b", "bs", 1)])
    with pytest.raises(CoverageError) as e:
        evaluate([Prediction("a", NOUN, "as")], lexicon)
    assert e.value.missing == [("b", str(NOUN))]
    with pytest.raises(CoverageError) as e:
        evaluate(predict(lexicon) + [Prediction("a", NOUN, "ax")], lexicon)
    assert e.value.duplicate == [("a", str(NOUN))]


def test_extra_predictions_are_ignored(caplog):
    lexicon = gold([("a", "as", 1)])
    outcome = evaluate(predict(lexicon) + [Prediction("z", NOUN, "zs")], lexicon)
    assert outcome.type_accuracy == 1.0
    assert "absent from the gold lexicon" in caplog.text


def test_free_variation_rows_scored_separately():
    lexicon = gold([("dream", "dreamed", 3), ("dream", "dreamt", 1)])
    outcome = evaluate([Prediction("dream", NOUN, "dreamed")], lexicon)
    assert outcome.item_total == 2 and outcome.correct_items == 1
    assert outcome.token_accuracy == 0.75
    assert outcome.free_variation_keys == 1


def test_empty_gold_scores_zero():
    outcome = evaluate([], Lexicon())
    assert (outcome.type_accuracy, outcome.token_accuracy) == (0.0, 0.0)


def outcome_of(accuracy, scale=10_000):
    return EvalOutcome(scale, scale, round(accuracy * scale), round(accuracy * scale))


def test_macro_average_simple_cases():
    single = outcome_of(0.37)
    assert macro_average([single]) == (single.type_accuracy, single.token_accuracy)
    assert macro_average([outcome_of(0.0), outcome_of(1.0)]) == (0.5, 0.5)
    with pytest.raises(EmptyInputError):
        macro_average([])


def test_macro_average_over_published_languages(data_dir):
    table = pd.read_csv(data_dir / "test_results_by_language.tsv", sep="\t")
    assert len(table) == 43
    expected = {"copy_token": "50.15", "tau0_token": "85.04", "tau05_token": "85.28", "taubest_token": "85.51",
                "copy_type": "44.37", "tau0_type": "82.57", "tau05_type": "82.80", "taubest_type": "83.41"}
    for column, value in expected.items():
        outcomes = [outcome_of(v / 100) for v in table[column]]
        type_macro, token_macro = macro_average(outcomes)
        assert f"{100 * token_macro:.2f}" == value
        assert type_macro == token_macro
        assert token_macro == pytest.approx(sum(table[column]) / 100 / 43, abs=1e-12)


def test_duplicates_outside_gold_are_ignored(caplog):
    lexicon = gold([("a", "as", 2)])
    extra = [Prediction("z", NOUN, "zs"), Prediction("z", NOUN, "zes")]
    outcome = evaluate(predict(lexicon) + extra, lexicon)
    assert outcome.token_accuracy == 1.0
    assert "absent from the gold lexicon" in caplog.text
