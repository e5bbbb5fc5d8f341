import math
from fractions import Fraction

import numpy as np
import pytest

from freqinfl.config import SplitConfig
from freqinfl.corpus_ingest import lexicalize, parse_conllu
from freqinfl.errors import EmptyInputError, InsufficientLemmasError, LexiconFormatError
from freqinfl.schema import Lexicon
from freqinfl.splitter import group_by_lemma, read_split, split_lexicon, write_split
from freqinfl.utils.tsv_io import read_records, serialize_lexicon
from tests.conftest import make_lexicon


def lemma_masses(masses):
    return make_lexicon((f"lemma{i:03d}", "NOUN|_", f"form{i:03d}", mass) for i, mass in enumerate(masses))


def random_lexicon(rng):
    rows = []
    for i in range(int(rng.integers(3, 25))):
        for j in range(int(rng.integers(1, 4))):
            rows.append((f"l{i}", f"NOUN|Case=C{j}", f"f{i}_{j}", int(rng.integers(1, 60))))
    return make_lexicon(rows)


def test_group_single_entry():
    [group] = group_by_lemma(make_lexicon([("a", "X|_", "a", 5)]))
    assert group.lemma == "a" and group.mass == 5


def test_group_shared_lemma():
    [group] = group_by_lemma(make_lexicon([("a", "X|_", "a", 2), ("a", "X|_", "as", 3)]))
    assert group.mass == 5 and len(group.entries) == 2


def test_group_masses_match_per_lemma_sums(mini_conllu):
    lexicon = lexicalize(parse_conllu(mini_conllu.read_bytes()))
    sums = {}
    for entry in lexicon:
        sums[entry.lemma] = sums.get(entry.lemma, 0) + entry.count
    assert {group.lemma: group.mass for group in group_by_lemma(lexicon)} == sums


def test_group_empty_lexicon():
    with pytest.raises(EmptyInputError):
        group_by_lemma(Lexicon())


def test_single_lemma_is_insufficient():
    with pytest.raises(InsufficientLemmasError):
        split_lexicon(make_lexicon([("a", "X|_", "a", 5), ("a", "X|_", "b", 5)]))


@pytest.mark.parametrize("seed", range(200))
def test_heavy_lemma_always_in_train(seed):
    split = split_lexicon(lemma_masses([80, 10, 10]), SplitConfig(seed=seed))
    assert "lemma000" in split.train.lemmas
    if split.train.lemmas == {"lemma000"}:
        assert len(split.dev.lemmas) == 1 and len(split.test.lemmas) == 1
        assert split.provenance.warnings and "overshoot" in split.provenance.warnings[0]


def test_heavy_lemma_usually_drawn_alone():
    alone = sum(split_lexicon(lemma_masses([80, 10, 10]), SplitConfig(seed=seed)).train.lemmas == {"lemma000"}
                for seed in range(1000))
    # first draw takes the mass-80 lemma with probability 0.8
    assert abs(alone / 1000 - 0.8) < 3 * math.sqrt(0.8 * 0.2 / 1000)


def test_split_properties_on_random_lexicons():
    rng = np.random.default_rng(1234)
    for trial in range(1000):
        lexicon = random_lexicon(rng)
        if len(lexicon.lemmas) < 3:
            continue
        config = SplitConfig(seed=trial)
        split = split_lexicon(lexicon, config)
        train, dev, test = split.train.lemmas, split.dev.lemmas, split.test.lemmas
        assert not (train & dev or train & test or dev & test)
        assert sorted(split.train.entries + split.dev.entries + split.test.entries, key=lambda e: e.key) \
            == list(lexicon.entries)
        total = lexicon.token_mass
        max_mass = max(group.mass for group in group_by_lemma(lexicon))
        target = Fraction(8, 10) * total
        assert target <= split.train.token_mass < target + max_mass
        if split.test.entries:
            dev_target = Fraction(1, 10) * total
            assert dev_target <= split.dev.token_mass < dev_target + max_mass
        again = split_lexicon(lexicon, config)
        assert [serialize_lexicon(part) for part in again.parts().values()] \
            == [serialize_lexicon(part) for part in split.parts().values()]


def test_frequency_bias_matches_enumeration_oracle():
    # one lemma of mass 10 and 18 of mass 5: train (target 80) misses the heavy lemma
    # only when its first 16 weighted draws are all light lemmas
    masses = [10] + [5] * 18
    lexicon = lemma_masses(masses)
    p_excluded = Fraction(1)
    remaining = Fraction(sum(masses))
    light_left = Fraction(5 * 18)
    for _ in range(16):
        p_excluded *= light_left / remaining
        light_left -= 5
        remaining -= 5
    p_train = float(1 - p_excluded)

    n = 1000
    hits = sum("lemma000" in split_lexicon(lexicon, SplitConfig(seed=seed)).train.lemmas for seed in range(n))
    sigma = math.sqrt(p_train * (1 - p_train) / n)
    assert abs(hits / n - p_train) <= 3 * sigma


def test_other_ratios():
    lexicon = lemma_masses([10] * 20)
    split = split_lexicon(lexicon, SplitConfig.from_ratios("6:2:2", seed=4))
    assert split.train.token_mass == 120
    assert split.dev.token_mass == 40
    assert split.test.token_mass == 40


def test_split_files_round_trip(tmp_path):
    lexicon = lemma_masses([30, 20, 15, 10, 8, 5, 5, 4, 2, 1])
    split = split_lexicon(lexicon, SplitConfig(seed=9))
    write_split(split, str(tmp_path))
    assert {p.name for p in tmp_path.iterdir()} == {"train.tsv", "dev.tsv", "test.tsv", "split-meta"}
    meta = read_records(str(tmp_path / "split-meta"))
    assert meta["seed"] == "9"
    assert meta["fractions"] == "4/5:1/10:1/10"
    assert meta["dev_target_unit"] == "token_mass"
    assert meta["rng"].startswith("numpy.random.PCG64")
    assert int(meta["train_mass"]) + int(meta["dev_mass"]) + int(meta["test_mass"]) == lexicon.token_mass

    loaded = read_split(str(tmp_path))
    assert loaded.parts() == split.parts()
    assert loaded.provenance.config.seed == 9
    assert loaded.provenance.source_digest == split.provenance.source_digest


def test_read_split_detects_tampering(tmp_path):
    split = split_lexicon(lemma_masses([30, 20, 15, 10, 8, 5]), SplitConfig(seed=2))
    write_split(split, str(tmp_path))
    (tmp_path / "train.tsv").write_text("lemma\ttag\tform\tcount\n", encoding="utf-8")
    with pytest.raises(LexiconFormatError):
        read_split(str(tmp_path))
