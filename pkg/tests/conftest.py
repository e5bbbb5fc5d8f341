from pathlib import Path
from typing import Iterable, Tuple

import pytest

from freqinfl.config import SplitConfig
from freqinfl.schema import DataSplit, LexEntry, Lexicon, MorphTag, SplitProvenance

DATA_DIR = Path(__file__).parent / "data"

PAST = MorphTag("VERB", "Tense=Past")

# Frequent lemmas take -ed, rare ones -s; the frequent class has more tokens but fewer types.
FREQUENT_TRAIN = [("bam", "bamed", 100), ("cam", "camed", 100), ("dam", "damed", 100)]
RARE_TRAIN = [(f"{c}om", f"{c}oms", 1) for c in "fghjklmnpr"]
SEPARATION_DEV = [("lum", "lumed", 100), ("kum", "kums", 1)]
SEPARATION_TEST = [("hum", "humed", 100), ("jum", "jums", 1)]


def make_lexicon(rows: Iterable[Tuple[str, object, str, int]]) -> Lexicon:
    """Lexicon from (lemma, tag, form, count) rows; tags may be strings"""
    entries = []
    for lemma, tag, form, count in rows:
        tag = tag if isinstance(tag, MorphTag) else MorphTag.parse(tag)
        entries.append(LexEntry(lemma, tag, form, count))
    return Lexicon(tuple(entries))


def past_lexicon(rows: Iterable[Tuple[str, str, int]]) -> Lexicon:
    return make_lexicon((lemma, PAST, form, count) for lemma, form, count in rows)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def mini_conllu() -> Path:
    return DATA_DIR / "mini.conllu"


@pytest.fixture
def separation_split() -> DataSplit:
    return DataSplit(
        train=past_lexicon(FREQUENT_TRAIN + RARE_TRAIN),
        dev=past_lexicon(SEPARATION_DEV),
        test=past_lexicon(SEPARATION_TEST),
        provenance=SplitProvenance(config=SplitConfig(), source_digest="synthetic", rng="fixed"),
    )
