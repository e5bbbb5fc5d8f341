"""Frequency-weighted, lemma-disjoint train/dev/test splitting.

Train lemmas are drawn one whole lemma group at a time with probability
proportional to the group's token mass among the groups still available,
until the train mass first reaches its target. Dev lemmas are then drawn
uniformly from the rest until the dev mass reaches its target, and every
remaining lemma goes to test. Targets are fractions of the total token mass
and overshoot is kept.
"""
import logging
from fractions import Fraction
from itertools import groupby
from typing import Dict, List, Optional, Tuple

import numpy as np

from freqinfl.config import SplitConfig
from freqinfl.errors import EmptyInputError, InsufficientLemmasError, LexiconFormatError
from freqinfl.schema import AppConfig, DataSplit, LemmaGroup, Lexicon, SplitProvenance
from freqinfl.utils.file_discovery import compute_bytes_hash
from freqinfl.utils.tsv_io import read_lexicon, read_records, serialize_lexicon, write_lexicon, write_records

logger = logging.getLogger(__name__)

MIN_GROUPS = 3


def group_by_lemma(lexicon: Lexicon) -> List[LemmaGroup]:
    """One group per lemma, in lemma order"""
    if not lexicon.entries:
        raise EmptyInputError("cannot group an empty lexicon")
    groups = [LemmaGroup(lemma, tuple(entries))
              for lemma, entries in groupby(lexicon.entries, key=lambda entry: entry.lemma)]
    assert sum(group.mass for group in groups) == lexicon.token_mass
    return groups


def lexicon_digest(lexicon: Lexicon) -> str:
    return compute_bytes_hash(serialize_lexicon(lexicon).encode("utf-8"))


def _draw_until(
    rng: np.random.Generator,
    masses: np.ndarray,
    available: List[int],
    target: Fraction,
    weighted: bool,
) -> Tuple[List[int], int]:
    """Draw group indices without replacement until their mass reaches ``target``

    ``available`` is consumed in place. Each draw picks among the groups still
    available, ∝ mass when ``weighted`` and uniformly otherwise.
    """
    drawn: List[int] = []
    mass = 0
    while available and mass < target:
        if weighted:
            cumulative = np.cumsum(masses[available])
            position = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
            position = min(position, len(available) - 1)
        else:
            position = int(rng.integers(len(available)))
        index = available.pop(position)
        drawn.append(index)
        mass += int(masses[index])
    return drawn, mass


def split_lexicon(lexicon: Lexicon, config: Optional[SplitConfig] = None) -> DataSplit:
    config = config or SplitConfig()
    groups = group_by_lemma(lexicon)
    if len(groups) < MIN_GROUPS:
        raise InsufficientLemmasError(f"need at least {MIN_GROUPS} lemmas to split, got {len(groups)}")

    total = lexicon.token_mass
    masses = np.array([group.mass for group in groups], dtype=np.int64)
    rng = np.random.default_rng(config.seed)
    available = list(range(len(groups)))

    train_target = config.train_fraction * total
    dev_target = config.dev_fraction * total
    train_idx, train_mass = _draw_until(rng, masses, available, train_target, weighted=True)
    dev_idx, dev_mass = _draw_until(rng, masses, available, dev_target, weighted=False)
    test_idx = available

    warnings = []
    heaviest = max(train_idx, key=lambda i: groups[i].mass)
    if groups[heaviest].mass >= train_target:
        warnings.append(f"train overshoot: lemma {groups[heaviest].lemma!r} of mass {groups[heaviest].mass} "
                        f"alone reaches the train target {float(train_target):.1f}")
    if not dev_idx:
        warnings.append("dev split is empty")
    if not test_idx:
        warnings.append("test split is empty")
    for warning in warnings:
        logger.warning(warning)

    def collect(indices: List[int]) -> Lexicon:
        return Lexicon(tuple(entry for i in indices for entry in groups[i].entries))

    split = DataSplit(
        train=collect(train_idx),
        dev=collect(dev_idx),
        test=collect(test_idx),
        provenance=SplitProvenance(
            config=config,
            source_digest=lexicon_digest(lexicon),
            rng=f"{AppConfig.RNG_NAME} numpy=={np.__version__}",
            warnings=tuple(warnings),
        ),
    )
    assert split.train.token_mass + split.dev.token_mass + split.test.token_mass == total
    logger.info(f"Split {len(groups)} lemmas (seed {config.seed}): train {train_mass}, dev {dev_mass}, "
                f"test {split.test.token_mass} of {total} tokens")
    return split


def split_metadata(split: DataSplit) -> Dict[str, object]:
    provenance = split.provenance
    config = provenance.config
    meta: Dict[str, object] = {
        "seed": config.seed,
        "fractions": config.ratios_text(),
        "source_digest": provenance.source_digest,
        "rng": provenance.rng,
        "dev_target_unit": "token_mass",
        "warnings": "; ".join(provenance.warnings),
    }
    for name, part in split.parts().items():
        meta[f"{name}_mass"] = part.token_mass
        meta[f"{name}_types"] = part.type_count
        meta[f"{name}_lemmas"] = len(part.lemmas)
    return meta


def write_split(split: DataSplit, out_dir: str) -> None:
    for name, part in split.parts().items():
        write_lexicon(part, f"{out_dir}/{AppConfig.SPLIT_FILES[name]}")
    write_records(split_metadata(split), f"{out_dir}/{AppConfig.SPLIT_META}")


def read_split(split_dir: str) -> DataSplit:
    """Load a split directory written by ``write_split``"""
    parts = {name: read_lexicon(f"{split_dir}/{file_name}") for name, file_name in AppConfig.SPLIT_FILES.items()}
    meta = read_records(f"{split_dir}/{AppConfig.SPLIT_META}")
    config = SplitConfig.from_ratios(meta.get("fractions", "8:1:1"), seed=int(meta.get("seed", 0)))
    warnings = tuple(w for w in meta.get("warnings", "").split("; ") if w)
    provenance = SplitProvenance(config=config, source_digest=meta.get("source_digest", ""),
                                 rng=meta.get("rng", ""), warnings=warnings)
    for name, part in parts.items():
        if str(part.token_mass) != meta.get(f"{name}_mass", str(part.token_mass)):
            raise LexiconFormatError(f"{split_dir}: {name} mass {part.token_mass} disagrees with {AppConfig.SPLIT_META}")
    return DataSplit(provenance=provenance, **parts)
