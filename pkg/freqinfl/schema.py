from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from freqinfl.errors import LexiconFormatError

if TYPE_CHECKING:
    from freqinfl.config import SplitConfig


EntryKey = Tuple[str, str, str]  # (lemma, serialized tag, form)


class ModelKind(str, Enum):
    """Inflection systems the harness can fit"""
    RULES = "rules"
    COPY = "copy"


class TrainingMode(str, Enum):
    """How corpus-frequency weights reach the rule learner"""
    EXPECTATION = "expectation"
    SAMPLED = "sampled"


class SelectionMetric(str, Enum):
    TOKEN = "token"
    TYPE = "type"


class System(str, Enum):
    """Columns of the test comparison table"""
    COPY = "copy"
    TAU_ZERO = "tau=0.0"
    TAU_HALF = "tau=0.5"
    TAU_BEST = "tau-best"


@dataclass(frozen=True)
class TokenRecord:
    """One syntactic word of a CoNLL-U sentence"""
    form: str
    lemma: str
    upos: str
    feats: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        keys = [key for key, _ in self.feats]
        if len(set(keys)) != len(keys):
            raise LexiconFormatError(f"duplicate feature keys in {self.feats!r}")
        object.__setattr__(self, "feats", tuple(sorted(self.feats)))

    @property
    def tag(self) -> "MorphTag":
        return MorphTag.from_features(self.upos, self.feats)


@dataclass(frozen=True)
class MorphTag:
    """UPOS plus canonical FEATS; serializes as ``UPOS|A=1|B=2`` or ``UPOS|_``"""
    upos: str
    feats: str = "_"

    @classmethod
    def from_features(cls, upos: str, features: Iterable[Tuple[str, str]]) -> "MorphTag":
        pairs = sorted(f"{key}={value}" for key, value in features)
        return cls(upos, "|".join(pairs) if pairs else "_")

    @classmethod
    def parse(cls, text: str) -> "MorphTag":
        upos, sep, feats = text.partition("|")
        if not sep or not upos:
            raise LexiconFormatError(f"malformed tag {text!r}")
        if feats in ("", "_"):
            return cls(upos, "_")
        return cls(upos, "|".join(sorted(feats.split("|"))))

    def __str__(self) -> str:
        return f"{self.upos}|{self.feats}"


@dataclass(frozen=True)
class LexEntry:
    """A lemma-tag-form triple with its corpus occurrence count"""
    lemma: str
    tag: MorphTag
    form: str
    count: int

    def __post_init__(self):
        if not isinstance(self.count, (int, np.integer)) or self.count < 1:
            raise LexiconFormatError(f"count must be a positive integer, got {self.count!r} for {self.key}")
        if not self.lemma or not self.form:
            raise LexiconFormatError(f"empty lemma or form in {self.key}")

    @property
    def key(self) -> EntryKey:
        return (self.lemma, str(self.tag), self.form)

    @property
    def is_identity(self) -> bool:
        return self.form == self.lemma


@dataclass(frozen=True)
class LexiconStats:
    token_mass: int
    type_count: int
    lemma_count: int
    identity_entries: int
    identity_tokens: int
    free_variation_keys: int

    @property
    def identity_type_share(self) -> float:
        return self.identity_entries / self.type_count if self.type_count else 0.0

    @property
    def identity_token_share(self) -> float:
        return self.identity_tokens / self.token_mass if self.token_mass else 0.0


@dataclass(frozen=True)
class Lexicon:
    """Unique lemma-tag-form triples, kept sorted by (lemma, tag, form)"""
    entries: Tuple[LexEntry, ...] = ()
    token_mass: int = field(init=False)
    type_count: int = field(init=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda entry: entry.key))
        for previous, current in zip(ordered, ordered[1:]):
            if previous.key == current.key:
                raise LexiconFormatError(f"duplicate lexicon entry {current.key}")
        object.__setattr__(self, "entries", ordered)
        object.__setattr__(self, "token_mass", sum(int(entry.count) for entry in ordered))
        object.__setattr__(self, "type_count", len(ordered))
        assert self.token_mass == sum(entry.count for entry in self.entries)
        assert self.type_count == len(self.entries)

    @classmethod
    def from_counts(cls, counts: Mapping[EntryKey, int]) -> "Lexicon":
        return cls(tuple(
            LexEntry(lemma, MorphTag.parse(tag), form, int(count))
            for (lemma, tag, form), count in counts.items()
        ))

    def __len__(self) -> int:
        return self.type_count

    def __iter__(self) -> Iterator[LexEntry]:
        return iter(self.entries)

    @property
    def lemmas(self) -> FrozenSet[str]:
        return frozenset(entry.lemma for entry in self.entries)

    @property
    def counts(self) -> List[int]:
        return [int(entry.count) for entry in self.entries]

    def free_variation_keys(self) -> List[Tuple[str, str]]:
        """(lemma, tag) pairs realized by more than one gold form"""
        seen: Dict[Tuple[str, str], int] = {}
        for entry in self.entries:
            pair = (entry.lemma, str(entry.tag))
            seen[pair] = seen.get(pair, 0) + 1
        return sorted(pair for pair, n in seen.items() if n > 1)

    def stats(self) -> LexiconStats:
        identity = [entry for entry in self.entries if entry.is_identity]
        return LexiconStats(
            token_mass=self.token_mass,
            type_count=self.type_count,
            lemma_count=len(self.lemmas),
            identity_entries=len(identity),
            identity_tokens=sum(entry.count for entry in identity),
            free_variation_keys=len(self.free_variation_keys()),
        )


@dataclass(frozen=True)
class LemmaGroup:
    """All entries of one lemma; the unit the splitter moves around"""
    lemma: str
    entries: Tuple[LexEntry, ...]
    mass: int = field(init=False)

    def __post_init__(self):
        if not self.entries:
            raise LexiconFormatError(f"lemma group {self.lemma!r} has no entries")
        if any(entry.lemma != self.lemma for entry in self.entries):
            raise LexiconFormatError(f"lemma group {self.lemma!r} holds a foreign entry")
        object.__setattr__(self, "mass", sum(int(entry.count) for entry in self.entries))


@dataclass(frozen=True)
class SplitProvenance:
    config: "SplitConfig"
    source_digest: str
    rng: str
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DataSplit:
    train: Lexicon
    dev: Lexicon
    test: Lexicon
    provenance: SplitProvenance

    def parts(self) -> Dict[str, Lexicon]:
        return {"train": self.train, "dev": self.dev, "test": self.test}


@dataclass(frozen=True, eq=False)
class SamplingDistribution:
    """Normalized per-entry sampling probabilities under one temperature"""
    entry_ids: Tuple[EntryKey, ...]
    weights: np.ndarray
    probabilities: np.ndarray
    tau: float

    def __len__(self) -> int:
        return len(self.entry_ids)

    def probability_of(self, entry_id: EntryKey) -> float:
        return float(self.probabilities[self.entry_ids.index(entry_id)])


@dataclass(frozen=True)
class Prediction:
    lemma: str
    tag: MorphTag
    predicted_form: str

    @property
    def key(self) -> Tuple[str, str]:
        return (self.lemma, str(self.tag))


@dataclass(frozen=True)
class EvalOutcome:
    """Paired type/token accuracy of one system on one gold lexicon"""
    item_total: int
    token_total: int
    correct_items: int
    correct_tokens: int
    free_variation_keys: int = 0

    def __post_init__(self):
        if not 0 <= self.correct_items <= self.item_total:
            raise ValueError(f"correct_items {self.correct_items} outside [0, {self.item_total}]")
        if not 0 <= self.correct_tokens <= self.token_total:
            raise ValueError(f"correct_tokens {self.correct_tokens} outside [0, {self.token_total}]")

    @property
    def type_accuracy(self) -> float:
        return self.correct_items / self.item_total if self.item_total else 0.0

    @property
    def token_accuracy(self) -> float:
        return self.correct_tokens / self.token_total if self.token_total else 0.0

    def accuracy(self, metric: SelectionMetric) -> float:
        return self.token_accuracy if metric == SelectionMetric.TOKEN else self.type_accuracy

    @classmethod
    def pooled(cls, outcomes: Iterable["EvalOutcome"]) -> "EvalOutcome":
        """Sum counts across runs on the same gold set (mean accuracy over seeds)"""
        outcomes = list(outcomes)
        return cls(
            item_total=sum(o.item_total for o in outcomes),
            token_total=sum(o.token_total for o in outcomes),
            correct_items=sum(o.correct_items for o in outcomes),
            correct_tokens=sum(o.correct_tokens for o in outcomes),
            free_variation_keys=max((o.free_variation_keys for o in outcomes), default=0),
        )


@dataclass(frozen=True)
class SuffixRule:
    """Rewrite: strip ``lemma_suffix``, append ``form_suffix``"""
    tag: MorphTag
    lemma_suffix: str
    form_suffix: str
    vote: float

    def applies_to(self, lemma: str) -> bool:
        return lemma.endswith(self.lemma_suffix)

    def apply(self, lemma: str) -> str:
        stem = lemma[: len(lemma) - len(self.lemma_suffix)]
        return stem + self.form_suffix


@dataclass(frozen=True)
class CellOutcome:
    """Dev and test scores of one fitted system in one (tau, seed) cell"""
    tau: float
    seed: int
    dev: EvalOutcome
    test: EvalOutcome


@dataclass
class SweepResult:
    language: str
    cells: List[CellOutcome]
    copy_dev: EvalOutcome
    copy_test: EvalOutcome
    tau_best: float
    swept: Tuple[float, ...]
    selection_metric: SelectionMetric = SelectionMetric.TOKEN
    metadata: Dict[str, str] = field(default_factory=dict)

    def taus(self) -> List[float]:
        return sorted({cell.tau for cell in self.cells})

    def seeds(self) -> List[int]:
        return sorted({cell.seed for cell in self.cells})

    def dev_outcome(self, tau: float) -> EvalOutcome:
        return EvalOutcome.pooled(cell.dev for cell in self.cells if cell.tau == tau)

    def test_outcome(self, tau: float) -> EvalOutcome:
        return EvalOutcome.pooled(cell.test for cell in self.cells if cell.tau == tau)

    def system_outcome(self, system: System) -> EvalOutcome:
        if system == System.COPY:
            return self.copy_test
        if system == System.TAU_ZERO:
            return self.test_outcome(0.0)
        if system == System.TAU_HALF:
            return self.test_outcome(0.5)
        return self.test_outcome(self.tau_best)


class AppConfig:
    """Application constants"""

    # Corpus-frequency temperature grid explored by default
    TEMPERATURES = (-1.0, -0.8, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1, 0.0,
                    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.1, 2.0)
    REPORTED_TAUS = (0.0, 0.5)

    # Splitting
    RATIOS = (Fraction(8, 10), Fraction(1, 10), Fraction(1, 10))
    RNG_NAME = "numpy.random.PCG64"

    # Training
    BATCH_SIZE = 512
    EPOCHS = 1
    RULE_CONTEXT = 3
    MAX_WEIGHT_RATIO = 1e300

    # File names
    SPLIT_FILES = {"train": "train.tsv", "dev": "dev.tsv", "test": "test.tsv"}
    SPLIT_META = "split-meta"
    SWEEP_META = "sweep-meta"
    RESULTS_FILE = "results.tsv"
    LEXICON_HEADER = ("lemma", "tag", "form", "count")
    MODEL_HEADER = ("tag", "lemma_suffix", "form_suffix", "vote")
    PREDICTION_HEADER = ("lemma", "tag", "prediction")

    # Treebank discovery
    TREEBANK_SUFFIXES = (".conllu", ".conllu.gz", ".conllu.bz2", ".conllu.xz", ".zip")

    @classmethod
    def split_path_names(cls) -> List[str]:
        return list(cls.SPLIT_FILES.values())

    @classmethod
    def is_treebank(cls, name: str) -> bool:
        return name.lower().endswith(cls.TREEBANK_SUFFIXES)

    @classmethod
    def reported_taus(cls, swept: Optional[Iterable[float]] = None) -> Tuple[float, ...]:
        """Swept temperatures plus the fixed ones the comparison table always reports"""
        taus = set(cls.REPORTED_TAUS)
        taus.update(swept or ())
        return tuple(sorted(taus))
