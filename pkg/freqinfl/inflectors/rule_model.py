"""Suffix-rewrite rule learner with corpus-frequency-weighted votes.

Every training triple proposes rules "strip lemma_suffix, append
form_suffix" keyed by (tag, lemma_suffix). Each entry votes with its sample
weight count**tau (expectation mode) or once per time it is drawn by the
frequency sampler (sampled mode). The best-voted rule per key wins; at
prediction time the matching rule with the longest lemma_suffix applies.
"""
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import DefaultDict, Dict, List, Optional, Tuple

import numpy as np

from freqinfl import freq_sampler
from freqinfl.errors import EmptyInputError
from freqinfl.inflectors.base import InflectionModel
from freqinfl.schema import AppConfig, Lexicon, ModelKind, MorphTag, SuffixRule, TrainingMode
from freqinfl.utils.tsv_io import read_rules, write_rules

logger = logging.getLogger(__name__)

RuleKey = Tuple[MorphTag, str]


def extract_rule(lemma: str, form: str, context: int = AppConfig.RULE_CONTEXT) -> List[Tuple[str, str]]:
    """Rule suffixes after stripping the longest common prefix, then context variants

    The first pair is the bare rewrite; variant k re-attaches the last k
    characters of the shared prefix to both sides (k = 1..context).
    """
    prefix = os.path.commonprefix([lemma, form])
    p = len(prefix)
    pairs = [(lemma[p:], form[p:])]
    for k in range(1, min(context, p) + 1):
        pairs.append((lemma[p - k:], form[p - k:]))
    return pairs


def _winner(candidates: Dict[str, float]) -> Tuple[str, float]:
    # max vote, then shorter form_suffix, then lexicographically smaller
    form_suffix = min(candidates, key=lambda fs: (-candidates[fs], len(fs), fs))
    return form_suffix, candidates[form_suffix]


@dataclass
class RuleModel:
    rules: Dict[RuleKey, SuffixRule] = field(default_factory=dict)
    training_meta: Dict[str, str] = field(default_factory=dict)
    _by_tag: Dict[MorphTag, Dict[str, SuffixRule]] = field(default_factory=dict, init=False, repr=False)
    _longest: Dict[MorphTag, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for (tag, lemma_suffix), rule in self.rules.items():
            self._by_tag.setdefault(tag, {})[lemma_suffix] = rule
            self._longest[tag] = max(self._longest.get(tag, 0), len(lemma_suffix))

    def rules_for(self, tag: MorphTag) -> Dict[str, SuffixRule]:
        return self._by_tag.get(tag, {})

    def longest_suffix(self, tag: MorphTag) -> int:
        return self._longest.get(tag, 0)

    def save(self, path: str) -> None:
        write_rules(self.rules.values(), path, self.training_meta)

    @classmethod
    def load(cls, path: str) -> "RuleModel":
        rules, meta = read_rules(path)
        return cls({(rule.tag, rule.lemma_suffix): rule for rule in rules}, meta)


def fit_rules(
    train_lexicon: Lexicon,
    tau: float,
    seed: int = 0,
    mode: TrainingMode = TrainingMode.EXPECTATION,
    n_draws: Optional[int] = None,
    context: int = AppConfig.RULE_CONTEXT,
) -> RuleModel:
    if not train_lexicon.entries:
        raise EmptyInputError("cannot fit rules on an empty training lexicon")
    mode = TrainingMode(mode)
    if mode == TrainingMode.EXPECTATION:
        votes_per_entry = freq_sampler.compute_weights(
            train_lexicon.counts, tau, [entry.key for entry in train_lexicon.entries])
    else:
        if n_draws is None:
            batches = -(-train_lexicon.token_mass // AppConfig.BATCH_SIZE)
            n_draws = batches * AppConfig.BATCH_SIZE
        dist = freq_sampler.distribution(train_lexicon, tau)
        votes_per_entry = freq_sampler.draw_counts(dist, n_draws, seed).astype(np.float64)

    votes: DefaultDict[RuleKey, DefaultDict[str, float]] = defaultdict(lambda: defaultdict(float))
    for entry, vote in zip(train_lexicon.entries, votes_per_entry):
        if vote <= 0:
            continue
        for lemma_suffix, form_suffix in extract_rule(entry.lemma, entry.form, context):
            votes[(entry.tag, lemma_suffix)][form_suffix] += float(vote)

    rules = {}
    for (tag, lemma_suffix), candidates in votes.items():
        form_suffix, vote = _winner(candidates)
        rules[(tag, lemma_suffix)] = SuffixRule(tag, lemma_suffix, form_suffix, vote)

    meta = {"temperature": repr(float(tau)), "seed": str(seed), "mode": mode.value, "context": str(context)}
    if mode == TrainingMode.SAMPLED:
        meta["n_draws"] = str(n_draws)
    logger.info(f"Fitted {len(rules)} rules on {train_lexicon.type_count} entries (tau={tau}, mode={mode.value})")
    return RuleModel(rules, meta)


def rule_predict(model: RuleModel, lemma: str, tag: MorphTag) -> str:
    """Apply the most specific matching rule; copy the lemma when none matches"""
    table = model.rules_for(tag)
    if not table:
        return lemma
    for k in range(min(len(lemma), model.longest_suffix(tag)), -1, -1):
        rule = table.get(lemma[len(lemma) - k:])
        if rule is not None:
            return rule.apply(lemma)
    return lemma


class RuleInflector(InflectionModel):
    kind = ModelKind.RULES

    def __init__(self, context: int = AppConfig.RULE_CONTEXT, model: Optional[RuleModel] = None):
        self.context = context
        self.model = model

    def fit(
        self,
        train_lexicon: Lexicon,
        temperature: float = 0.0,
        seed: int = 0,
        mode: TrainingMode = TrainingMode.EXPECTATION,
        n_draws: Optional[int] = None,
    ) -> "RuleInflector":
        self.model = fit_rules(train_lexicon, temperature, seed, mode, n_draws, self.context)
        return self

    def predict(self, lemma: str, tag: MorphTag) -> str:
        if self.model is None:
            return lemma
        return rule_predict(self.model, lemma, tag)
