from typing import Optional

from freqinfl.inflectors.base import InflectionModel
from freqinfl.schema import Lexicon, ModelKind, MorphTag, TrainingMode


def copy_predict(lemma: str, tag: MorphTag) -> str:
    return lemma


class CopyInflector(InflectionModel):
    """Baseline that copies the input lemma to the output"""

    kind = ModelKind.COPY

    def fit(
        self,
        train_lexicon: Lexicon,
        temperature: float = 0.0,
        seed: int = 0,
        mode: TrainingMode = TrainingMode.EXPECTATION,
        n_draws: Optional[int] = None,
    ) -> "CopyInflector":
        return self

    def predict(self, lemma: str, tag: MorphTag) -> str:
        return copy_predict(lemma, tag)
