from abc import ABC, abstractmethod
from typing import Dict, List, Optional

from freqinfl.schema import Lexicon, ModelKind, MorphTag, Prediction, TrainingMode


class InflectionModel(ABC):
    """Maps (lemma, tag) to an inflected form; ``predict`` never fails"""

    kind: ModelKind

    @abstractmethod
    def fit(
        self,
        train_lexicon: Lexicon,
        temperature: float = 0.0,
        seed: int = 0,
        mode: TrainingMode = TrainingMode.EXPECTATION,
        n_draws: Optional[int] = None,
    ) -> "InflectionModel":
        ...

    @abstractmethod
    def predict(self, lemma: str, tag: MorphTag) -> str:
        ...

    def predict_lexicon(self, lexicon: Lexicon) -> List[Prediction]:
        """One prediction per distinct (lemma, tag) of ``lexicon``"""
        seen: Dict[tuple, Prediction] = {}
        for entry in lexicon.entries:
            key = (entry.lemma, str(entry.tag))
            if key not in seen:
                seen[key] = Prediction(entry.lemma, entry.tag, self.predict(entry.lemma, entry.tag))
        return list(seen.values())
