import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from freqinfl.errors import UsageError
from freqinfl.schema import AppConfig, ModelKind, SelectionMetric, TrainingMode

logger = logging.getLogger(__name__)

ENV_PREFIX = "FREQINFL_"


class FilterConfig(BaseModel):
    """Token filters applied while lexicalizing"""
    model_config = ConfigDict(frozen=True)

    lowercase: bool = False
    drop_upos: FrozenSet[str] = frozenset()

    @field_validator("drop_upos", mode="before")
    @classmethod
    def _split_upos(cls, value: Any) -> Any:
        if isinstance(value, str):
            return frozenset(part.strip() for part in value.split(",") if part.strip())
        return value


class SplitConfig(BaseModel):
    """Train/dev/test fractions (token mass) and the split seed"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    train_fraction: Fraction = AppConfig.RATIOS[0]
    dev_fraction: Fraction = AppConfig.RATIOS[1]
    test_fraction: Fraction = AppConfig.RATIOS[2]
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @field_validator("train_fraction", "dev_fraction", "test_fraction", mode="before")
    @classmethod
    def _to_fraction(cls, value: Any) -> Fraction:
        try:
            return Fraction(str(value)) if not isinstance(value, Fraction) else value
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e

    @model_validator(mode="after")
    def _check_fractions(self) -> "SplitConfig":
        fractions = self.fractions
        if any(f <= 0 for f in fractions):
            raise ValueError(f"split fractions must be positive, got {fractions}")
        if sum(fractions) != 1:
            raise ValueError(f"split fractions must sum to exactly 1, got {sum(fractions)}")
        return self

    @property
    def fractions(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.train_fraction, self.dev_fraction, self.test_fraction)

    @classmethod
    def from_ratios(cls, ratios: str, seed: int = 0) -> "SplitConfig":
        """Build from a ``8:1:1`` style string"""
        try:
            parts = [Fraction(part.strip()) for part in ratios.split(":")]
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"cannot parse ratios {ratios!r}") from e
        if len(parts) != 3 or sum(parts) <= 0:
            raise UsageError(f"ratios must have three positive parts, got {ratios!r}")
        total = sum(parts)
        return build(cls, train_fraction=parts[0] / total, dev_fraction=parts[1] / total,
                     test_fraction=parts[2] / total, seed=seed)

    def ratios_text(self) -> str:
        return ":".join(str(f) for f in self.fractions)


class ExperimentConfig(BaseModel):
    """Everything one language's sweep needs"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    language: str = "und"
    treebanks: Tuple[str, ...] = ()
    split: SplitConfig = SplitConfig()
    filters: FilterConfig = FilterConfig()
    temperatures: Tuple[float, ...] = AppConfig.TEMPERATURES
    model: ModelKind = ModelKind.RULES
    mode: TrainingMode = TrainingMode.EXPECTATION
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    seeds: Tuple[int, ...] = (0,)
    batch_size: int = Field(default=AppConfig.BATCH_SIZE, ge=1)
    epochs: int = Field(default=AppConfig.EPOCHS, ge=1)
    rule_context: int = Field(default=AppConfig.RULE_CONTEXT, ge=0)
    select_by: SelectionMetric = SelectionMetric.TOKEN
    output_dir: Optional[str] = None

    @field_validator("temperatures", mode="before")
    @classmethod
    def _parse_temperatures(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        return value

    @field_validator("seeds", "treebanks", mode="before")
    @classmethod
    def _parse_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(part.strip() for part in value.split(",") if part.strip())
        return value

    @field_validator("temperatures")
    @classmethod
    def _dedupe_temperatures(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("temperature list must not be empty")
        unique: List[float] = []
        for tau in value:
            tau = float(tau) + 0.0  # folds -0.0 into 0.0
            if tau != tau or tau in (float("inf"), float("-inf")):
                raise ValueError(f"temperature must be finite, got {tau}")
            if tau not in unique:
                unique.append(tau)
        return tuple(unique)

    @field_validator("seeds")
    @classmethod
    def _need_seed(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("at least one seed is required")
        return tuple(dict.fromkeys(int(seed) for seed in value))

    def draws_per_fit(self, token_mass: int) -> int:
        """Sampled mode budget: epochs of ceil(M_T / batch_size) batches"""
        batches = -(-token_mass // self.batch_size)
        return self.epochs * batches * self.batch_size


def build(config_cls: type, /, **values: Any) -> Any:
    """Instantiate a config model, turning validation failures into usage errors"""
    try:
        return config_cls(**values)
    except ValidationError as e:
        raise UsageError(f"invalid {config_cls.__name__}: {e}") from e


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """Read a line-oriented key=value file; keys use underscores (``drop_upos=PUNCT``)"""
    if not path:
        return {}
    if not Path(path).is_file():
        raise UsageError(f"config file not found: {path}")
    values = {key.strip().replace("-", "_"): value
              for key, value in dotenv_values(path, interpolate=False).items() if value is not None}
    logger.info(f"Loaded {len(values)} setting(s) from {path}")
    return values


def environment_values(keys: Optional[List[str]] = None) -> Dict[str, str]:
    """``FREQINFL_<KEY>`` environment variables, lower-cased to config keys"""
    found = {}
    for name, value in os.environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            if keys is None or key in keys:
                found[key] = value
    return found


def merge_settings(defaults: Mapping[str, Any], *layers: Mapping[str, Any]) -> Dict[str, Any]:
    """Later layers win; ``None`` never overrides a value"""
    merged = dict(defaults)
    for layer in layers:
        merged.update({key: value for key, value in layer.items() if value is not None})
    return merged
