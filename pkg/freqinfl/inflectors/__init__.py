from freqinfl.inflectors.base import InflectionModel
from freqinfl.inflectors.copy_model import CopyInflector, copy_predict
from freqinfl.inflectors.rule_model import RuleInflector, RuleModel, extract_rule, fit_rules, rule_predict
from freqinfl.schema import AppConfig, ModelKind


def make_inflector(kind: ModelKind, context: int = AppConfig.RULE_CONTEXT) -> InflectionModel:
    if ModelKind(kind) == ModelKind.COPY:
        return CopyInflector()
    return RuleInflector(context=context)


__all__ = [
    "InflectionModel", "CopyInflector", "RuleInflector", "RuleModel",
    "copy_predict", "extract_rule", "fit_rules", "rule_predict", "make_inflector",
]
