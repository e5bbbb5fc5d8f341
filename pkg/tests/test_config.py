from fractions import Fraction

import pytest

from freqinfl.config import (ExperimentConfig, FilterConfig, SplitConfig, build, environment_values, load_config_file,
                             merge_settings)
from freqinfl.errors import UsageError
from freqinfl.schema import AppConfig, SelectionMetric


def test_split_config_defaults():
    config = SplitConfig()
    assert config.fractions == (Fraction(4, 5), Fraction(1, 10), Fraction(1, 10))
    assert config.ratios_text() == "4/5:1/10:1/10"


def test_split_config_from_ratios():
    config = SplitConfig.from_ratios("6:2:2", seed=4)
    assert config.fractions == (Fraction(3, 5), Fraction(1, 5), Fraction(1, 5))
    assert config.seed == 4
    assert SplitConfig.from_ratios(config.ratios_text()).fractions == config.fractions


@pytest.mark.parametrize("ratios", ["8:1", "8:1:x", "8:0:2", "1:1:1:1", "0:0:0"])
def test_split_config_bad_ratios(ratios):
    with pytest.raises(UsageError):
        SplitConfig.from_ratios(ratios)


def test_split_fractions_must_sum_to_one():
    with pytest.raises(UsageError):
        build(SplitConfig, train_fraction="0.8", dev_fraction="0.1", test_fraction="0.2")
    with pytest.raises(UsageError):
        build(SplitConfig, seed=-1)


def test_temperatures_parsed_and_deduplicated():
    config = ExperimentConfig(temperatures="-1,0,-0.0,0.5,0.5,1")
    assert config.temperatures == (-1.0, 0.0, 0.5, 1.0)
    assert str(config.temperatures[1]) == "0.0"
    assert ExperimentConfig().temperatures == AppConfig.TEMPERATURES


@pytest.mark.parametrize("temperatures", ["", "inf", "0,nan", ()])
def test_bad_temperatures(temperatures):
    with pytest.raises(UsageError):
        build(ExperimentConfig, temperatures=temperatures)


def test_seeds_and_enums():
    config = build(ExperimentConfig, seeds="2,0,2", select_by="type", model="copy")
    assert config.seeds == (2, 0)
    assert config.select_by == SelectionMetric.TYPE
    with pytest.raises(UsageError):
        build(ExperimentConfig, seeds="")
    with pytest.raises(UsageError):
        build(ExperimentConfig, model="neural")


def test_draws_per_fit():
    config = ExperimentConfig(batch_size=512, epochs=1)
    assert config.draws_per_fit(310) == 512
    assert ExperimentConfig(batch_size=64, epochs=3).draws_per_fit(130) == 3 * 3 * 64


def test_filter_config_splits_upos():
    assert FilterConfig(drop_upos="PUNCT, SYM").drop_upos == frozenset({"PUNCT", "SYM"})


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# sweep settings\nselect-by=type\ntemperatures=0,0.5\n", encoding="utf-8")
    assert load_config_file(str(path)) == {"select_by": "type", "temperatures": "0,0.5"}
    assert load_config_file(None) == {}
    with pytest.raises(UsageError):
        load_config_file(str(tmp_path / "missing.cfg"))


def test_environment_values(monkeypatch):
    monkeypatch.setenv("FREQINFL_SEED", "5")
    monkeypatch.setenv("FREQINFL_LOG_LEVEL", "debug")
    assert environment_values(["seed"]) == {"seed": "5"}
    assert environment_values()["log_level"] == "debug"


def test_merge_settings_precedence():
    merged = merge_settings({"seed": 0, "model": "rules"}, {"seed": "5"}, {"seed": "7", "model": None})
    assert merged == {"seed": "7", "model": "rules"}


def test_config_file_values_are_not_interpolated(tmp_path, monkeypatch):
    monkeypatch.setenv("TREEBANK_ROOT", "/elsewhere")
    path = tmp_path / "run.cfg"
    path.write_text("treebanks=${TREEBANK_ROOT}/en.conllu\n", encoding="utf-8")
    assert load_config_file(str(path)) == {"treebanks": "${TREEBANK_ROOT}/en.conllu"}
