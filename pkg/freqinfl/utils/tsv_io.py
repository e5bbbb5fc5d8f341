import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple

from dotenv import dotenv_values

from freqinfl.errors import DataError, LexiconFormatError
from freqinfl.schema import AppConfig, LexEntry, Lexicon, MorphTag, Prediction, SuffixRule

logger = logging.getLogger(__name__)


def _check_field(value: str, what: str) -> str:
    if "\t" in value or "\n" in value or "\r" in value:
        raise LexiconFormatError(f"{what} {value!r} contains a tab or line break")
    return value


def _lines(path: str) -> List[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise DataError(f"file not found: {path}") from e
    except UnicodeDecodeError as e:
        raise LexiconFormatError(f"{path} is not valid UTF-8: {e}") from e
    return text.split("\n")


def _rows(path: str, header: Tuple[str, ...]) -> Iterable[Tuple[int, List[str]]]:
    lines = _lines(path)
    if not lines or lines[0].rstrip("\r").split("\t") != list(header):
        raise LexiconFormatError(f"{path}: expected header {'|'.join(header)}")
    for number, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise LexiconFormatError(f"{path}:{number}: expected {len(header)} columns, got {len(fields)}")
        yield number, fields


def serialize_lexicon(lexicon: Lexicon) -> str:
    lines = ["\t".join(AppConfig.LEXICON_HEADER)]
    for entry in lexicon.entries:
        lines.append("\t".join((
            _check_field(entry.lemma, "lemma"),
            _check_field(str(entry.tag), "tag"),
            _check_field(entry.form, "form"),
            str(entry.count),
        )))
    return "\n".join(lines) + "\n"


def write_lexicon(lexicon: Lexicon, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_lexicon(lexicon))
    logger.info(f"Wrote {lexicon.type_count} entries ({lexicon.token_mass} tokens) to {path}")


def read_lexicon(path: str) -> Lexicon:
    entries = []
    for number, (lemma, tag, form, count) in _rows(path, AppConfig.LEXICON_HEADER):
        try:
            entries.append(LexEntry(lemma, MorphTag.parse(tag), form, int(count)))
        except ValueError as e:
            raise LexiconFormatError(f"{path}:{number}: bad count {count!r}") from e
        except LexiconFormatError as e:
            raise LexiconFormatError(f"{path}:{number}: {e}") from e
    return Lexicon(tuple(entries))


def write_predictions(predictions: Iterable[Prediction], path: str) -> None:
    lines = ["\t".join(AppConfig.PREDICTION_HEADER)]
    for p in sorted(predictions, key=lambda p: (p.lemma, str(p.tag), p.predicted_form)):
        lines.append("\t".join((p.lemma, str(p.tag), _check_field(p.predicted_form, "prediction"))))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_predictions(path: str) -> List[Prediction]:
    return [Prediction(lemma, MorphTag.parse(tag), form)
            for _, (lemma, tag, form) in _rows(path, AppConfig.PREDICTION_HEADER)]


def write_rules(rules: Iterable[SuffixRule], path: str, meta: Mapping[str, object]) -> None:
    """Model TSV; training metadata travels as leading ``#`` comment lines"""
    lines = [f"# {key}={value}" for key, value in sorted(meta.items())]
    lines.append("\t".join(AppConfig.MODEL_HEADER))
    for rule in sorted(rules, key=lambda r: (str(r.tag), r.lemma_suffix, r.form_suffix)):
        lines.append("\t".join((str(rule.tag), rule.lemma_suffix, rule.form_suffix, repr(float(rule.vote)))))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_rules(path: str) -> Tuple[List[SuffixRule], Dict[str, str]]:
    lines = _lines(path)
    meta: Dict[str, str] = {}
    start = 0
    while start < len(lines) and lines[start].startswith("#"):
        key, _, value = lines[start][1:].strip().partition("=")
        meta[key] = value
        start += 1
    header = lines[start].split("\t") if start < len(lines) else []
    if header != list(AppConfig.MODEL_HEADER):
        raise LexiconFormatError(f"{path}: expected header {'|'.join(AppConfig.MODEL_HEADER)}")
    rules = []
    for number, line in enumerate(lines[start + 1:], start=start + 2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise LexiconFormatError(f"{path}:{number}: expected 4 columns, got {len(fields)}")
        tag, lemma_suffix, form_suffix, vote = fields
        rules.append(SuffixRule(MorphTag.parse(tag), lemma_suffix, form_suffix, float(vote)))
    return rules, meta


def write_records(values: Mapping[str, object], path: str) -> None:
    """Line-delimited key="value" file, keys sorted; values are quoted so `#` and `$` survive"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key in sorted(values):
            value = _check_field(str(values[key]), key).replace("\\", "\\\\").replace('"', '\\"')
            f.write(f'{key}="{value}"\n')


def read_records(path: str) -> Dict[str, str]:
    if not Path(path).is_file():
        raise DataError(f"file not found: {path}")
    return {key: value or "" for key, value in dotenv_values(path, interpolate=False).items()}
