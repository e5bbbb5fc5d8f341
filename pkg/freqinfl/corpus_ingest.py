"""CoNLL-U ingestion: parse treebanks and lexicalize them into counted triples."""
import io
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import BinaryIO, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from conllu.parser import parse_dict_value

from freqinfl.config import FilterConfig
from freqinfl.errors import ConlluDecodeError, ConlluParseError
from freqinfl.schema import Lexicon, TokenRecord
from freqinfl.utils.extractors import extract_streams
from freqinfl.utils.file_discovery import compute_bytes_hash, drop_duplicates, expand_inputs

logger = logging.getLogger(__name__)

Sentence = List[TokenRecord]

FIELDS = ("id", "form", "lemma", "upos", "xpos", "feats", "head", "deprel", "deps", "misc")
N_COLUMNS = len(FIELDS)

NULL_VALUES = ("", "_")


def iter_conllu(stream: BinaryIO, source: str = "<stream>") -> Iterator[Sentence]:
    """Yield sentences lazily; multiword ranges and empty nodes are skipped"""
    block: List[str] = []
    offset = 0
    for line_number, raw in enumerate(stream, start=1):
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ConlluDecodeError(f"invalid UTF-8: {e.reason}", source, offset + e.start, line_number) from e
        text = line.rstrip("\n").rstrip("\r")
        if not text.strip():
            if block:
                yield _parse_block(block)
                block = []
        elif not text.startswith("#"):
            n_columns = len(text.split("\t"))
            if n_columns != N_COLUMNS:
                raise ConlluParseError(
                    f"expected {N_COLUMNS} tab-separated columns, got {n_columns}",
                    source, offset, line_number,
                )
            block.append(text)
        offset += len(raw)
    if block:
        yield _parse_block(block)


def parse_conllu(byte_stream: Union[BinaryIO, bytes], source: str = "<stream>") -> List[Sentence]:
    if isinstance(byte_stream, (bytes, bytearray)):
        byte_stream = io.BytesIO(byte_stream)
    return list(iter_conllu(byte_stream, source))


def _parse_block(lines: List[str]) -> Sentence:
    records = []
    for text in lines:
        token = dict(zip(FIELDS, text.split("\t")))
        token_id = token["id"]
        if "-" in token_id or "." in token_id:
            continue
        feats = parse_dict_value(token["feats"]) or {}
        records.append(TokenRecord(
            form=token["form"],
            lemma=token["lemma"],
            upos=token["upos"],
            feats=tuple(feats.items()),
        ))
    return records


def keep_token(token: TokenRecord, filters: FilterConfig) -> bool:
    if token.form in NULL_VALUES or token.lemma in NULL_VALUES:
        return False
    return token.upos not in filters.drop_upos


def count_triples(sentences: Iterable[Sentence], filters: FilterConfig) -> Counter:
    """Partial count table; tables from different corpora merge by addition"""
    counts: Counter = Counter()
    for sentence in sentences:
        for token in sentence:
            if not keep_token(token, filters):
                continue
            lemma, form = token.lemma, token.form
            if filters.lowercase:
                lemma, form = lemma.lower(), form.lower()
            counts[(lemma, str(token.tag), form)] += 1
    return counts


def merge_counts(tables: Iterable[Counter]) -> Counter:
    merged: Counter = Counter()
    for table in tables:
        merged.update(table)
    return merged


def lexicalize(sentences: Iterable[Sentence], filter_config: Optional[FilterConfig] = None) -> Lexicon:
    return Lexicon.from_counts(count_triples(sentences, filter_config or FilterConfig()))


@dataclass
class SourceSummary:
    name: str
    digest: str
    sentences: int
    tokens: int
    kept: int


@dataclass
class IngestResult:
    lexicon: Lexicon
    sources: List[SourceSummary] = field(default_factory=list)
    filters: FilterConfig = field(default_factory=FilterConfig)

    @property
    def merged(self) -> bool:
        return len(self.sources) > 1

    def metadata(self) -> Dict[str, object]:
        stats = self.lexicon.stats()
        meta: Dict[str, object] = {
            "merged": str(self.merged).lower(),
            "sources": ",".join(s.name for s in self.sources),
            "source_digests": ",".join(s.digest for s in self.sources),
            "sentences": sum(s.sentences for s in self.sources),
            "tokens": sum(s.tokens for s in self.sources),
            "tokens_kept": sum(s.kept for s in self.sources),
            "lowercase": str(self.filters.lowercase).lower(),
            "drop_upos": ",".join(sorted(self.filters.drop_upos)),
            "token_mass": stats.token_mass,
            "type_count": stats.type_count,
            "lemma_count": stats.lemma_count,
            "identity_entries": stats.identity_entries,
            "free_variation_keys": stats.free_variation_keys,
        }
        return meta


def _ingest_document(name: str, data: bytes, filters: FilterConfig) -> Tuple[SourceSummary, Counter]:
    sentences = parse_conllu(data, source=name)
    counts = count_triples(sentences, filters)
    summary = SourceSummary(
        name=name,
        digest=compute_bytes_hash(data),
        sentences=len(sentences),
        tokens=sum(len(s) for s in sentences),
        kept=sum(counts.values()),
    )
    logger.info(f"Parsed {name}: {summary.sentences} sentences, {summary.tokens} tokens, {summary.kept} kept")
    return summary, counts


def ingest_files(inputs: Sequence[str], filters: Optional[FilterConfig] = None, workers: int = 4) -> IngestResult:
    """Parse every treebank concurrently and merge their count tables"""
    filters = filters or FilterConfig()
    paths = drop_duplicates(expand_inputs(inputs))
    documents: List[Tuple[str, bytes]] = []
    for path in paths:
        documents.extend(extract_streams(path))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda doc: _ingest_document(doc[0], doc[1], filters), documents))
    counts = merge_counts(table for _, table in results)
    lexicon = Lexicon.from_counts(counts)
    logger.info(f"Lexicalized {len(documents)} document(s): {lexicon.type_count} types, {lexicon.token_mass} tokens")
    return IngestResult(lexicon=lexicon, sources=[summary for summary, _ in results], filters=filters)
