import io
import logging
import zipfile
from contextlib import contextmanager
from typing import BinaryIO, Iterator, List, Tuple

import fsspec

logger = logging.getLogger(__name__)


@contextmanager
def open_treebank(file_path: str) -> Iterator[BinaryIO]:
    """Binary stream of one treebank; .gz/.bz2/.xz are decompressed transparently"""
    with fsspec.open(file_path, "rb", compression="infer") as f:
        yield f


def extract_streams(file_path: str) -> List[Tuple[str, bytes]]:
    """(name, raw bytes) for every CoNLL-U document held by ``file_path``

    A plain or compressed file yields one document; a zip archive yields
    each member ending in ``.conllu``, in member-name order.
    """
    if file_path.lower().endswith(".zip"):
        return extract_zip(file_path)
    with open_treebank(file_path) as f:
        return [(file_path, f.read())]


def extract_zip(file_path: str) -> List[Tuple[str, bytes]]:
    documents = []
    with fsspec.open(file_path, "rb") as raw, zipfile.ZipFile(io.BytesIO(raw.read())) as z:
        for name in sorted(z.namelist()):
            if name.lower().endswith(".conllu"):
                documents.append((f"{file_path}!{name}", z.read(name)))
    if not documents:
        logger.warning(f"Archive {file_path} holds no .conllu members")
    return documents
