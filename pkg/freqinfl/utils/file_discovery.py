import hashlib
import logging
import os
from typing import Iterable, List, Optional, Tuple

import fsspec

from freqinfl.errors import DataError
from freqinfl.schema import AppConfig

logger = logging.getLogger(__name__)


def list_files(root: str, suffixes: Optional[Iterable[str]] = None) -> List[str]:
    """Treebank files under ``root`` (or ``root`` itself when it is a file), sorted"""
    suffixes = tuple(suffixes or AppConfig.TREEBANK_SUFFIXES)
    fs, path = fsspec.core.url_to_fs(root)
    if not fs.exists(path):
        raise DataError(f"no such file or directory: {root}")
    if fs.isfile(path):
        return [root]
    file_paths = []
    for dirpath, _, files in fs.walk(path):
        for name in files:
            if name.lower().endswith(suffixes):
                file_paths.append(os.path.join(dirpath, name))
    if not file_paths:
        logger.warning(f"No treebank files found under {root}")
    return sorted(file_paths)


def expand_inputs(inputs: Iterable[str]) -> List[str]:
    paths: List[str] = []
    for item in inputs:
        paths.extend(list_files(item))
    return paths


def compute_file_hash(file_path: str, algo: str = "sha256") -> str:
    h = hashlib.new(algo)
    with fsspec.open(file_path, "rb") as f:
        while chunk := f.read(8192):
            h.update(chunk)
    return h.hexdigest()


def compute_bytes_hash(data: bytes, algo: str = "sha256") -> str:
    return hashlib.new(algo, data).hexdigest()


def detect_duplicates(file_paths: Iterable[str]) -> List[Tuple[str, str]]:
    """Pairs (duplicate, first seen) of byte-identical files"""
    hash_map = {}
    duplicates = []
    for path in file_paths:
        h = compute_file_hash(path)
        if h in hash_map:
            duplicates.append((path, hash_map[h]))
        else:
            hash_map[h] = path
    return duplicates


def drop_duplicates(file_paths: List[str]) -> List[str]:
    """Keep the first of every group of byte-identical files"""
    duplicates = dict(detect_duplicates(file_paths))
    kept = []
    for path in file_paths:
        if path in duplicates and path not in kept and duplicates[path] in kept:
            logger.warning(f"Skipping {path}: identical to {duplicates[path]}")
            continue
        if path in kept:
            logger.warning(f"Skipping {path}: listed twice")
            continue
        kept.append(path)
    return kept
