from typing import Iterable, Optional


class FreqInflError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 2

    def with_context(self, context: str) -> "FreqInflError":
        """Prefix the message with e.g. the language being processed"""
        self.args = (f"[{context}] {self.args[0] if self.args else ''}",) + self.args[1:]
        return self


class UsageError(FreqInflError):
    exit_code = 1


class DataError(FreqInflError):
    exit_code = 2


class ConlluParseError(DataError):
    def __init__(self, message: str, source: str, offset: int, line_number: int):
        super().__init__(f"{source}:{line_number} (byte {offset}): {message}")
        self.source = source
        self.offset = offset
        self.line_number = line_number


class ConlluDecodeError(ConlluParseError):
    pass


class EmptyInputError(DataError):
    pass


class InsufficientLemmasError(DataError):
    pass


class LexiconFormatError(DataError):
    pass


class CoverageError(DataError):
    def __init__(self, missing: Iterable[tuple], duplicate: Iterable[tuple]):
        self.missing = sorted(missing)
        self.duplicate = sorted(duplicate)
        parts = []
        if self.missing:
            parts.append(f"{len(self.missing)} missing prediction(s): {_preview(self.missing)}")
        if self.duplicate:
            parts.append(f"{len(self.duplicate)} duplicate prediction(s): {_preview(self.duplicate)}")
        super().__init__("; ".join(parts))


class NumericRangeError(FreqInflError):
    exit_code = 3

    def __init__(self, message: str, entry: Optional[object] = None):
        super().__init__(message if entry is None else f"{message} (entry: {entry})")
        self.entry = entry


def _preview(keys: list, limit: int = 10) -> str:
    shown = ", ".join("/".join(str(part) for part in key) for key in keys[:limit])
    return shown + (" ..." if len(keys) > limit else "")
