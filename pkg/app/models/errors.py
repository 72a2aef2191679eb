from typing import Optional


class KatsuyoError(ValueError):
    """Base class for every error raised by the toolkit."""

    category = "error"


# --- DATA ERRORS ---
class DataError(KatsuyoError):
    category = "data"


class MalformedLine(DataError):
    def __init__(self, reason: str, line: str, lineno: Optional[int] = None):
        self.reason = reason
        self.line = line
        self.lineno = lineno
        where = f"line {lineno}" if lineno is not None else "line"
        super().__init__(f"{where}: {reason}: {line!r}")


class MissingEOS(DataError):
    def __init__(self, lineno: int, pending: int):
        self.lineno = lineno
        self.pending = pending
        super().__init__(
            f"stream ended at line {lineno} with {pending} morpheme(s) and no EOS")


class EmptyCorpus(DataError):
    pass


class TableError(DataError):
    pass


class DuplicateRule(TableError):
    pass


class MissingPlainForm(TableError):
    pass


class BadRuleRow(TableError):
    pass


class TagMapError(DataError):
    pass


class LexiconError(DataError):
    pass


class MergeFileError(DataError):
    pass


# --- INFLECTION ERRORS ---
class InflectionError(KatsuyoError):
    category = "data"


class UnknownConjugation(InflectionError):
    def __init__(self, conj_type: str, conj_form: str):
        self.conj_type = conj_type
        self.conj_form = conj_form
        super().__init__(f"no rule for ({conj_type}, {conj_form})")


class LemmaMismatch(InflectionError):
    def __init__(self, lemma: str, conj_type: str, expected: str):
        self.lemma = lemma
        self.conj_type = conj_type
        self.expected = expected
        super().__init__(
            f"lemma {lemma!r} does not end with {expected!r} required by {conj_type}")


# --- RUN ERRORS ---
class ConfigError(KatsuyoError):
    category = "config"


class ThresholdError(KatsuyoError):
    category = "threshold"

    def __init__(self, message: str, metrics: Optional[dict] = None):
        self.metrics = metrics
        super().__init__(message)
