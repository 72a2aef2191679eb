import logging
from collections import Counter
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, TextIO, Tuple

from app.models.errors import DataError, EmptyCorpus
from app.models.morpheme import AnalyzedSentence
from app.models.token import FACTOR_SEPARATOR, Scheme, Token
from app.models.vocab import (
    DEFAULT_RESERVED, CompressionReport, CoverageReport, SchemeSummary, Vocabulary,
)
from app.services.encode import encode_factors, encode_tokens, is_predicate

logger = logging.getLogger(__name__)

FACTOR_HEADER_PREFIX = "# factors:"


def is_special(token: str, scheme: Scheme = Scheme.conj_token) -> bool:
    # baseline surfaces and factor lemmas are never special, whatever they look like
    return scheme.is_token_scheme and not Token.parse(token).is_word


def corpus_tokens(lines: Iterable[str], scheme: Scheme) -> Iterator[str]:
    """Running tokens of an encoded corpus file; factor lines contribute the lemma factor."""
    for line in lines:
        line = line.rstrip("\r\n")
        if scheme == Scheme.conj_feature:
            if line.startswith(FACTOR_HEADER_PREFIX):
                continue
            for position in line.split(" "):
                if position:
                    yield position.split(FACTOR_SEPARATOR, 1)[0]
        else:
            yield from (t for t in line.split(" ") if t)


def scheme_tokens(s: AnalyzedSentence, scheme: Scheme) -> List[str]:
    if scheme == Scheme.baseline:
        return s.surfaces
    if scheme == Scheme.conj_feature:
        return [b.lemma for b in encode_factors(s)]
    return [t.serialize() for t in encode_tokens(s, scheme)]


def count_tokens(tokens: Iterable[str]) -> Counter:
    return Counter(tokens)


def build_vocab(counts: Dict[str, int], size_limit: int,
                reserved: Sequence[str] = DEFAULT_RESERVED) -> Vocabulary:
    """Top (size_limit - reserved) tokens by count desc, then token asc."""
    if size_limit <= len(reserved):
        raise ValueError("size_limit must exceed the number of reserved symbols")
    ranked = sorted(((t, c) for t, c in counts.items() if c > 0 and t not in reserved),
                    key=lambda tc: (-tc[1], tc[0]))
    if not ranked:
        raise EmptyCorpus("no tokens to build a vocabulary from")
    return Vocabulary(entries=ranked[:size_limit - len(reserved)], size_limit=size_limit,
                      reserved=list(reserved))


def coverage(v: Vocabulary, counts: Dict[str, int], scheme: Scheme) -> CoverageReport:
    def covered(token: str) -> bool:
        return token in v or token in v.reserved

    distinct = len(counts)
    running = sum(counts.values())
    oov_types = sum(1 for t in counts if not covered(t))
    oov_tokens = sum(c for t, c in counts.items() if not covered(t))
    return CoverageReport(
        scheme=scheme,
        type_coverage=(distinct - oov_types) / distinct if distinct else 1.0,
        token_coverage=(running - oov_tokens) / running if running else 1.0,
        distinct_types=distinct,
        oov_types=oov_types,
        running_tokens=running,
        oov_tokens=oov_tokens,
        special_token_count=sum(1 for t in counts if is_special(t, scheme)),
    )


def predicate_types(sentences: Iterable[AnalyzedSentence]) -> Tuple[Set[str], Set[str]]:
    """(distinct predicate surfaces, distinct predicate lemmas)."""
    surfaces: Set[str] = set()
    lemmas: Set[str] = set()
    for s in sentences:
        for m in s.morphemes:
            if is_predicate(m):
                surfaces.add(m.surface)
                lemmas.add(m.lemma)
    return surfaces, lemmas


def compression_ratio(baseline_tokens: Iterable[str], encoded_tokens: Iterable[str],
                      predicates: Optional[Tuple[Set[str], Set[str]]] = None,
                      scheme: Scheme = Scheme.conj_token) -> CompressionReport:
    """
    Distinct-type reduction of an encoded corpus against its baseline.

    Special tokens are counted apart in `special_types` and left out of
    `encoded_types`, so a corpus without predicates has reduction 0.
    """
    baseline = set(baseline_tokens)
    encoded: Set[str] = set()
    special: Set[str] = set()
    for token in encoded_tokens:
        (special if is_special(token, scheme) else encoded).add(token)

    retained = len(encoded) / len(baseline) if baseline else 1.0
    report = CompressionReport(baseline_types=len(baseline), encoded_types=len(encoded),
                               retained=retained, reduction=1.0 - retained,
                               special_types=len(special))
    if predicates is not None:
        surfaces, lemmas = predicates
        p_retained = len(lemmas) / len(surfaces) if surfaces else 1.0
        report.predicate_baseline_types = len(surfaces)
        report.predicate_encoded_types = len(lemmas)
        report.predicate_retained = p_retained
        report.predicate_reduction = 1.0 - p_retained
    return report


def compare_schemes(sentences: Iterable[AnalyzedSentence], vocab_size: int,
                    reserved: Sequence[str] = DEFAULT_RESERVED,
                    schemes: Optional[Sequence[Scheme]] = None) -> List[SchemeSummary]:
    """Coverage and compression of every scheme, counted in one pass over the corpus."""
    schemes = list(schemes or Scheme)
    baseline: Counter = Counter()
    counts = {scheme: baseline if scheme == Scheme.baseline else Counter() for scheme in schemes}
    surfaces: Set[str] = set()
    lemmas: Set[str] = set()
    for s in sentences:
        baseline.update(scheme_tokens(s, Scheme.baseline))
        for scheme in schemes:
            if scheme != Scheme.baseline:
                counts[scheme].update(scheme_tokens(s, scheme))
        for m in s.morphemes:
            if is_predicate(m):
                surfaces.add(m.surface)
                lemmas.add(m.lemma)

    summaries = []
    for scheme in schemes:
        scheme_counts = counts[scheme]
        v = build_vocab(scheme_counts, vocab_size, reserved)
        summaries.append(SchemeSummary(
            scheme=scheme,
            coverage=coverage(v, scheme_counts, scheme),
            compression=compression_ratio(
                baseline, scheme_counts,
                None if scheme == Scheme.baseline else (surfaces, lemmas), scheme),
        ))
        logger.info("%s: %d types, %d running tokens", scheme.value, len(scheme_counts),
                    sum(scheme_counts.values()))
    return summaries


def write_vocab(v: Vocabulary, out: TextIO) -> None:
    for token, count in v.entries:
        out.write(f"{token}\t{count}\n")


def read_vocab(lines: Iterable[str], size_limit: int,
               reserved: Sequence[str] = DEFAULT_RESERVED) -> Vocabulary:
    entries: List[Tuple[str, int]] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        token, tab, count = line.rpartition("\t")
        if not tab or not token:
            raise DataError(f"vocabulary line {lineno}: expected 'token<TAB>count'")
        try:
            entries.append((token, int(count)))
        except ValueError as e:
            raise DataError(f"vocabulary line {lineno}: bad count {count!r}") from e

    limit = size_limit - len(reserved)
    if len(entries) > limit:
        logger.info("vocabulary file holds %d entries; keeping the top %d", len(entries), limit)
        entries = entries[:limit]
    try:
        return Vocabulary(entries=entries, size_limit=size_limit, reserved=list(reserved))
    except ValueError as e:
        raise DataError(str(e).splitlines()[-1].strip()) from e
