import logging
from typing import Iterable, Iterator, List, Optional

from app.models.errors import MalformedLine, MissingEOS
from app.models.morpheme import PLACEHOLDER, AnalyzedSentence, Morpheme

logger = logging.getLogger(__name__)

EOS = "EOS"
MIN_FEATURES = 7

# IPADic feature slots
F_POS = 0
F_POS_FINE = 1
F_CONJ_TYPE = 4
F_CONJ_FORM = 5
F_LEMMA = 6


def _slot(value: str) -> Optional[str]:
    return None if value in (PLACEHOLDER, "") else value


def parse_mecab_line(line: str, lineno: Optional[int] = None) -> Morpheme:
    """
    Parse one `surface<TAB>features` line of MeCab/IPADic output.

    Reading and pronunciation (features 8 and 9) are never looked at.
    """
    line = line.rstrip("\r\n")
    surface, tab, rest = line.partition("\t")
    if not tab:
        raise MalformedLine("no tab between surface and features", line, lineno)
    features = rest.split(",")
    if len(features) < MIN_FEATURES:
        raise MalformedLine(
            f"expected at least {MIN_FEATURES} features, got {len(features)}", line, lineno)

    conj_type = _slot(features[F_CONJ_TYPE])
    conj_form = _slot(features[F_CONJ_FORM])
    if (conj_type is None) != (conj_form is None):
        raise MalformedLine("conjugation type and form must both be set or both be *",
                            line, lineno)

    try:
        return Morpheme(
            surface=surface,
            pos_coarse=features[F_POS],
            pos_fine=features[F_POS_FINE] or PLACEHOLDER,
            conj_type=conj_type,
            conj_form=conj_form,
            # unknown words carry "*" as lemma
            lemma=_slot(features[F_LEMMA]) or surface,
        )
    except ValueError as e:
        raise MalformedLine(str(e).splitlines()[-1].strip(), line, lineno) from e


def parse_corpus(lines: Iterable[str]) -> Iterator[AnalyzedSentence]:
    """Yield one sentence per EOS line, in stream order."""
    morphemes: List[Morpheme] = []
    lineno = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if line == EOS:
            yield AnalyzedSentence(morphemes=morphemes)
            morphemes = []
        elif line:
            morphemes.append(parse_mecab_line(line, lineno))
    if morphemes:
        raise MissingEOS(lineno, len(morphemes))


def parse_plain(lines: Iterable[str]) -> Iterator[List[str]]:
    """Pre-tokenized text: one sentence per line, surfaces separated by single spaces."""
    for line in lines:
        yield [word for word in line.rstrip("\r\n").split(" ") if word]


def serialize_surfaces(sentence: AnalyzedSentence) -> str:
    return " ".join(sentence.surfaces)


def filter_by_length(sentences: Iterable[AnalyzedSentence],
                     max_length: Optional[int]) -> Iterator[AnalyzedSentence]:
    """Drop sentences longer than `max_length` morphemes, as done before training."""
    dropped = 0
    for sentence in sentences:
        if max_length is not None and len(sentence.morphemes) > max_length:
            dropped += 1
            continue
        yield sentence
    if dropped:
        logger.info("dropped %d sentence(s) longer than %d morphemes", dropped, max_length)
