import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

from app.models.conjugation import ConjugationTable
from app.models.errors import InflectionError, LexiconError
from app.models.lexicon import LemmaLexicon, LexiconEntry, sort_entries
from app.models.morpheme import AnalyzedSentence
from app.models.report import DecodeReport
from app.models.token import Placement, Scheme, TagMap, Token
from app.services.encode import is_predicate
from app.services.inflect import inflect

logger = logging.getLogger(__name__)


# --- LEXICON ---
def build_lexicon(corpus: Iterable[AnalyzedSentence],
                  table: Optional[ConjugationTable] = None) -> LemmaLexicon:
    """Count (lemma, pos, conj_type) over predicates; types unknown to `table` are skipped."""
    counts: Counter = Counter()
    for sentence in corpus:
        for m in sentence.morphemes:
            if is_predicate(m):
                counts[(m.lemma, m.pos_coarse, m.conj_type)] += 1

    entries: Dict[str, List[LexiconEntry]] = {}
    skipped = set()
    for (lemma, pos, conj_type), count in counts.items():
        if table is not None and not table.forms_of(conj_type):
            skipped.add(conj_type)
            continue
        entries.setdefault(lemma, []).append(
            LexiconEntry(conj_type=conj_type, pos_coarse=pos, count=count))
    for conj_type in sorted(skipped):
        logger.warning("conjugation type %s is not in the table; left out of the lexicon", conj_type)
    return LemmaLexicon(entries={lemma: sort_entries(e) for lemma, e in sorted(entries.items())})


def write_lexicon(lex: LemmaLexicon, out: TextIO) -> None:
    for lemma, entries in lex.entries.items():
        for e in entries:
            out.write(f"{lemma}\t{e.pos_coarse}\t{e.conj_type}\t{e.count}\n")


def read_lexicon(lines: Iterable[str], table: Optional[ConjugationTable] = None) -> LemmaLexicon:
    entries: Dict[str, List[LexiconEntry]] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        row = line.split("\t")
        if len(row) != 4:
            raise LexiconError(f"lexicon line {lineno}: expected 4 columns, got {len(row)}")
        lemma, pos, conj_type, count = row
        if table is not None and not table.forms_of(conj_type):
            raise LexiconError(f"lexicon line {lineno}: {conj_type} is not in the conjugation table")
        try:
            entry = LexiconEntry(conj_type=conj_type, pos_coarse=pos, count=int(count))
        except ValueError as e:
            raise LexiconError(f"lexicon line {lineno}: bad count {count!r}") from e
        entries.setdefault(lemma, []).append(entry)
    return LemmaLexicon(entries={lemma: sort_entries(e) for lemma, e in entries.items()})


def load_lexicon(path: Path, table: Optional[ConjugationTable] = None) -> LemmaLexicon:
    with open(path, encoding="utf-8") as f:
        lex = read_lexicon(f, table)
    logger.info("lexicon %s: %d lemmas", path, len(lex))
    return lex


# --- RESTORATION ---
def parse_tokens(line: str, tag_map: Optional[TagMap] = None) -> List[Token]:
    return [Token.parse(text, tag_map) for text in line.rstrip("\r\n").split(" ") if text]


def _restore(word: str, conj: Token, table: ConjugationTable, lex: LemmaLexicon,
             report: DecodeReport) -> str:
    for entry in lex.candidates(word, conj.pos):
        try:
            surface = inflect(word, entry.conj_type, conj.form, table)
        except InflectionError:
            continue
        report.conj_applied += 1
        report.applied_forms[conj.form] = report.applied_forms.get(conj.form, 0) + 1
        return surface
    logger.debug("no conjugation of %s to (%s, %s); kept plain form", word, conj.pos, conj.form)
    report.plain_fallback += 1
    report.fallback_forms[conj.form] = report.fallback_forms.get(conj.form, 0) + 1
    return word


def _words_then_conj(tokens: List[Token], table: ConjugationTable, lex: LemmaLexicon,
                     report: DecodeReport) -> List[str]:
    # a conj token modifies the word before it
    words: List[str] = []
    pending: Optional[str] = None
    attached = False
    for token in tokens:
        if token.is_word:
            if pending is not None:
                words.append(pending)
            pending, attached = token.text, False
        elif pending is not None:
            words.append(_restore(pending, token, table, lex, report))
            pending, attached = None, True
        elif attached:
            report.extra_conj_deleted += 1
        else:
            report.orphan_conj_deleted += 1
    if pending is not None:
        words.append(pending)
    return words


def _conj_then_words(tokens: List[Token], table: ConjugationTable, lex: LemmaLexicon,
                     report: DecodeReport) -> List[str]:
    # a conj token modifies the word after it; the nearest one wins
    words: List[str] = []
    pending: Optional[Token] = None
    for token in tokens:
        if token.is_conj:
            if pending is not None:
                report.extra_conj_deleted += 1
            pending = token
        elif pending is not None:
            words.append(_restore(token.text, pending, table, lex, report))
            pending = None
        else:
            words.append(token.text)
    if pending is not None:
        report.orphan_conj_deleted += 1
    return words


def decode_conj_token(tokens: List[Token], table: ConjugationTable,
                      lex: LemmaLexicon) -> Tuple[List[str], DecodeReport]:
    report = DecodeReport()
    kept = []
    for token in tokens:
        if token.is_pos:
            report.unexpected_pos_deleted += 1
        else:
            kept.append(token)
    return _words_then_conj(kept, table, lex, report), report


def _pos_in_place(tokens: List[Token], i: int, placement: Placement) -> bool:
    if placement == Placement.suffix:
        return i > 0 and not tokens[i - 1].is_pos
    if i + 1 >= len(tokens):
        return False
    following = tokens[i + 1]
    if placement == Placement.prefix:
        return not following.is_pos
    return following.is_word


def decode_pos_tokens(tokens: List[Token], placement: Placement, table: ConjugationTable,
                      lex: LemmaLexicon) -> Tuple[List[str], DecodeReport]:
    report = DecodeReport()
    kept = []
    for i, token in enumerate(tokens):
        if not token.is_pos:
            kept.append(token)
        elif _pos_in_place(tokens, i, placement):
            report.pos_deleted += 1
        else:
            report.misplaced_pos_deleted += 1

    if placement == Placement.prefix:
        words = _conj_then_words(kept, table, lex, report)
    else:
        words = _words_then_conj(kept, table, lex, report)
    return words, report


def decode_line(line: str, scheme: Scheme, table: ConjugationTable, lex: LemmaLexicon,
                tag_map: Optional[TagMap] = None) -> Tuple[str, DecodeReport]:
    """Restore one encoded line to space-separated surfaces."""
    if scheme == Scheme.baseline:
        words, report = [w for w in line.rstrip("\r\n").split(" ") if w], DecodeReport()
    elif scheme == Scheme.conj_token:
        words, report = decode_conj_token(parse_tokens(line, tag_map), table, lex)
    elif scheme.placement is not None:
        words, report = decode_pos_tokens(parse_tokens(line, tag_map), scheme.placement,
                                          table, lex)
    else:
        raise ValueError(f"scheme {scheme.value} cannot be decoded")
    report.sentences = 1
    return " ".join(words), report
