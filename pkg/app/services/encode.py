import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set

from app.models.errors import TagMapError
from app.models.morpheme import PLACEHOLDER, PREDICATE_POS, AnalyzedSentence, Morpheme
from app.models.token import (
    FACTOR_DIMENSIONS, FACTOR_ORDER, FACTOR_SEPARATOR, RAW_SEPARATOR, FactorBundle,
    Placement, Scheme, TagMap, Token,
)

logger = logging.getLogger(__name__)

FACTOR_ESCAPE = "&#124;"
FORBIDDEN_DISPLAY = ("-", "<", ">", " ", "\t", RAW_SEPARATOR)


def is_predicate(m: Morpheme) -> bool:
    return m.pos_coarse in PREDICATE_POS and m.has_conjugation


def encode_conj_token(s: AnalyzedSentence) -> List[Token]:
    tokens: List[Token] = []
    for m in s.morphemes:
        if is_predicate(m):
            tokens.append(Token.word(m.lemma))
            tokens.append(Token.conj(m.pos_coarse, m.conj_form))
        else:
            tokens.append(Token.word(m.surface))
    return tokens


def encode_pos_tokens(s: AnalyzedSentence, placement: Placement) -> List[Token]:
    """
    Attach a POS token to every word.

    suffix:    word <conj>? <pos>
    prefix:    <pos> <conj>? word
    circumfix: <pos> word <conj>?
    """
    tokens: List[Token] = []
    for m in s.morphemes:
        pos = Token.pos_tag(m.pos_coarse)
        if is_predicate(m):
            word = Token.word(m.lemma)
            conj = [Token.conj(m.pos_coarse, m.conj_form)]
        else:
            word = Token.word(m.surface)
            conj = []

        if placement == Placement.suffix:
            tokens += [word, *conj, pos]
        elif placement == Placement.prefix:
            tokens += [pos, *conj, word]
        else:
            tokens += [pos, word, *conj]
    return tokens


def encode_factors(s: AnalyzedSentence) -> List[FactorBundle]:
    bundles: List[FactorBundle] = []
    for m in s.morphemes:
        predicate = is_predicate(m)
        bundles.append(FactorBundle(
            lemma=m.lemma if predicate else m.surface,
            pos_coarse=m.pos_coarse,
            pos_fine=m.pos_fine,
            conj_form=m.conj_form if predicate else PLACEHOLDER,
        ))
    return bundles


def _factor(value: str) -> str:
    return value.replace(FACTOR_SEPARATOR, FACTOR_ESCAPE)


def serialize_factors(bundles: Iterable[FactorBundle]) -> str:
    return " ".join(
        FACTOR_SEPARATOR.join(_factor(getattr(b, name)) for name in FACTOR_ORDER)
        for b in bundles
    )


def factor_header() -> str:
    dims = " ".join(f"{name}={FACTOR_DIMENSIONS[name]}" for name in FACTOR_ORDER)
    return f"# factors: {FACTOR_SEPARATOR.join(FACTOR_ORDER)} one-hot dims: {dims}"


def serialize_tokens(tokens: Iterable[Token], tag_map: Optional[TagMap] = None) -> str:
    return " ".join(token.serialize(tag_map) for token in tokens)


def encode_tokens(s: AnalyzedSentence, scheme: Scheme) -> List[Token]:
    if scheme == Scheme.conj_token:
        return encode_conj_token(s)
    if scheme.placement is not None:
        return encode_pos_tokens(s, scheme.placement)
    raise ValueError(f"scheme {scheme.value} does not produce a token stream")


def encode_sentence(s: AnalyzedSentence, scheme: Scheme,
                    tag_map: Optional[TagMap] = None) -> str:
    """One output line for `s` under `scheme`."""
    if scheme == Scheme.baseline:
        # surfaces verbatim: baseline output is the source text itself
        return " ".join(s.surfaces)
    if scheme == Scheme.conj_feature:
        return serialize_factors(encode_factors(s))
    return serialize_tokens(encode_tokens(s, scheme), tag_map)


def conj_token_inventory(sentences: Iterable[AnalyzedSentence]) -> Dict[str, Set[str]]:
    """Distinct conjugation tokens seen, grouped by coarse POS."""
    inventory: Dict[str, Set[str]] = {}
    for s in sentences:
        for m in s.morphemes:
            if is_predicate(m):
                inventory.setdefault(m.pos_coarse, set()).add(m.conj_form)
    return inventory


def read_tag_map(lines: Iterable[str]) -> TagMap:
    names: Dict[str, Dict[str, str]] = {"pos": {}, "form": {}}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        row = line.split("\t")
        if len(row) != 3:
            raise TagMapError(f"tag map line {lineno}: expected 3 columns, got {len(row)}")
        kind, name, display = row
        if kind not in names:
            raise TagMapError(f"tag map line {lineno}: unknown kind {kind!r}")
        if not display or any(ch in display for ch in FORBIDDEN_DISPLAY):
            raise TagMapError(f"tag map line {lineno}: display name {display!r} is not usable")
        if name in names[kind]:
            raise TagMapError(f"tag map line {lineno}: {kind} {name} mapped twice")
        if display in names[kind].values():
            raise TagMapError(f"tag map line {lineno}: {kind} display {display!r} is not unique")
        names[kind][name] = display
    return TagMap(pos=names["pos"], form=names["form"])


def load_tag_map(path: Path) -> TagMap:
    with open(path, encoding="utf-8") as f:
        tag_map = read_tag_map(f)
    logger.debug("tag map %s: %d pos, %d form names", path, len(tag_map.pos), len(tag_map.form))
    return tag_map
