import logging
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from app.models.conjugation import PLAIN_FORM, ConjugationRule, ConjugationTable, FormGroup
from app.models.errors import (
    BadRuleRow, DuplicateRule, LemmaMismatch, MissingPlainForm, UnknownConjugation,
)
from app.models.morpheme import AnalyzedSentence, Morpheme
from app.models.report import RoundtripReport, TypeCoverage
from app.services.encode import is_predicate

logger = logging.getLogger(__name__)

RULE_COLUMNS = 5


def _rows(lines: Iterable[str]) -> Iterator[Tuple[int, List[str]]]:
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def read_lemma_endings(lines: Iterable[str]) -> Dict[str, str]:
    endings: Dict[str, str] = {}
    for lineno, row in _rows(lines):
        if len(row) > 2:
            raise BadRuleRow(f"lemma endings line {lineno}: expected 2 columns, got {len(row)}")
        conj_type = row[0]
        if conj_type in endings:
            raise DuplicateRule(f"lemma endings line {lineno}: {conj_type} declared twice")
        endings[conj_type] = row[1] if len(row) == 2 else ""
    return endings


def read_form_groups(lines: Iterable[str]) -> List[FormGroup]:
    groups: Dict[Tuple[str, str], List[str]] = {}
    for lineno, row in _rows(lines):
        if len(row) != 3:
            raise BadRuleRow(f"form groups line {lineno}: expected 3 columns, got {len(row)}")
        conj_type, cell, conj_form = row
        groups.setdefault((conj_type, cell), []).append(conj_form)
    return [FormGroup(conj_type=t, cell=c, conj_forms=forms) for (t, c), forms in groups.items()]


def read_rules(lines: Iterable[str]) -> List[ConjugationRule]:
    rules: List[ConjugationRule] = []
    seen: Dict[Tuple[str, str, int], int] = {}
    for lineno, row in _rows(lines):
        if len(row) != RULE_COLUMNS:
            raise BadRuleRow(f"rules line {lineno}: expected {RULE_COLUMNS} columns, got {len(row)}")
        conj_type, conj_form, strip, append, rank = row
        if not conj_type or not conj_form:
            raise BadRuleRow(f"rules line {lineno}: empty conjugation type or form")
        try:
            rule = ConjugationRule(conj_type=conj_type, conj_form=conj_form, strip=strip,
                                   append=append, variant_rank=int(rank))
        except ValueError as e:
            raise BadRuleRow(f"rules line {lineno}: bad variant rank {rank!r}") from e
        if rule.key in seen:
            raise DuplicateRule(
                f"rules line {lineno}: {rule.key} already defined on line {seen[rule.key]}")
        seen[rule.key] = lineno
        rules.append(rule)
    return rules


def build_table(rules: List[ConjugationRule], lemma_endings: Dict[str, str],
                form_groups: Optional[List[FormGroup]] = None) -> ConjugationTable:
    """Check every table invariant eagerly and return the immutable table."""
    table = ConjugationTable(rules=rules, lemma_endings=lemma_endings,
                             form_groups=form_groups or [])
    for conj_type in table.conj_types:
        if conj_type not in lemma_endings:
            raise BadRuleRow(f"{conj_type}: no lemma ending declared")
        ending = lemma_endings[conj_type]
        plain = table.rules_for(conj_type, PLAIN_FORM)
        if not plain or plain[0].variant_rank != 0 or not plain[0].is_identity:
            raise MissingPlainForm(f"{conj_type}: no identity {PLAIN_FORM} rule")
        for conj_form in table.forms_of(conj_type):
            variants = table.rules_for(conj_type, conj_form)
            if variants[0].variant_rank != 0:
                raise BadRuleRow(f"({conj_type}, {conj_form}) has no variant_rank 0 rule")
            for rule in variants:
                if not ending.endswith(rule.strip):
                    raise BadRuleRow(
                        f"({conj_type}, {conj_form}) strips {rule.strip!r}, "
                        f"which lemma ending {ending!r} does not end with")
    logger.debug("conjugation table: %d rules over %d types", len(rules), len(table.conj_types))
    return table


def load_table(rules_path: Path, lemma_endings_path: Path,
               form_groups_path: Optional[Path] = None) -> ConjugationTable:
    with open(rules_path, encoding="utf-8") as f:
        rules = read_rules(f)
    with open(lemma_endings_path, encoding="utf-8") as f:
        endings = read_lemma_endings(f)
    groups = None
    if form_groups_path is not None:
        with open(form_groups_path, encoding="utf-8") as f:
            groups = read_form_groups(f)
    return build_table(rules, endings, groups)


def _rewrite(lemma: str, rule: ConjugationRule, table: ConjugationTable) -> str:
    ending = table.lemma_endings.get(rule.conj_type, "")
    if not lemma.endswith(ending) or not lemma.endswith(rule.strip):
        raise LemmaMismatch(lemma, rule.conj_type, ending)
    stem = lemma[:len(lemma) - len(rule.strip)]
    return stem + rule.append


def inflect(lemma: str, conj_type: str, conj_form: str, table: ConjugationTable) -> str:
    rules = table.rules_for(conj_type, conj_form)
    if not rules:
        raise UnknownConjugation(conj_type, conj_form)
    return _rewrite(lemma, rules[0], table)


def inflect_variants(lemma: str, conj_type: str, conj_form: str,
                     table: ConjugationTable) -> List[str]:
    """
    All surfaces for an analyzer key in variant_rank order, or for a paradigm
    cell name (irrealis, imperative, ...) in form-group order.
    """
    if (conj_type, conj_form) in table:
        forms = [conj_form]
    elif table.is_cell(conj_form):
        forms = table.cell_forms(conj_type, conj_form)
    else:
        forms = []
    if not forms:
        raise UnknownConjugation(conj_type, conj_form)

    surfaces: List[str] = []
    for form in forms:
        for rule in table.rules_for(conj_type, form):
            surface = _rewrite(lemma, rule, table)
            if surface not in surfaces:
                surfaces.append(surface)
    return surfaces


def paradigm(lemma: str, conj_type: str, table: ConjugationTable) -> List[Tuple[str, str]]:
    """(conj_form, surface) for every form of the type, in table order."""
    forms = table.forms_of(conj_type)
    if not forms:
        raise UnknownConjugation(conj_type, PLAIN_FORM)
    return [(form, inflect(lemma, conj_type, form, table)) for form in forms]


def check_roundtrip(m: Morpheme, table: ConjugationTable,
                    reported_gaps: Optional[Set[Tuple[str, str]]] = None) -> bool:
    """True when the table rebuilds the surface; gaps already in `reported_gaps` are not logged."""
    if not m.has_conjugation:
        return False
    try:
        return inflect(m.lemma, m.conj_type, m.conj_form, table) == m.surface
    except UnknownConjugation as e:
        gap = (e.conj_type, e.conj_form)
        if reported_gaps is None or gap not in reported_gaps:
            if reported_gaps is not None:
                reported_gaps.add(gap)
            logger.warning("conjugation table has no rule for %s; %s not restorable", e, m.surface)
        return False
    except LemmaMismatch as e:
        logger.debug("%s", e)
        return False


def roundtrip_coverage(corpus: Iterable[AnalyzedSentence], table: ConjugationTable,
                       report: Optional[RoundtripReport] = None) -> RoundtripReport:
    """Per-type fraction of predicates whose surface the table reproduces."""
    report = report or RoundtripReport()
    missing = set(tuple(pair) for pair in report.missing_pairs)
    # gaps carried in by the report were warned about when it first saw them
    reported = set(missing)
    for sentence in corpus:
        for m in sentence.morphemes:
            if not is_predicate(m):
                continue
            coverage = report.by_type.setdefault(m.conj_type, TypeCoverage(conj_type=m.conj_type))
            coverage.checked += 1
            report.predicates += 1
            if (m.conj_type, m.conj_form) not in table:
                missing.add((m.conj_type, m.conj_form))
            if check_roundtrip(m, table, reported):
                coverage.restored += 1
                report.predicates_restored += 1
    report.missing_pairs = sorted(missing)
    return report
