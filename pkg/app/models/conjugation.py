from typing import Dict, List, Tuple

from pydantic import BaseModel, Field, PrivateAttr

PLAIN_FORM = "基本形"

# paradigm columns, in display order
CELLS = ("irrealis", "continuative", "terminal", "attributive", "hypothetical", "imperative")


class ConjugationRule(BaseModel):
    conj_type: str
    conj_form: str
    strip: str = ""
    append: str = ""
    variant_rank: int = Field(0, ge=0)

    class Config:
        frozen = True

    @property
    def key(self) -> Tuple[str, str, int]:
        return (self.conj_type, self.conj_form, self.variant_rank)

    @property
    def is_identity(self) -> bool:
        return self.strip == self.append


class FormGroup(BaseModel):
    """Ordered analyzer keys shown under one paradigm cell."""

    conj_type: str
    cell: str
    conj_forms: List[str]


class ConjugationTable(BaseModel):
    """Validated suffix-rewrite rules; immutable once loaded."""

    rules: List[ConjugationRule]
    lemma_endings: Dict[str, str]
    form_groups: List[FormGroup] = []

    _index: Dict[Tuple[str, str], List[ConjugationRule]] = PrivateAttr(default_factory=dict)
    _forms: Dict[str, List[str]] = PrivateAttr(default_factory=dict)
    _cells: Dict[Tuple[str, str], List[str]] = PrivateAttr(default_factory=dict)

    class Config:
        allow_mutation = False

    def __init__(self, **data):
        super().__init__(**data)
        for rule in self.rules:
            self._index.setdefault((rule.conj_type, rule.conj_form), []).append(rule)
            forms = self._forms.setdefault(rule.conj_type, [])
            if rule.conj_form not in forms:
                forms.append(rule.conj_form)
        for rules in self._index.values():
            rules.sort(key=lambda r: r.variant_rank)
        for group in self.form_groups:
            self._cells[(group.conj_type, group.cell)] = list(group.conj_forms)

    def __contains__(self, pair: Tuple[str, str]) -> bool:
        return pair in self._index

    @property
    def conj_types(self) -> List[str]:
        return list(self._forms)

    def forms_of(self, conj_type: str) -> List[str]:
        return list(self._forms.get(conj_type, []))

    def rules_for(self, conj_type: str, conj_form: str) -> List[ConjugationRule]:
        return list(self._index.get((conj_type, conj_form), []))

    def cell_forms(self, conj_type: str, cell: str) -> List[str]:
        """Analyzer keys of a paradigm cell for one type; type rows override `*` rows."""
        forms = self._cells.get((conj_type, cell))
        if forms is None:
            forms = self._cells.get(("*", cell), [])
        return [form for form in forms if (conj_type, form) in self._index]

    def is_cell(self, name: str) -> bool:
        return any(cell == name for _, cell in self._cells)
