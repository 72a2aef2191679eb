from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class LexiconEntry(BaseModel):
    conj_type: str
    pos_coarse: str
    count: int = Field(..., ge=1)

    class Config:
        frozen = True


class LemmaLexicon(BaseModel):
    """lemma -> conjugation types observed on predicates, most frequent first."""

    entries: Dict[str, List[LexiconEntry]] = {}

    class Config:
        allow_mutation = False

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def candidates(self, lemma: str, pos: Optional[str] = None) -> List[LexiconEntry]:
        found = self.entries.get(lemma, [])
        if pos is None:
            return list(found)
        return [entry for entry in found if entry.pos_coarse == pos]


def sort_entries(entries: List[LexiconEntry]) -> List[LexiconEntry]:
    return sorted(entries, key=lambda e: (-e.count, e.conj_type, e.pos_coarse))
