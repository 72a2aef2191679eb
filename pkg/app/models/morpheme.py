from typing import List, Optional

from pydantic import BaseModel, root_validator, validator

PREDICATE_POS = ("動詞", "形容詞", "助動詞")
PLACEHOLDER = "*"


class Morpheme(BaseModel):
    """One analyzed word in IPADic layout."""

    surface: str
    pos_coarse: str
    pos_fine: str = PLACEHOLDER
    conj_type: Optional[str] = None
    conj_form: Optional[str] = None
    lemma: str

    class Config:
        frozen = True

    @validator("surface")
    def surface_is_writable(cls, value: str) -> str:
        if not value:
            raise ValueError("surface must be non-empty")
        # token streams are space separated, one sentence per line
        if any(ch in value for ch in "\t\n\r "):
            raise ValueError(f"surface {value!r} contains a separator character")
        return value

    @root_validator(skip_on_failure=True)
    def conjugation_is_paired(cls, values):
        if (values.get("conj_type") is None) != (values.get("conj_form") is None):
            raise ValueError("conj_type and conj_form must be given together")
        return values

    @property
    def has_conjugation(self) -> bool:
        return self.conj_type is not None


class AnalyzedSentence(BaseModel):
    morphemes: List[Morpheme] = []

    class Config:
        frozen = True

    @property
    def surfaces(self) -> List[str]:
        return [m.surface for m in self.morphemes]
