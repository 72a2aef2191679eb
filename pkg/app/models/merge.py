from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, PrivateAttr, validator

CONTINUATION = "@@"
END_OF_WORD = "</w>"
MERGE_FILE_VERSION = "0.2"


class MergeTable(BaseModel):
    """Ordered BPE merges; position in `merges` is the merge priority."""

    merges: List[Tuple[str, str]] = []
    continuation: str = CONTINUATION
    end_of_word: str = END_OF_WORD

    _ranks: Dict[Tuple[str, str], int] = PrivateAttr(default_factory=dict)
    _cache: Dict[str, Tuple[str, ...]] = PrivateAttr(default_factory=dict)

    class Config:
        allow_mutation = False

    @validator("merges")
    def merges_are_unique(cls, value):
        seen = set()
        for pair in value:
            if pair in seen:
                raise ValueError(f"merge {pair} appears twice")
            seen.add(pair)
        return value

    def __init__(self, **data):
        super().__init__(**data)
        self._ranks.update({pair: rank for rank, pair in enumerate(self.merges)})

    def __len__(self) -> int:
        return len(self.merges)

    def rank(self, pair: Tuple[str, str]) -> Optional[int]:
        return self._ranks.get(pair)

    def header(self) -> str:
        return (f"#version: {MERGE_FILE_VERSION} "
                f"continuation={self.continuation} end_of_word={self.end_of_word}")
