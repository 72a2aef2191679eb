from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, PrivateAttr, root_validator

from app.models.token import Scheme

DEFAULT_RESERVED = ("<unk>", "</s>")


class Vocabulary(BaseModel):
    entries: List[Tuple[str, int]] = []
    size_limit: int = Field(..., ge=1)
    reserved: List[str] = list(DEFAULT_RESERVED)

    _tokens: set = PrivateAttr(default_factory=set)

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def fits_limit(cls, values):
        entries, reserved = values["entries"], values["reserved"]
        if len(entries) > values["size_limit"] - len(reserved):
            raise ValueError("vocabulary exceeds size_limit minus reserved symbols")
        for token, count in entries:
            if count < 1:
                raise ValueError(f"non-positive count for {token!r}")
        keys = [(-count, token) for token, count in entries]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("entries must be ordered by (count desc, token asc)")
        return values

    def __init__(self, **data):
        super().__init__(**data)
        self._tokens.update(token for token, _ in self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self._tokens

    def __len__(self) -> int:
        return len(self.entries)


class CoverageReport(BaseModel):
    scheme: Scheme
    type_coverage: float = Field(..., ge=0.0, le=1.0)
    token_coverage: float = Field(..., ge=0.0, le=1.0)
    distinct_types: int = Field(..., ge=0)
    oov_types: int = Field(..., ge=0)
    running_tokens: int = Field(0, ge=0)
    oov_tokens: int = Field(0, ge=0)
    special_token_count: int = Field(0, ge=0)

    @root_validator(skip_on_failure=True)
    def oov_within_types(cls, values):
        if values["oov_types"] > values["distinct_types"]:
            raise ValueError("oov_types cannot exceed distinct_types")
        return values


class CompressionReport(BaseModel):
    baseline_types: int
    encoded_types: int
    retained: float
    reduction: float
    special_types: int = 0
    predicate_baseline_types: Optional[int] = None
    predicate_encoded_types: Optional[int] = None
    predicate_retained: Optional[float] = None
    predicate_reduction: Optional[float] = None


class SchemeSummary(BaseModel):
    """One row of the side-by-side scheme comparison."""

    scheme: Scheme
    coverage: CoverageReport
    compression: CompressionReport

