from typing import List, Optional

from pydantic import BaseModel, Field

from app.models.report import DecodeReport
from app.models.token import Placement, Scheme


class EncodeRequest(BaseModel):
    mecab: str = Field(..., description="MeCab/IPADic output, EOS after every sentence")
    scheme: Scheme = Scheme.conj_token
    placement: Optional[Placement] = None
    ascii_tags: bool = False


class EncodeResponse(BaseModel):
    scheme: Scheme
    lines: List[str]


class DecodeRequest(BaseModel):
    lines: List[str]
    scheme: Scheme = Scheme.conj_token
    placement: Optional[Placement] = None
    ascii_tags: bool = False


class DecodeResponse(BaseModel):
    scheme: Scheme
    sentences: List[str]
    report: DecodeReport


class InflectResponse(BaseModel):
    lemma: str
    conj_type: str
    conj_form: str
    surfaces: List[str]
