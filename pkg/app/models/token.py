import enum
from typing import Dict, Optional

from pydantic import BaseModel, PrivateAttr

SPECIAL_OPEN = "<"
SPECIAL_CLOSE = ">"
ESCAPE = "\\"
RAW_SEPARATOR = "・"
DISPLAY_SEPARATOR = "-"


# --- ENUMS ---
class TokenKind(str, enum.Enum):
    word = "word"
    conj = "conj"
    pos = "pos"


class Placement(str, enum.Enum):
    suffix = "suffix"
    prefix = "prefix"
    circumfix = "circumfix"


class Scheme(str, enum.Enum):
    baseline = "baseline"
    conj_token = "conj-token"
    conj_feature = "conj-feature"
    pos_suffix = "pos-suffix"
    pos_prefix = "pos-prefix"
    pos_circumfix = "pos-circumfix"

    @property
    def placement(self) -> Optional[Placement]:
        return _PLACEMENTS.get(self)

    @property
    def is_token_scheme(self) -> bool:
        """Schemes whose output is a restorable token stream."""
        return self in (Scheme.conj_token, Scheme.pos_suffix,
                        Scheme.pos_prefix, Scheme.pos_circumfix)

    @classmethod
    def for_placement(cls, placement: Placement) -> "Scheme":
        return {v: k for k, v in _PLACEMENTS.items()}[placement]


_PLACEMENTS = {
    Scheme.pos_suffix: Placement.suffix,
    Scheme.pos_prefix: Placement.prefix,
    Scheme.pos_circumfix: Placement.circumfix,
}


class TagMap(BaseModel):
    """Presentation mapping from IPADic names to ASCII display names."""

    pos: Dict[str, str] = {}
    form: Dict[str, str] = {}

    _pos_inverse: Dict[str, str] = PrivateAttr(default_factory=dict)
    _form_inverse: Dict[str, str] = PrivateAttr(default_factory=dict)

    class Config:
        allow_mutation = False

    def __init__(self, **data):
        super().__init__(**data)
        self._pos_inverse.update({v: k for k, v in self.pos.items()})
        self._form_inverse.update({v: k for k, v in self.form.items()})

    def show_pos(self, name: str) -> str:
        return self.pos.get(name, name)

    def show_form(self, name: str) -> str:
        return self.form.get(name, name)

    def read_pos(self, display: str) -> str:
        return self._pos_inverse.get(display, display)

    def read_form(self, display: str) -> str:
        return self._form_inverse.get(display, display)


class Token(BaseModel):
    kind: TokenKind
    text: str = ""
    pos: str = ""
    form: str = ""

    class Config:
        frozen = True

    @classmethod
    def word(cls, text: str) -> "Token":
        return cls(kind=TokenKind.word, text=text)

    @classmethod
    def conj(cls, pos: str, form: str) -> "Token":
        return cls(kind=TokenKind.conj, pos=pos, form=form)

    @classmethod
    def pos_tag(cls, pos: str) -> "Token":
        return cls(kind=TokenKind.pos, pos=pos)

    @property
    def is_word(self) -> bool:
        return self.kind == TokenKind.word

    @property
    def is_conj(self) -> bool:
        return self.kind == TokenKind.conj

    @property
    def is_pos(self) -> bool:
        return self.kind == TokenKind.pos

    def serialize(self, tag_map: Optional[TagMap] = None) -> str:
        if self.kind == TokenKind.word:
            if self.text.startswith((SPECIAL_OPEN, ESCAPE)):
                return ESCAPE + self.text
            return self.text
        if self.kind == TokenKind.pos:
            pos = tag_map.show_pos(self.pos) if tag_map else self.pos
            return f"{SPECIAL_OPEN}{pos}{SPECIAL_CLOSE}"
        if tag_map:
            inner = f"{tag_map.show_pos(self.pos)}{DISPLAY_SEPARATOR}{tag_map.show_form(self.form)}"
        else:
            inner = f"{self.pos}{RAW_SEPARATOR}{self.form}"
        return f"{SPECIAL_OPEN}{inner}{SPECIAL_CLOSE}"

    @classmethod
    def parse(cls, text: str, tag_map: Optional[TagMap] = None) -> "Token":
        """Read one serialized token; anything that is not a special token is a word."""
        if text.startswith(ESCAPE) and len(text) > 1:
            return cls.word(text[1:])
        if not (len(text) > 2 and text.startswith(SPECIAL_OPEN) and text.endswith(SPECIAL_CLOSE)):
            return cls.word(text)
        inner = text[1:-1]
        if RAW_SEPARATOR in inner:
            pos, form = inner.split(RAW_SEPARATOR, 1)
            return cls.conj(pos, form)
        if tag_map is not None and DISPLAY_SEPARATOR in inner:
            pos, form = inner.split(DISPLAY_SEPARATOR, 1)
            return cls.conj(tag_map.read_pos(pos), tag_map.read_form(form))
        return cls.pos_tag(tag_map.read_pos(inner) if tag_map else inner)


class FactorBundle(BaseModel):
    lemma: str
    pos_coarse: str
    pos_fine: str
    conj_form: str = "*"

    class Config:
        frozen = True


# one-hot embedding size per factor, recorded in the factor file header
FACTOR_ORDER = ("lemma", "pos_coarse", "pos_fine", "conj_form")
FACTOR_DIMENSIONS = {"pos_coarse": 4, "pos_fine": 8, "conj_form": 8, "lemma": 492}
FACTOR_SEPARATOR = "|"
