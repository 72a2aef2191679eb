import logging
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel

from app.config import settings
from app.models.conjugation import ConjugationTable
from app.models.lexicon import LemmaLexicon
from app.models.token import TagMap
from app.services.decode import load_lexicon
from app.services.encode import load_tag_map
from app.services.inflect import load_table

logger = logging.getLogger(__name__)


class Resources(BaseModel):
    table: ConjugationTable
    tag_map: TagMap
    lexicon: Optional[LemmaLexicon] = None


@lru_cache()
def get_resources() -> Resources:
    """Load the table, tag map and optional lexicon once per process."""
    table = load_table(settings.table_path, settings.lemma_endings_path, settings.form_groups_path)
    lexicon = None
    if settings.lexicon_path is not None:
        lexicon = load_lexicon(settings.lexicon_path, table)
    else:
        logger.info("no lexicon configured; token-scheme decoding is unavailable")
    return Resources(table=table, tag_map=load_tag_map(settings.tag_map_path), lexicon=lexicon)
