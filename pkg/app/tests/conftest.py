from pathlib import Path
from typing import List

import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from app.config import settings
from app.main import app
from app.models.conjugation import ConjugationTable
from app.models.lexicon import LemmaLexicon
from app.models.morpheme import AnalyzedSentence
from app.models.token import TagMap
from app.services.database import get_db, init_db
from app.services.decode import build_lexicon
from app.services.encode import load_tag_map
from app.services.inflect import load_table
from app.services.ingest import parse_corpus
from app.services.resources import Resources, get_resources

FIXTURES = Path(__file__).resolve().parent / "fixtures"
PREDICATES = FIXTURES / "predicates.mecab"
CORPUS_SIZE = 600


def read_fixture(path: Path = PREDICATES) -> List[AnalyzedSentence]:
    with open(path, encoding="utf-8") as f:
        return list(parse_corpus(f))


def compose_corpus(sentences: List[AnalyzedSentence], size: int = CORPUS_SIZE) -> List[AnalyzedSentence]:
    """
    Grow the hand-written fixture into a larger corpus by pairing sentences.

    Every fixture sentence appears on its own first, so the composed corpus
    covers everything the fixture covers.
    """
    composed = list(sentences)
    n = len(sentences)
    i = 0
    while len(composed) < size:
        first, second = sentences[i % n], sentences[(7 * i + 3) % n]
        composed.append(AnalyzedSentence(morphemes=first.morphemes + second.morphemes))
        i += 1
    return composed


@pytest.fixture(scope="session")
def table() -> ConjugationTable:
    return load_table(settings.table_path, settings.lemma_endings_path, settings.form_groups_path)


@pytest.fixture(scope="session")
def tag_map() -> TagMap:
    return load_tag_map(settings.tag_map_path)


@pytest.fixture(scope="session")
def fixture_sentences() -> List[AnalyzedSentence]:
    return read_fixture()


@pytest.fixture(scope="session")
def corpus(fixture_sentences) -> List[AnalyzedSentence]:
    return compose_corpus(fixture_sentences)


@pytest.fixture(scope="session")
def lexicon(corpus, table) -> LemmaLexicon:
    return build_lexicon(corpus, table)


@pytest.fixture(scope="function")
def db_session():
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False},
                           poolclass=StaticPool)
    init_db(bind=engine)
    db = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    yield db
    db.close()
    engine.dispose()


@pytest.fixture(scope="function")
def client(db_session, table, tag_map, lexicon):
    def override_get_db():
        yield db_session

    app.dependency_overrides[get_db] = override_get_db
    app.dependency_overrides[get_resources] = lambda: Resources(
        table=table, tag_map=tag_map, lexicon=lexicon)
    yield TestClient(app)
    app.dependency_overrides.clear()
