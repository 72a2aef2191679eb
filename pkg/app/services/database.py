from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from app.config import settings
from app.models.run import Base
import logging

DATABASE_URL = settings.database_url

# sqlite connections are used from FastAPI's threadpool
connect_args = {"check_same_thread": False} if DATABASE_URL.startswith("sqlite") else {}

engine = create_engine(DATABASE_URL, connect_args=connect_args)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
logging.getLogger('sqlalchemy.engine').setLevel(logging.WARN)


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db(bind=None):
    from app.models import run  # noqa: F401  registers the ledger tables
    Base.metadata.create_all(bind=bind or engine)
