from sqlalchemy import Column, Integer, String, Enum, JSON, DateTime, ForeignKey
from sqlalchemy.orm import declarative_base, relationship
from pydantic import BaseModel
from typing import Dict, Optional
from datetime import datetime
import enum

# --- SQLAlchemy base ---
Base = declarative_base()


# --- ENUMS ---
class Subcommand(str, enum.Enum):
    encode = "encode"
    decode = "decode"
    lexicon = "lexicon"
    bpe_learn = "bpe-learn"
    bpe_apply = "bpe-apply"
    bpe_decode = "bpe-decode"
    vocab = "vocab"
    coverage = "coverage"
    compare = "compare"
    roundtrip = "roundtrip"
    inflect = "inflect"


class RunStatus(str, enum.Enum):
    pending = "pending"
    running = "running"
    completed = "completed"
    failed = "failed"


# --- DATABASE MODELS ---
class Run(Base):
    __tablename__ = "runs"

    run_id = Column(String, primary_key=True, index=True)
    subcommand = Column(Enum(Subcommand), nullable=False, index=True)
    status = Column(Enum(RunStatus), nullable=False,
                    default=RunStatus.pending, index=True)
    config = Column(JSON, nullable=False)
    metrics = Column(JSON, nullable=True)

    created_at = Column(DateTime, nullable=False,
                        default=datetime.utcnow, index=True)
    updated_at = Column(DateTime, nullable=False,
                        default=datetime.utcnow, onupdate=datetime.utcnow)
    completed_at = Column(DateTime, nullable=True)

    logs = relationship("RunLog", back_populates="run")


class RunLog(Base):
    __tablename__ = "run_logs"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(String, ForeignKey("runs.run_id"),
                    nullable=False, index=True)
    status = Column(Enum(RunStatus), nullable=False)
    message = Column(String, nullable=True)
    created_at = Column(DateTime, nullable=False, default=datetime.utcnow)

    run = relationship("Run", back_populates="logs")


# --- PYDANTIC MODELS (for API schema validation) ---
class RunResponse(BaseModel):
    run_id: str
    subcommand: Subcommand
    status: RunStatus
    created_at: datetime

    class Config:
        orm_mode = True


class RunDetailResponse(RunResponse):
    config: Dict
    metrics: Optional[Dict] = None
    updated_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None

    class Config:
        orm_mode = True


class RunLogResponse(BaseModel):
    id: int
    run_id: str
    status: RunStatus
    message: Optional[str] = None
    created_at: datetime

    class Config:
        orm_mode = True
