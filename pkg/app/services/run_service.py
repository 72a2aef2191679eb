import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional
from sqlalchemy.orm import Session
from app.models.run import Run, RunLog, RunStatus, Subcommand


def create_run(db: Session, subcommand: Subcommand, config: Dict[str, Any]) -> Run:
    """
    Record a new run with its resolved configuration.
    """
    run_id = f"run_{uuid.uuid4().hex[:8]}"
    run = Run(
        run_id=run_id,
        subcommand=subcommand,
        status=RunStatus.pending,
        config=config,
    )
    db.add(run)
    db.commit()
    db.refresh(run)

    db.add(RunLog(run_id=run_id, status=RunStatus.pending, message="Run created"))
    db.commit()
    return run


def get_run(db: Session, run_id: str) -> Optional[Run]:
    return db.query(Run).filter(Run.run_id == run_id).first()


def list_runs(db: Session, status: Optional[str] = None,
              subcommand: Optional[str] = None,
              skip: int = 0, limit: int = 100) -> List[Run]:
    query = db.query(Run)
    if status:
        try:
            query = query.filter(Run.status == RunStatus(status))
        except ValueError:
            pass
    if subcommand:
        try:
            query = query.filter(Run.subcommand == Subcommand(subcommand))
        except ValueError:
            pass
    return query.order_by(Run.created_at.desc()).offset(skip).limit(limit).all()


def _transition(db: Session, run: Run, status: RunStatus, message: str,
                allowed: List[RunStatus]) -> Run:
    if run.status not in allowed:
        raise ValueError(f"Cannot move run from '{run.status.value}' to '{status.value}'")
    run.status = status
    run.updated_at = datetime.utcnow()
    if status in (RunStatus.completed, RunStatus.failed):
        run.completed_at = datetime.utcnow()
    db.commit()
    db.refresh(run)

    db.add(RunLog(run_id=run.run_id, status=status, message=message))
    db.commit()
    return run


def start_run(db: Session, run: Run) -> Run:
    return _transition(db, run, RunStatus.running, "Run started", [RunStatus.pending])


def complete_run(db: Session, run: Run, metrics: Optional[Dict[str, Any]] = None) -> Run:
    run.metrics = metrics
    return _transition(db, run, RunStatus.completed, "Run completed successfully",
                       [RunStatus.running])


def fail_run(db: Session, run: Run, error: str, metrics: Optional[Dict[str, Any]] = None) -> Run:
    if metrics is not None:
        run.metrics = metrics
    return _transition(db, run, RunStatus.failed, f"Run failed: {error}",
                       [RunStatus.pending, RunStatus.running])


def get_run_logs(db: Session, run_id: str) -> Optional[List[RunLog]]:
    run = db.query(Run).filter(Run.run_id == run_id).first()
    if not run:
        return None
    return db.query(RunLog).filter(RunLog.run_id == run_id).order_by(RunLog.created_at, RunLog.id).all()
