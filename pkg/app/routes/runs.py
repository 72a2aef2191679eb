from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy.orm import Session
from typing import List, Optional

from app.models.run import RunResponse, RunDetailResponse, RunLogResponse, RunStatus
from app.services import run_service
from app.services.database import get_db

router = APIRouter()


@router.get("/runs/{run_id}", response_model=RunDetailResponse)
async def get_run(run_id: str, db: Session = Depends(get_db)):
    """
    Get the resolved config and metrics of a recorded run.
    """
    run = run_service.get_run(db, run_id)
    if not run:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    return run


@router.get("/runs", response_model=List[RunResponse])
async def list_runs(
    status: Optional[RunStatus] = None,
    subcommand: Optional[str] = None,
    skip: int = 0,
    limit: int = 100,
    db: Session = Depends(get_db)
):
    """
    List recorded runs, newest first, optionally filtered by status and subcommand.
    """
    return run_service.list_runs(
        db,
        status=status,
        subcommand=subcommand,
        skip=skip,
        limit=limit
    )


@router.get("/runs/{run_id}/logs", response_model=List[RunLogResponse])
async def get_run_logs(run_id: str, db: Session = Depends(get_db)):
    """
    Get the status history of a recorded run.
    """
    logs = run_service.get_run_logs(db, run_id)
    if logs is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    return logs
