"""
Job execution with a recorded lifecycle.
Each job moves its ledger row through pending -> processing -> completed/failed.
"""

import logging
import time
import uuid
from datetime import datetime
from typing import Any, Dict, Optional

from database import JobRecord, JobReport, SessionLocal, init_db

logger = logging.getLogger(__name__)


def submit_job(spec, session_factory=SessionLocal) -> str:
    """Register a pending job and return its id."""
    job_id = str(uuid.uuid4())
    db = session_factory()
    try:
        db.add(JobRecord(
            job_id=job_id,
            command=spec.command,
            complex_text=spec.complex_source,
            pair_descriptor=spec.pairs,
            coefficients=spec.coeff,
        ))
        db.commit()
    finally:
        db.close()
    return job_id


def process_job(job_id: Optional[str], spec, session_factory=SessionLocal) -> Dict[str, Any]:
    """
    Run a job and record it.

    Args:
        job_id: Ledger id from submit_job, or None to create one
        spec: JobSpec to run
        session_factory: SQLAlchemy session factory of the ledger

    Returns:
        Dictionary with job id, exit code, report text and processing time
    """
    from main import run

    init_db(session_factory.kw.get("bind"))
    job_id = job_id or submit_job(spec, session_factory)
    db = session_factory()
    start_time = time.time()
    record = db.query(JobRecord).filter(JobRecord.job_id == job_id).first()
    try:
        if record:
            record.status = "processing"
            record.started_at = datetime.utcnow()
            db.commit()
        logger.info(f"Starting job {job_id}: {spec.command}")

        exit_code, report = run(spec)
        processing_time = time.time() - start_time

        db.add(JobReport(
            job_id=job_id,
            report_text=report,
            exit_code=exit_code,
            processing_time_seconds=processing_time,
        ))
        if record:
            record.status = "completed" if exit_code == 0 else "failed"
            record.completed_at = datetime.utcnow()
            if exit_code:
                record.error_message = report.splitlines()[0] if report else f"exit code {exit_code}"
        db.commit()
        logger.info(f"Job {job_id} finished with exit code {exit_code} in {processing_time:.2f}s")
        return {
            "job_id": job_id,
            "exit_code": exit_code,
            "report": report,
            "processing_time": processing_time,
        }

    except Exception as e:
        logger.error(f"Error processing job {job_id}: {str(e)}")
        if record:
            record.status = "failed"
            record.error_message = str(e)
            record.completed_at = datetime.utcnow()
            db.commit()
        raise

    finally:
        db.close()
