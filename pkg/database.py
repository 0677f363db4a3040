"""
Run ledger for moment-angle ring jobs.
Supports SQLite for local use and any SQLAlchemy URL for shared setups.
"""

from datetime import datetime
from sqlalchemy import create_engine, Column, String, Integer, DateTime, Text, Float
from sqlalchemy.orm import declarative_base, sessionmaker

from config import compute_config

DATABASE_URL = compute_config["database_url"]

engine = create_engine(
    DATABASE_URL,
    connect_args={"check_same_thread": False} if "sqlite" in DATABASE_URL else {}
)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


class JobRecord(Base):
    """One CLI job and its lifecycle"""
    __tablename__ = "job_records"

    id = Column(Integer, primary_key=True, index=True)
    job_id = Column(String(36), unique=True, index=True, nullable=False)
    command = Column(String(32), nullable=False)
    complex_text = Column(Text, nullable=False)
    pair_descriptor = Column(Text, nullable=False)
    coefficients = Column(String(32), nullable=False)
    status = Column(String(50), default="pending", index=True)  # pending, processing, completed, failed
    created_at = Column(DateTime, default=datetime.utcnow)
    started_at = Column(DateTime, nullable=True)
    completed_at = Column(DateTime, nullable=True)
    error_message = Column(Text, nullable=True)

    def __repr__(self):
        return f"<JobRecord(id={self.id}, job_id={self.job_id}, status={self.status})>"


class JobReport(Base):
    """Report produced by a finished job"""
    __tablename__ = "job_reports"

    id = Column(Integer, primary_key=True, index=True)
    job_id = Column(String(36), unique=True, index=True, nullable=False)
    report_text = Column(Text, nullable=False)
    exit_code = Column(Integer, nullable=False)
    processing_time_seconds = Column(Float, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f"<JobReport(id={self.id}, job_id={self.job_id}, exit_code={self.exit_code})>"


def init_db(bind=None):
    """Create the ledger tables"""
    Base.metadata.create_all(bind=bind or engine)


if __name__ == "__main__":
    print(f"Initializing database: {DATABASE_URL}")
    init_db()
    print("Database initialized successfully!")
