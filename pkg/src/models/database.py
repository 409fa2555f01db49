"""Result store operations (thread-safe)"""

import json
import logging
import threading
from pathlib import Path
from typing import List, Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, scoped_session

from .schema import Base, RunRecord, ScalingFitRecord

logger = logging.getLogger(__name__)


class ResultsDatabase:
    """Thread-safe SQLite store for protocol runs and scaling fits"""

    def __init__(self, db_path: str):
        self.db_path = db_path
        self._lock = threading.Lock()
        self._engine = create_engine(
            f"sqlite:///{db_path}",
            echo=False,
            connect_args={"check_same_thread": False},
        )
        Base.metadata.create_all(self._engine)
        self._session_factory = sessionmaker(bind=self._engine, expire_on_commit=False)
        self._Session = scoped_session(self._session_factory)
        logger.info(f"Results database initialized: {db_path}")

    def close(self):
        """Close database connections"""
        self._Session.remove()
        self._engine.dispose()

    # Runs
    def add_run(self, **kwargs) -> RunRecord:
        """Store one run, dropping keys that are not columns"""
        valid_columns = {c.name for c in RunRecord.__table__.columns}
        filtered = {k: v for k, v in kwargs.items() if k in valid_columns}
        with self._lock:
            session = self._Session()
            record = RunRecord(**filtered)
            session.add(record)
            session.commit()
            return record

    def get_runs(
        self,
        kind: Optional[str] = None,
        command: Optional[str] = None,
        limit: Optional[int] = None,
    ) -> List[RunRecord]:
        """Stored runs, newest last"""
        session = self._Session()
        query = session.query(RunRecord)
        if kind:
            query = query.filter(RunRecord.kind == kind)
        if command:
            query = query.filter(RunRecord.command == command)
        query = query.order_by(RunRecord.timestamp, RunRecord.id)
        records = query.all()
        if limit:
            records = records[-limit:]
        return records

    # Scaling fits
    def add_scaling_fit(
        self,
        kind: str,
        h_xf: float,
        c: float,
        a: float,
        sizes: List[int],
        residual_norm: float = 0.0,
        partial: bool = False,
    ) -> ScalingFitRecord:
        with self._lock:
            session = self._Session()
            record = ScalingFitRecord(
                kind=kind,
                h_xf=h_xf,
                c=c,
                a=a,
                residual_norm=residual_norm,
                sizes=json.dumps([int(s) for s in sizes]),
                partial=int(partial),
            )
            session.add(record)
            session.commit()
            return record

    def get_scaling_fits(self, kind: Optional[str] = None) -> List[ScalingFitRecord]:
        session = self._Session()
        query = session.query(ScalingFitRecord)
        if kind:
            query = query.filter(ScalingFitRecord.kind == kind)
        return query.order_by(ScalingFitRecord.timestamp, ScalingFitRecord.id).all()


def init_db(db_path: str) -> ResultsDatabase:
    """Create the parent directory and open the store"""
    if db_path != ":memory:":
        Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    return ResultsDatabase(db_path)
