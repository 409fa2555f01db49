"""Persistent store for protocol runs and scaling fits"""

from .database import ResultsDatabase, init_db
from .schema import RunRecord, ScalingFitRecord

__all__ = [
    "ResultsDatabase",
    "init_db",
    "RunRecord",
    "ScalingFitRecord",
]
