"""SQLAlchemy schema for stored protocol runs and scaling fits"""

from datetime import datetime
from sqlalchemy import (
    Column,
    Integer,
    String,
    Float,
    DateTime,
    Text,
)
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class RunRecord(Base):
    """One protocol execution"""

    __tablename__ = "runs"

    id = Column(Integer, primary_key=True)
    timestamp = Column(DateTime, default=datetime.utcnow, index=True)
    command = Column(String(30), index=True)  # 'run', 'scan-lambda', 'scaling', ...
    kind = Column(String(20), index=True)  # 'adiabatic', 'linear', 'lcd', 'lcdlu'
    size = Column(Integer)
    h_xf = Column(Float)
    h_zi = Column(Float)
    J_f = Column(Float)
    tau = Column(Float)
    boundary = Column(String(20))
    lambda_f = Column(Float)
    final_fidelity = Column(Float)
    pre_lu_fidelity = Column(Float, nullable=True)
    final_energy = Column(Float, nullable=True)
    energy_ratio = Column(Float, nullable=True)
    spec_hash = Column(String(16), index=True)
    spec_json = Column(Text)
    trajectory_path = Column(Text, nullable=True)


class ScalingFitRecord(Base):
    """Exponential fit log2 F = -c L + a for one protocol kind"""

    __tablename__ = "scaling_fits"

    id = Column(Integer, primary_key=True)
    timestamp = Column(DateTime, default=datetime.utcnow, index=True)
    kind = Column(String(20), index=True)
    h_xf = Column(Float)
    c = Column(Float)
    a = Column(Float)
    residual_norm = Column(Float)
    sizes = Column(Text)  # JSON list of L
    partial = Column(Integer, default=0)
