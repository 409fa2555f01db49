"""Protocol descriptions and local-unitary parameters"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

from ..schedules import BoundaryCondition, ModelSchedules
from ..utils.errors import UsageError

_FOUR_PI = 4.0 * math.pi


class ProtocolKind(str, Enum):
    ADIABATIC = "adiabatic"
    LINEAR = "linear"
    LCD = "lcd"
    LCDLU = "lcdlu"

    @property
    def driven(self) -> bool:
        return self in (ProtocolKind.LCD, ProtocolKind.LCDLU)


def wrap_angle(angle: float) -> float:
    """Map into (-2pi, 2pi]; rotations are 4pi-periodic so the operator is unchanged"""
    r = math.fmod(angle + 2.0 * math.pi, _FOUR_PI)
    if r <= 0.0:
        r += _FOUR_PI
    return r - 2.0 * math.pi


Triple = Tuple[float, float, float]


@dataclass(frozen=True)
class LocalUnitaryParams:
    """
    Single-qubit layer R_z(alpha_i) R_x(theta_i) R_z(beta_i) per site, R_z(beta_i) first.

    ``triples`` holds one (alpha, theta, beta) entry for a uniform layer or one
    entry per site.
    """

    triples: Tuple[Triple, ...]
    uniform: bool = True

    def __post_init__(self):
        if not self.triples:
            raise UsageError("Local unitary needs at least one angle triple")
        if self.uniform and len(self.triples) != 1:
            raise UsageError("Uniform local unitary takes exactly one triple")
        wrapped = tuple(
            tuple(wrap_angle(float(a)) for a in triple) for triple in self.triples
        )
        if any(len(t) != 3 for t in wrapped):
            raise UsageError("Local unitary entries must be (alpha, theta, beta) triples")
        object.__setattr__(self, "triples", wrapped)

    @classmethod
    def uniform_rotation(cls, alpha: float, theta: float, beta: float) -> "LocalUnitaryParams":
        return cls(((alpha, theta, beta),), uniform=True)

    @classmethod
    def per_site(cls, triples: Sequence[Triple]) -> "LocalUnitaryParams":
        return cls(tuple(tuple(t) for t in triples), uniform=False)

    @classmethod
    def x_rotation(cls, theta: float) -> "LocalUnitaryParams":
        return cls.uniform_rotation(0.0, theta, 0.0)

    @classmethod
    def z_rotation(cls, phi: float) -> "LocalUnitaryParams":
        return cls.uniform_rotation(phi, 0.0, 0.0)

    @classmethod
    def y_rotation(cls, theta: float) -> "LocalUnitaryParams":
        """R_y(theta) = R_z(pi/2) R_x(theta) R_z(-pi/2)"""
        return cls.uniform_rotation(0.5 * math.pi, theta, -0.5 * math.pi)

    @classmethod
    def fixed_x(cls) -> "LocalUnitaryParams":
        return cls.x_rotation(0.25 * math.pi)

    @classmethod
    def parse(cls, text: str) -> "LocalUnitaryParams":
        """Accepts 'fixed-x-pi4', 'x:<theta>', 'z:<phi>', 'y:<theta>' or 'a,t,b'"""
        text = text.strip().lower()
        if text in ("fixed-x-pi4", "fixed-x", "x-pi4"):
            return cls.fixed_x()
        try:
            if ":" in text:
                axis, value = text.split(":", 1)
                builders = {"x": cls.x_rotation, "z": cls.z_rotation, "y": cls.y_rotation}
                if axis not in builders:
                    raise UsageError(f"Unknown rotation axis {axis!r}")
                return builders[axis](float(value))
            parts = [float(p) for p in text.split(",")]
        except ValueError as e:
            raise UsageError(f"Invalid local unitary {text!r}: {e}")
        if len(parts) != 3:
            raise UsageError(f"Invalid local unitary {text!r}: expected alpha,theta,beta")
        return cls.uniform_rotation(*parts)

    def site_triples(self, size: int) -> Tuple[Triple, ...]:
        if self.uniform:
            return self.triples * size
        if len(self.triples) != size:
            raise UsageError(f"Per-site local unitary has {len(self.triples)} triples, L={size}")
        return self.triples

    def to_dict(self) -> Dict[str, Any]:
        return {"uniform": self.uniform, "triples": [list(t) for t in self.triples]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LocalUnitaryParams":
        return cls(tuple(tuple(t) for t in data["triples"]), uniform=bool(data.get("uniform", True)))


@dataclass(frozen=True)
class ProtocolSpec:
    """Complete description of one protocol execution"""

    size: int
    h_xf: float = 2.0
    h_zi: float = 1.0
    J_f: float = 1.0
    tau: float = 1.0
    boundary: BoundaryCondition = BoundaryCondition.AUTO
    kind: ProtocolKind = ProtocolKind.LCD
    lambda_f: float = 0.0
    lu: Optional[LocalUnitaryParams] = None
    samples: int = 201
    trotter_steps: int = 20
    tolerance: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        object.__setattr__(self, "boundary", BoundaryCondition(self.boundary))
        if self.size < 2:
            raise UsageError(f"L must be >= 2, got {self.size}")
        if not self.tau > 0:
            raise UsageError(f"tau must be positive, got {self.tau}")
        if not self.h_xf >= 0:
            raise UsageError(f"h_xf must be non-negative, got {self.h_xf}")
        if self.h_zi == 0:
            raise UsageError("h_zi must be nonzero so that H(0) has a unique ground state")
        if not math.isfinite(self.lambda_f):
            raise UsageError(f"lambda_f must be finite, got {self.lambda_f}")
        if self.kind is ProtocolKind.LCDLU and self.lu is None:
            raise UsageError("Protocol kind lcdlu requires local unitary parameters")
        if self.samples < 2:
            raise UsageError(f"Need at least 2 samples, got {self.samples}")
        if self.trotter_steps < 1:
            raise UsageError(f"trotter_steps must be >= 1, got {self.trotter_steps}")
        if self.lu is not None:
            self.lu.site_triples(self.size)

    @property
    def model(self) -> ModelSchedules:
        return ModelSchedules(h_xf=self.h_xf, h_zi=self.h_zi, J_f=self.J_f)

    @property
    def resolved_boundary(self) -> BoundaryCondition:
        return self.boundary.resolve(self.size)

    @property
    def initial_bitstring(self) -> str:
        """Ground state of h_zi sum Z: all ones for h_zi > 0"""
        return ("1" if self.h_zi > 0 else "0") * self.size

    def replace(self, **changes) -> "ProtocolSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "L": self.size,
            "h_xf": self.h_xf,
            "h_zi": self.h_zi,
            "J_f": self.J_f,
            "tau": self.tau,
            "boundary": self.boundary.value,
            "kind": self.kind.value,
            "lambda_f": self.lambda_f,
            "lu": self.lu.to_dict() if self.lu is not None else None,
            "samples": self.samples,
            "trotter_steps": self.trotter_steps,
            "tolerance": self.tolerance,
        }

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
