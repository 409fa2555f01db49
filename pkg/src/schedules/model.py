"""Sweep function, interpolation schedules and the Ising model builder"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Tuple

from ..algebra import PauliString, PauliSum, field_sum
from ..utils.errors import RangeError, UsageError

logger = logging.getLogger(__name__)

# Slack for times handed in by integrators and midpoint rules
_TIME_SLACK = 1e-12


class BoundaryCondition(str, Enum):
    """Treatment of the bond between the last and the first site"""

    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"
    OPEN = "open"
    AUTO = "auto"

    def resolve(self, size: int) -> "BoundaryCondition":
        """AUTO means periodic for even L and antiperiodic for odd L"""
        if self is BoundaryCondition.AUTO:
            return BoundaryCondition.PERIODIC if size % 2 == 0 else BoundaryCondition.ANTIPERIODIC
        return self


class Bond(NamedTuple):
    left: int
    right: int
    sign: float


def bonds(size: int, boundary: BoundaryCondition = BoundaryCondition.AUTO) -> List[Bond]:
    """
    Nearest-neighbour bonds of an L-site chain.

    The boundary bond (L-1, 0) carries sign -1 for antiperiodic chains. At L=2
    the boundary bond coincides with the bulk bond and is counted once.
    """
    boundary = BoundaryCondition(boundary).resolve(size)
    result = [Bond(i, i + 1, 1.0) for i in range(size - 1)]
    if size > 2 and boundary is not BoundaryCondition.OPEN:
        sign = -1.0 if boundary is BoundaryCondition.ANTIPERIODIC else 1.0
        result.append(Bond(size - 1, 0, sign))
    return result


def bond_sum(
    size: int,
    bond_list: List[Bond],
    first: str,
    second: str,
    symmetrize: bool = False,
) -> PauliSum:
    """
    Sum over bonds of ``sign * first_i second_j``.

    With ``symmetrize`` the mirrored ``second_i first_j`` term is added per bond,
    e.g. ``Y_i Z_j + Z_i Y_j``.
    """
    terms = []
    for bond in bond_list:
        terms.append(
            (PauliString.on_sites(size, {bond.left: first, bond.right: second}), bond.sign)
        )
        if symmetrize:
            terms.append(
                (PauliString.on_sites(size, {bond.left: second, bond.right: first}), bond.sign)
            )
    return PauliSum.from_terms(size, terms)


@dataclass(frozen=True)
class IsingOperators:
    """Static operator pieces of the interpolated Hamiltonian"""

    z_field: PauliSum
    x_field: PauliSum
    y_field: PauliSum
    zz_bonds: PauliSum

    @classmethod
    def build(cls, size: int, boundary: BoundaryCondition) -> "IsingOperators":
        bond_list = bonds(size, boundary)
        return cls(
            z_field=field_sum(size, "Z"),
            x_field=field_sum(size, "X"),
            y_field=field_sum(size, "Y"),
            zz_bonds=bond_sum(size, bond_list, "Z", "Z"),
        )


@dataclass(frozen=True)
class SweepFunction:
    """lambda(t) = sin^2(pi/2 sin^2(pi t / 2 tau)), with vanishing endpoint derivatives"""

    tau: float = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise UsageError(f"Total time must be positive, got {self.tau}")

    def clip(self, t: float) -> float:
        """Validate t against [0, tau] and clamp integrator round-off"""
        if t < -_TIME_SLACK * self.tau or t > self.tau * (1 + _TIME_SLACK):
            raise RangeError(f"t={t} outside [0, {self.tau}]")
        return min(max(t, 0.0), self.tau)

    def _inner(self, t: float) -> Tuple[float, float, float]:
        # s(t) = sin^2(pi t / 2 tau) and its first two derivatives
        w = math.pi / self.tau
        s = math.sin(0.5 * w * t) ** 2
        ds = 0.5 * w * math.sin(w * t)
        d2s = 0.5 * w * w * math.cos(w * t)
        return s, ds, d2s

    def value(self, t: float) -> float:
        t = self.clip(t)
        s, _, _ = self._inner(t)
        return math.sin(0.5 * math.pi * s) ** 2

    def rate(self, t: float) -> float:
        t = self.clip(t)
        s, ds, _ = self._inner(t)
        return 0.5 * math.pi * math.sin(math.pi * s) * ds

    def acceleration(self, t: float) -> float:
        t = self.clip(t)
        s, ds, d2s = self._inner(t)
        return 0.5 * math.pi * (
            math.pi * math.cos(math.pi * s) * ds * ds + math.sin(math.pi * s) * d2s
        )

    def __call__(self, t: float) -> Tuple[float, float]:
        return self.value(t), self.rate(t)


def lambda_of_t(t: float, tau: float) -> Tuple[float, float]:
    """Sweep value and its time derivative at ``t``"""
    return SweepFunction(tau)(t)


@dataclass(frozen=True)
class ModelSchedules:
    """
    Interpolated couplings h_z = h_zi (1 - lambda), h_x = lambda h_xf,
    J = lambda J_f, all dimensionless in units of J_f.
    """

    h_xf: float = 2.0
    h_zi: float = 1.0
    J_f: float = 1.0

    def __post_init__(self):
        for name in ("h_xf", "h_zi", "J_f"):
            if not math.isfinite(getattr(self, name)):
                raise UsageError(f"Coupling {name} must be finite")

    def h_z(self, lam: float) -> float:
        return self.h_zi * (1.0 - lam)

    def h_x(self, lam: float) -> float:
        return self.h_xf * lam

    def J(self, lam: float) -> float:
        return self.J_f * lam

    def dh_z(self, lam: float = 0.0) -> float:
        return -self.h_zi

    def dh_x(self, lam: float = 0.0) -> float:
        return self.h_xf

    def dJ(self, lam: float = 0.0) -> float:
        return self.J_f

    def hamiltonian(
        self, lam: float, size: int, boundary: BoundaryCondition = BoundaryCondition.AUTO
    ) -> PauliSum:
        ops = IsingOperators.build(size, boundary)
        return (
            self.h_z(lam) * ops.z_field
            + self.h_x(lam) * ops.x_field
            + self.J(lam) * ops.zz_bonds
        )

    def derivative(
        self, lam: float, size: int, boundary: BoundaryCondition = BoundaryCondition.AUTO
    ) -> PauliSum:
        """d H / d lambda"""
        ops = IsingOperators.build(size, boundary)
        return (
            self.dh_z(lam) * ops.z_field
            + self.dh_x(lam) * ops.x_field
            + self.dJ(lam) * ops.zz_bonds
        )

    def target_hamiltonian(
        self, size: int, boundary: BoundaryCondition = BoundaryCondition.AUTO
    ) -> PauliSum:
        return self.hamiltonian(1.0, size, boundary)
