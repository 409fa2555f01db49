"""Pauli-string operator algebra"""

from .pauli import (
    PauliString,
    PauliSum,
    multiply,
    commutator,
    hs_inner,
    to_dense,
    site_operator,
    field_sum,
    DEFAULT_DENSE_LIMIT,
    PRUNE_THRESHOLD,
)

__all__ = [
    "PauliString",
    "PauliSum",
    "multiply",
    "commutator",
    "hs_inner",
    "to_dense",
    "site_operator",
    "field_sum",
    "DEFAULT_DENSE_LIMIT",
    "PRUNE_THRESHOLD",
]
