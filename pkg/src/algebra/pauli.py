"""Symbolic algebra over L-site Pauli strings.

A Pauli string is stored as two bitmasks (X-part, Z-part) so that products and
commutation tests are bit operations. Site ``i`` of an ``L``-site string maps to
bit ``L - 1 - i``, which makes the leftmost letter of a label act on the most
significant bit of a computational-basis index (``|b_0 b_1 ... b_{L-1}>``).

The string with masks ``(x, z)`` denotes ``i^{|x & z|} X^x Z^z``, so a ``Y``
letter is ``i X Z`` and every stored string is Hermitian.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from ..utils.errors import CapabilityError, UsageError

logger = logging.getLogger(__name__)

PRUNE_THRESHOLD = 1e-14
DEFAULT_DENSE_LIMIT = 10

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """Coefficient-free Pauli string on ``size`` sites"""

    size: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise UsageError(f"Pauli string size must be >= 1, got {self.size}")
        limit = 1 << self.size
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise UsageError(f"Bitmasks out of range for size {self.size}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a letter sequence such as ``"XZIY"``"""
        label = label.strip().upper()
        if not label:
            raise UsageError("Empty Pauli label")
        x = z = 0
        for letter in label:
            if letter not in _LETTER_BITS:
                raise UsageError(f"Unknown Pauli letter {letter!r} in {label!r}")
            xb, zb = _LETTER_BITS[letter]
            x = (x << 1) | xb
            z = (z << 1) | zb
        return cls(len(label), x, z)

    @classmethod
    def on_sites(cls, size: int, letters: Mapping[int, str]) -> "PauliString":
        """Identity everywhere except the given ``{site: letter}`` entries"""
        x = z = 0
        for site, letter in letters.items():
            if not 0 <= site < size:
                raise UsageError(f"Site {site} outside [0, {size})")
            xb, zb = _LETTER_BITS[letter.upper()]
            bit = 1 << (size - 1 - site)
            if xb:
                x |= bit
            if zb:
                z |= bit
        return cls(size, x, z)

    @property
    def label(self) -> str:
        letters = []
        for site in range(self.size):
            bit = 1 << (self.size - 1 - site)
            letters.append(_BITS_LETTER[(int(bool(self.x & bit)), int(bool(self.z & bit)))])
        return "".join(letters)

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        _check_sizes(self.size, other.size)
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _check_sizes(a: int, b: int):
    if a != b:
        raise UsageError(f"Size mismatch: {a} vs {b}")


def multiply(a: PauliString, b: PauliString) -> Tuple[complex, PauliString]:
    """
    Product of two Pauli strings.

    Returns:
        ``(phase, c)`` with ``a * b = phase * c`` and phase in {1, i, -1, -i}
    """
    _check_sizes(a.size, b.size)
    c = PauliString(a.size, a.x ^ b.x, a.z ^ b.z)
    exponent = a.y_count + b.y_count - c.y_count + 2 * (a.z & b.x).bit_count()
    return _PHASES[exponent % 4], c


def masked_parity(indices: np.ndarray, mask: int) -> np.ndarray:
    """Parity of ``popcount(index & mask)`` for every index, as 0/1 int64"""
    v = np.bitwise_and(indices, np.int64(mask))
    for shift in (32, 16, 8, 4, 2, 1):
        v = v ^ (v >> shift)
    return v & 1


Coefficient = Union[int, float, complex]


class PauliSum:
    """Immutable weighted sum of Pauli strings on a fixed number of sites"""

    __slots__ = ("_size", "_terms")

    def __init__(
        self,
        size: int,
        terms: Optional[Mapping[PauliString, Coefficient]] = None,
        prune: float = PRUNE_THRESHOLD,
    ):
        if size < 1:
            raise UsageError(f"PauliSum size must be >= 1, got {size}")
        cleaned: Dict[PauliString, complex] = {}
        for string, coef in (terms or {}).items():
            _check_sizes(size, string.size)
            coef = complex(coef)
            if abs(coef) >= prune:
                cleaned[string] = coef
        self._size = size
        self._terms = cleaned

    # Construction

    @classmethod
    def zero(cls, size: int) -> "PauliSum":
        return cls(size)

    @classmethod
    def identity(cls, size: int, coef: Coefficient = 1.0) -> "PauliSum":
        return cls(size, {PauliString(size): coef})

    @classmethod
    def from_terms(
        cls, size: int, terms: Iterable[Tuple[Union[str, PauliString], Coefficient]]
    ) -> "PauliSum":
        """Accumulate ``(label or PauliString, coefficient)`` pairs"""
        acc: Dict[PauliString, complex] = {}
        for key, coef in terms:
            string = PauliString.from_label(key) if isinstance(key, str) else key
            _check_sizes(size, string.size)
            acc[string] = acc.get(string, 0j) + complex(coef)
        return cls(size, acc)

    # Accessors

    @property
    def size(self) -> int:
        return self._size

    @property
    def terms(self) -> Mapping[PauliString, complex]:
        return MappingProxyType(self._terms)

    def coefficient(self, key: Union[str, PauliString]) -> complex:
        string = PauliString.from_label(key) if isinstance(key, str) else key
        return self._terms.get(string, 0j)

    def items(self) -> Iterator[Tuple[PauliString, complex]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # Arithmetic

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        _check_sizes(self._size, other._size)
        acc = dict(self._terms)
        for string, coef in other._terms.items():
            acc[string] = acc.get(string, 0j) + coef
        return PauliSum(self._size, acc)

    def __neg__(self) -> "PauliSum":
        return PauliSum(self._size, {s: -c for s, c in self._terms.items()})

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union["PauliSum", Coefficient]) -> "PauliSum":
        if isinstance(other, PauliSum):
            return _product(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum(self._size, {s: c * other for s, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other: Coefficient) -> "PauliSum":
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __truediv__(self, other: Coefficient) -> "PauliSum":
        return self * (1.0 / other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._size == other._size and self._terms == other._terms

    __hash__ = None

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        _check_sizes(self._size, other._size)
        return all(abs(c) <= atol for _, c in (self - other).items())

    def adjoint(self) -> "PauliSum":
        return PauliSum(self._size, {s: c.conjugate() for s, c in self._terms.items()})

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def real(self) -> "PauliSum":
        """Drop imaginary parts of the coefficients"""
        return PauliSum(self._size, {s: c.real for s, c in self._terms.items()})

    # Matrix forms

    def to_sparse(self) -> sparse.csr_matrix:
        """CSR matrix in the computational basis (no size limit)"""
        dim = 1 << self._size
        indices = np.arange(dim, dtype=np.int64)
        rows, cols, data = [], [], []
        for string, coef in self._terms.items():
            signs = 1 - 2 * masked_parity(indices, string.z)
            rows.append(indices ^ string.x)
            cols.append(indices)
            data.append(coef * _PHASES[string.y_count % 4] * signs)
        if not data:
            return sparse.csr_matrix((dim, dim), dtype=np.complex128)
        matrix = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
            dtype=np.complex128,
        )
        return matrix.tocsr()

    # Serialization

    def to_json(self) -> dict:
        terms = sorted(self._terms.items(), key=lambda item: item[0].label)
        return {
            "L": self._size,
            "terms": [
                {"string": s.label, "re": c.real, "im": c.imag} for s, c in terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PauliSum":
        try:
            size = int(data["L"])
            pairs = [
                (t["string"], complex(t["re"], t.get("im", 0.0))) for t in data["terms"]
            ]
        except (KeyError, TypeError) as e:
            raise UsageError(f"Malformed PauliSum JSON: {e}")
        return cls.from_terms(size, pairs)

    def __repr__(self) -> str:
        if not self._terms:
            return f"PauliSum(L={self._size}, 0)"
        parts = [f"({c:.6g})*{s.label}" for s, c in sorted(
            self._terms.items(), key=lambda item: item[0].label
        )]
        return f"PauliSum(L={self._size}, " + " + ".join(parts) + ")"


def _product(a: PauliSum, b: PauliSum) -> PauliSum:
    _check_sizes(a.size, b.size)
    acc: Dict[PauliString, complex] = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            phase, sc = multiply(sa, sb)
            acc[sc] = acc.get(sc, 0j) + phase * ca * cb
    return PauliSum(a.size, acc)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``[a, b] = ab - ba``; only anticommuting string pairs contribute ``2ab``"""
    _check_sizes(a.size, b.size)
    acc: Dict[PauliString, complex] = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            if sa.commutes_with(sb):
                continue
            phase, sc = multiply(sa, sb)
            acc[sc] = acc.get(sc, 0j) + 2.0 * phase * ca * cb
    return PauliSum(a.size, acc)


def hs_inner(a: PauliSum, b: PauliSum) -> complex:
    """Normalized Hilbert-Schmidt product ``2^{-L} tr(a^dagger b)``"""
    _check_sizes(a.size, b.size)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for string, coef in small.items():
        other = large.terms.get(string)
        if other is None:
            continue
        if small is a:
            total += coef.conjugate() * other
        else:
            total += other.conjugate() * coef
    return total


def to_dense(a: PauliSum, limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense ``2^L x 2^L`` matrix; refused above ``limit`` sites"""
    if a.size > limit:
        raise CapabilityError(f"Dense matrix for L={a.size} exceeds limit L<={limit}")
    return a.to_sparse().toarray()


def site_operator(size: int, site: int, letter: str, coef: Coefficient = 1.0) -> PauliSum:
    return PauliSum(size, {PauliString.on_sites(size, {site: letter}): coef})


def field_sum(size: int, letter: str, coef: Coefficient = 1.0) -> PauliSum:
    """Uniform single-site sum ``coef * sum_i letter_i``"""
    return PauliSum(
        size, {PauliString.on_sites(size, {i: letter}): coef for i in range(size)}
    )
