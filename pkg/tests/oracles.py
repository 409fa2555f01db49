"""Dense reference constructions built from Kronecker products"""

from functools import reduce

import numpy as np

from src.algebra import PauliSum

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def dense_label(label: str) -> np.ndarray:
    """Site 0 is the leftmost tensor factor"""
    return reduce(np.kron, [LETTERS[c] for c in label])


def dense_sum(terms) -> np.ndarray:
    return sum(coef * dense_label(label) for label, coef in terms)


def random_terms(rng, size: int, count: int = 6, hermitian: bool = True):
    terms = []
    for _ in range(count):
        label = "".join(str(c) for c in rng.choice(list("IXYZ"), size=size))
        coef = rng.normal() if hermitian else complex(rng.normal(), rng.normal())
        terms.append((label, coef))
    return terms


def random_sum(rng, size: int, count: int = 6, hermitian: bool = True) -> PauliSum:
    return PauliSum.from_terms(size, random_terms(rng, size, count, hermitian))


def random_state(rng, size: int) -> np.ndarray:
    v = rng.normal(size=1 << size) + 1j * rng.normal(size=1 << size)
    return v / np.linalg.norm(v)


def tfim_dense(size: int, h_z: float, h_x: float, J: float, periodic: bool = True) -> np.ndarray:
    def on(site, op):
        ops = [I2] * size
        ops[site] = op
        return reduce(np.kron, ops)

    H = np.zeros((1 << size, 1 << size), dtype=np.complex128)
    for i in range(size):
        H += h_z * on(i, Z) + h_x * on(i, X)
    last = size if periodic and size > 2 else size - 1
    for i in range(last):
        j = (i + 1) % size
        H += J * on(i, Z) @ on(j, Z)
    return H
