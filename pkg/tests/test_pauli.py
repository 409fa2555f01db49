"""Tests for the Pauli-string algebra"""

import numpy as np
import pytest

from src.algebra import (
    PauliString,
    PauliSum,
    commutator,
    field_sum,
    hs_inner,
    multiply,
    site_operator,
    to_dense,
)
from src.utils.errors import CapabilityError, UsageError

from oracles import dense_label, dense_sum, random_sum, random_terms


@pytest.mark.parametrize(
    "a, b, phase, product",
    [
        ("X", "Y", 1j, "Z"),
        ("Y", "X", -1j, "Z"),
        ("Y", "Z", 1j, "X"),
        ("Z", "X", 1j, "Y"),
        ("Y", "Y", 1, "I"),
        ("XZ", "ZX", 1, "YY"),
    ],
)
def test_multiply_phases(a, b, phase, product):
    got_phase, got = multiply(PauliString.from_label(a), PauliString.from_label(b))
    assert got.label == product
    assert got_phase == pytest.approx(phase)


def test_label_and_site_convention():
    s = PauliString.on_sites(3, {0: "X", 2: "Z"})
    assert s.label == "XIZ"
    assert s.weight == 2
    np.testing.assert_allclose(to_dense(PauliSum(3, {s: 1.0})), dense_label("XIZ"))


def test_unknown_letter_rejected():
    with pytest.raises(UsageError):
        PauliString.from_label("XQ")


def test_dense_matches_kronecker_oracle(rng):
    for size in (1, 2, 3, 4):
        terms = random_terms(rng, size, count=8, hermitian=False)
        a = PauliSum.from_terms(size, terms)
        np.testing.assert_allclose(to_dense(a), dense_sum(terms), atol=1e-12)


def test_product_matches_dense(rng):
    a = random_sum(rng, 3, hermitian=False)
    b = random_sum(rng, 3, hermitian=False)
    np.testing.assert_allclose(to_dense(a * b), to_dense(a) @ to_dense(b), atol=1e-12)


def test_product_is_associative(rng):
    a, b, c = (random_sum(rng, 3, count=4, hermitian=False) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-10)


def test_commutator_matches_dense(rng):
    a = random_sum(rng, 3)
    b = random_sum(rng, 3)
    da, db = to_dense(a), to_dense(b)
    np.testing.assert_allclose(to_dense(commutator(a, b)), da @ db - db @ da, atol=1e-12)


def test_jacobi_identity(rng):
    a, b, c = (random_sum(rng, 3, count=5) for _ in range(3))
    total = (
        commutator(a, commutator(b, c))
        + commutator(b, commutator(c, a))
        + commutator(c, commutator(a, b))
    )
    assert total.allclose(PauliSum.zero(3), atol=1e-10)


def test_hs_inner_is_normalized_trace(rng):
    a = random_sum(rng, 3, hermitian=False)
    b = random_sum(rng, 3, hermitian=False)
    expected = np.trace(to_dense(a).conj().T @ to_dense(b)) / 8
    assert hs_inner(a, b) == pytest.approx(expected, abs=1e-12)


def test_hs_inner_distinct_strings_vanish():
    a = site_operator(2, 0, "X")
    b = site_operator(2, 1, "X")
    assert hs_inner(a, b) == 0


def test_adjoint_and_self_adjointness():
    h = field_sum(2, "Z") + 0.5 * site_operator(2, 0, "Y")
    assert h.is_self_adjoint()
    anti = 1j * field_sum(2, "X")
    assert not anti.is_self_adjoint()
    assert anti.adjoint().allclose(-anti)


def test_cancellation_prunes_terms():
    a = field_sum(2, "X")
    assert len(a - a) == 0
    assert not (a - a)


def test_size_mismatch_rejected():
    with pytest.raises(UsageError):
        field_sum(2, "X") + field_sum(3, "X")
    with pytest.raises(UsageError):
        multiply(PauliString.from_label("X"), PauliString.from_label("XX"))


def test_dense_limit():
    with pytest.raises(CapabilityError):
        to_dense(PauliSum.identity(11))
    assert to_dense(PauliSum.identity(2), limit=2).shape == (4, 4)


def test_sparse_has_no_limit():
    matrix = field_sum(12, "X").to_sparse()
    assert matrix.shape == (4096, 4096)
    assert matrix.nnz == 12 * 4096


def test_json_round_trip(rng):
    a = random_sum(rng, 4, hermitian=False)
    assert PauliSum.from_json(a.to_json()) == a


def test_malformed_json_rejected():
    with pytest.raises(UsageError):
        PauliSum.from_json({"terms": []})
