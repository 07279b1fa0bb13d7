from __future__ import annotations

import numpy as np
import pytest

from app.core.errors import ResourceLimitError, UsageError
from app.core.gfvec import (
    LinearCode,
    all_words,
    dot,
    dual_basis,
    enumerate_coset,
    make_word,
    rref_key,
    syndrome,
    word_index,
)


def test_dot_mod_d() -> None:
    assert dot(make_word("1111", 2), make_word("1111", 2), 2) == 0
    assert dot(make_word("12", 3), make_word("22", 3), 3) == 0
    assert dot(make_word("1", 5), make_word("3", 5), 5) == 3


def test_dot_rejects_different_lengths() -> None:
    with pytest.raises(UsageError):
        dot(np.array([1, 0]), np.array([1, 0, 1]), 2)


def test_non_prime_modulus_rejected() -> None:
    with pytest.raises(UsageError):
        make_word("0101", 4)


def test_dual_of_all_ones_is_even_weight_code() -> None:
    code = LinearCode.from_rows(["1111"], 2)
    dual = dual_basis(code)
    assert dual.kappa == 3
    words = dual.words()
    assert len(words) == 8
    assert np.all(words.sum(axis=1) % 2 == 0)


def test_dual_dimension_at_d3() -> None:
    code = LinearCode.from_rows(["111"], 3)
    dual = dual_basis(code)
    assert dual.kappa == 2
    assert not np.any((dual.basis @ code.basis.T) % 3)


def test_syndrome_examples() -> None:
    code = LinearCode.from_rows(["1111"], 2)
    assert syndrome(make_word("1100", 2), code).tolist() == [0]
    assert syndrome(make_word("1000", 2), code).tolist() == [1]


def test_enumerate_coset_lists_each_word_once() -> None:
    code = LinearCode.from_rows(["1111"], 2)
    odd = np.array(list(enumerate_coset(code, make_word("1000", 2))))
    assert len(odd) == 8
    assert len({tuple(w) for w in odd}) == 8
    assert np.all(odd.sum(axis=1) % 2 == 1)


def test_enumeration_cap() -> None:
    with pytest.raises(ResourceLimitError):
        all_words(2, 12, cap=1000)


def test_word_index_inverts_all_words() -> None:
    words = all_words(3, 3)
    assert word_index(words, 3).tolist() == list(range(27))


def test_dependent_rows_rejected() -> None:
    with pytest.raises(UsageError):
        LinearCode.from_rows(["1100", "1100"], 2)


def test_rref_key_identifies_subspace() -> None:
    a = rref_key([[1, 1, 0, 0], [0, 0, 1, 1]], 2)
    b = rref_key([[1, 1, 1, 1], [0, 0, 1, 1]], 2)
    assert a == b
