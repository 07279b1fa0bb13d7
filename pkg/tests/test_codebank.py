from __future__ import annotations

import numpy as np
import pytest

from app.core.errors import CodebankMissError, UsageError
from app.core.models import DecodeRule
from app.storage.codebank import CodeBank, format_codebank, parse_codebank


def test_text_format_is_bit_exact(small_bank: CodeBank) -> None:
    text = format_codebank(small_bank.records())
    parsed = parse_codebank(text)
    assert format_codebank(parsed) == text
    assert text.splitlines()[0] == "2 8 3 2"


def test_save_and_load(tmp_path, small_bank: CodeBank) -> None:
    path = tmp_path / "bank.txt"
    small_bank.save(str(path))
    loaded = CodeBank.load(str(path))
    assert len(loaded) == len(small_bank)
    for a, b in zip(loaded.records(), small_bank.records()):
        assert (a.d, a.n, a.k) == (b.d, b.n, b.k)
        assert np.array_equal(a.generators, b.generators)
        assert np.array_equal(a.h_basis, b.h_basis)


def test_parse_rejects_inconsistent_header() -> None:
    with pytest.raises(UsageError):
        parse_codebank("2 8 1 5\n11111111\n")
    with pytest.raises(UsageError):
        parse_codebank("2 4 1 2\n1111\n1100\n")


def test_parse_wide_alphabet_rows() -> None:
    text = "11 2 0 2\n1 0\n0 10\n"
    (record,) = parse_codebank(text)
    assert record.h_basis.tolist() == [[1, 0], [0, 10]]
    assert format_codebank([record]) == text


def test_lookup_by_rate(small_bank: CodeBank) -> None:
    assert small_bank.lengths(2) == [8]
    assert small_bank.best_at_most(2, 8, 5).k == 4
    assert small_bank.best_at_most(2, 8, 6).k == 6
    assert small_bank.smallest_at_least(2, 8, 3).k == 4
    with pytest.raises(CodebankMissError):
        small_bank.best_at_most(2, 8, 1)
    with pytest.raises(CodebankMissError):
        small_bank.smallest_at_least(2, 8, 7)
    with pytest.raises(CodebankMissError):
        small_bank.find(3, 8, 2)


def test_css_built_once_per_rule(small_bank: CodeBank) -> None:
    record = small_bank.find(2, 8, 4)
    first = small_bank.css(record)
    assert small_bank.css(record) is first
    assert small_bank.css(record, rule=DecodeRule.MIN_HAMMING) is not first


def test_missing_file() -> None:
    with pytest.raises(UsageError):
        CodeBank.load("/nao/existe/bank.txt")
