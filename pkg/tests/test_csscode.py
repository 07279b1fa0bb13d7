from __future__ import annotations

import numpy as np
import pytest

from app.core.csscode import (
    build_css,
    correctable,
    coset_representative,
    decode_key,
    default_halves,
    encode_key,
    in_gamma_prime,
    is_balanced,
    key_map,
    rule_objective,
    search_balanced,
    transmit_key,
    type_spectrum,
)
from app.core.errors import CodeConstructionError, ErrorCode, UsageError
from app.core.gfvec import LinearCode, all_words, make_word, syndrome
from app.core.models import DecodeRule, KeyDirection
from app.core.typesys import TypeDist, entropy, type_of


def test_build_css_dimensions(example_css) -> None:
    assert (example_css.kappa, example_css.k) == (1, 2)
    d3 = build_css(LinearCode.from_rows(["111"], 3))
    assert (d3.kappa, d3.k) == (1, 1)


def test_build_css_rejects_non_self_orthogonal() -> None:
    with pytest.raises(CodeConstructionError) as excinfo:
        build_css(LinearCode.from_rows(["1000"], 2))
    assert excinfo.value.code is ErrorCode.NOT_SELF_ORTHOGONAL


def test_build_css_d2_requires_all_ones() -> None:
    with pytest.raises(CodeConstructionError) as excinfo:
        build_css(LinearCode.from_rows(["1100"], 2))
    assert excinfo.value.code is ErrorCode.D2_RULE_VIOLATION


def test_coset_representative_examples(example_css) -> None:
    assert coset_representative(example_css, [0]).tolist() == [0, 0, 0, 0]
    assert coset_representative(example_css, [1]).tolist() == [0, 0, 0, 1]


def test_representative_minimizes_entropy_on_every_coset() -> None:
    code = LinearCode.from_rows(["11111111", "11110000"], 2)
    css = build_css(code)
    words = all_words(2, 8)
    syndromes = (words @ code.basis.T) % 2
    for syn in {tuple(s) for s in syndromes}:
        rep = coset_representative(css, list(syn))
        assert syndrome(rep, code).tolist() == list(syn)
        members = words[np.all(syndromes == syn, axis=1)]
        best = min(entropy(type_of(w, 2).probs(), 2) for w in members)
        assert entropy(type_of(rep, 2).probs(), 2) == pytest.approx(best)


def test_min_cond_entropy_uses_halves() -> None:
    words = np.array([[0, 0, 1, 1], [0, 1, 0, 1]])
    halves = default_halves(4)
    cond = rule_objective(words, 2, DecodeRule.MIN_COND_ENTROPY, halves)
    plain = rule_objective(words, 2, DecodeRule.MIN_ENTROPY)
    assert cond.tolist() == pytest.approx([0.0, 1.0])
    assert plain.tolist() == pytest.approx([1.0, 1.0])
    css = build_css(LinearCode.from_rows(["1111"], 2), rule=DecodeRule.MIN_COND_ENTROPY)
    assert css.second_half.tolist() == halves.tolist()


def test_min_hamming_rule() -> None:
    code = LinearCode.from_rows(["111111"], 2)
    css = build_css(code, rule=DecodeRule.MIN_HAMMING)
    rep = coset_representative(css, [1])
    assert int(rep.sum()) == 1


def test_type_spectrum_of_even_weight_dual(example_css) -> None:
    spectrum = type_spectrum(example_css)
    assert spectrum.total() == 8
    assert spectrum.get(TypeDist((2, 2))) == 6
    assert spectrum.get(TypeDist((4, 0))) == 1


def test_is_balanced_verdicts(example_css) -> None:
    assert is_balanced(example_css).balanced
    # C = C⊥ = uniões de pares disjuntos: poucas palavras de peso 2 para |T_Q|
    pairs = ["0" * (2 * i) + "11" + "0" * (18 - 2 * i) for i in range(10)]
    code = LinearCode.from_rows(pairs, 2)
    verdict = is_balanced(build_css(code))
    assert not verdict.balanced
    assert verdict.witness is not None


def test_key_map_round_trip(example_css, rng) -> None:
    assert decode_key(example_css, make_word("0110", 2)).tolist() == [1, 1]
    assert encode_key(example_css, [0, 0]).tolist() == [0, 0, 0, 0]
    codewords = example_css.code.words()
    for _ in range(100):
        sigma = rng.integers(0, 2, size=2)
        c = codewords[rng.integers(0, len(codewords))]
        word = (key_map(example_css, KeyDirection.ENCODE, sigma) + c) % 2
        assert key_map(example_css, KeyDirection.DECODE, word).tolist() == sigma.tolist()


def test_decode_outside_dual_rejected(example_css) -> None:
    with pytest.raises(UsageError):
        decode_key(example_css, make_word("1000", 2))


def test_correctable_and_degeneracy(example_css) -> None:
    zero = np.zeros(4, dtype=np.int64)
    ones = np.ones(4, dtype=np.int64)
    assert correctable(example_css, zero, zero)
    assert correctable(example_css, ones, zero)
    e = make_word("0001", 2)
    assert correctable(example_css, e, zero) == correctable(example_css, (e + ones) % 2, ones)


def test_gamma_prime_matches_transmission(rng) -> None:
    code = LinearCode.from_rows(["11111111", "11110000"], 2)
    css = build_css(code)
    for _ in range(200):
        alice = rng.integers(0, 2, size=8)
        error = (rng.random(8) < 0.2).astype(np.int64)
        result = transmit_key(css, alice, (alice - error) % 2)
        assert result.agreed == in_gamma_prime(css, error) == result.error_in_gamma_prime


def test_permuted_code_relabels_representatives(rng) -> None:
    code = LinearCode.from_rows(["11111111", "11110000"], 2)
    css = build_css(code)
    perm = rng.permutation(8)
    moved = css.permuted(perm)
    for _ in range(50):
        error = (rng.random(8) < 0.3).astype(np.int64)
        assert in_gamma_prime(moved, error[perm]) == in_gamma_prime(css, error)


def test_search_balanced_finds_code(rng) -> None:
    css = search_balanced(2, 8, 2, rng)
    assert css.code.is_self_orthogonal()
    assert css.code.contains(np.ones(8, dtype=np.int64))
    assert is_balanced(css).balanced


def test_search_balanced_errors(rng) -> None:
    with pytest.raises(UsageError):
        search_balanced(2, 8, 5, rng)
    with pytest.raises(CodeConstructionError) as excinfo:
        search_balanced(3, 2, 1, rng, max_tries=5)
    assert excinfo.value.code is ErrorCode.NOT_FOUND
    assert excinfo.value.tries == 5
