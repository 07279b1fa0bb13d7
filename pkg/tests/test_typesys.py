from __future__ import annotations

import math

import numpy as np
import pytest

from app.core.errors import ResourceLimitError, UsageError
from app.core.typesys import (
    TypeDist,
    entropy,
    enumerate_types,
    flip,
    fourier_relabel,
    kl,
    l1_and_pinsker,
    marginals,
    mixture_channel,
    mixture_marginals,
    prob_of_type_class,
    type_class_size,
    type_class_within_entropy_bound,
    type_count,
    type_of,
)


def test_type_of_counts_symbols() -> None:
    assert type_of(np.array([0, 2, 2, 1, 2]), 3).counts == (1, 1, 3)


def test_entropy_base_d() -> None:
    assert entropy([0.5, 0.5], 2) == pytest.approx(1.0)
    assert entropy([1 / 3] * 3, 3) == pytest.approx(1.0)
    assert entropy([1.0, 0.0], 2) == 0.0


def test_kl_infinite_outside_support() -> None:
    assert kl([0.5, 0.5], [1.0, 0.0], 2) == math.inf
    assert kl([0.3, 0.7], [0.3, 0.7], 2) == pytest.approx(0.0)


def test_enumerate_types_count_and_cap() -> None:
    types = enumerate_types(4, 3)
    assert len(types) == type_count(4, 3) == 15
    assert len(set(types)) == 15
    with pytest.raises(ResourceLimitError):
        enumerate_types(200, 4, cap=100)


def test_type_class_probabilities_sum_to_one() -> None:
    p = np.array([0.2, 0.5, 0.3])
    total = sum(prob_of_type_class(q, p) for q in enumerate_types(6, 3))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_type_class_size_exact() -> None:
    assert type_class_size(TypeDist((2, 2))) == 6
    assert all(type_class_within_entropy_bound(q, 3) for q in enumerate_types(7, 3))


def test_zero_denominator_rejected() -> None:
    with pytest.raises(UsageError):
        TypeDist((0, 0))


def test_marginals_and_flip() -> None:
    joint = np.array([[0.5, 0.1, 0.0], [0.1, 0.1, 0.0], [0.0, 0.0, 0.2]])
    pbar, pdbar = marginals(joint)
    assert pbar.tolist() == pytest.approx([0.6, 0.2, 0.2])
    assert pdbar.tolist() == pytest.approx([0.6, 0.2, 0.2])
    assert flip([0.5, 0.3, 0.2]).tolist() == [0.5, 0.2, 0.3]


def test_fourier_relabel_swaps_and_negates() -> None:
    joint = np.zeros((3, 3))
    joint[1, 2] = 1.0
    relabeled = fourier_relabel(joint)
    # P′(s, t) = P(t, −s): massa em (s, t) com t = 1 e −s = 2, isto é s = 1
    assert relabeled[1, 1] == 1.0


def test_mixture_channel_marginals_match_formula() -> None:
    rng = np.random.default_rng(3)
    joint = rng.dirichlet(np.ones(9)).reshape(3, 3)
    r = 0.3
    pbar, pdbar = marginals(joint)
    mixed_bar, mixed_dbar = marginals(mixture_channel(joint, r))
    expect_bar, expect_dbar = mixture_marginals(pbar, pdbar, r)
    assert mixed_bar == pytest.approx(expect_bar)
    assert mixed_dbar == pytest.approx(expect_dbar)


def test_pinsker_holds_on_random_pairs() -> None:
    rng = np.random.default_rng(11)
    for d in (2, 3):
        for _ in range(200):
            q, p = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
            _, ok = l1_and_pinsker(q, p, d)
            assert ok
