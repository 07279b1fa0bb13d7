from __future__ import annotations

import numpy as np
import pytest

from app.core.errors import UsageError
from app.core.gfvec import LinearCode
from app.core.qudit import (
    KrausChannel,
    channel_to_dist,
    fourier_conjugate,
    mix_kraus,
    random_kraus_channel,
    spmixed_check,
    switch3_deviation,
    weyl_family_deviation,
    weyl_relation_deviations,
)
from app.core.typesys import fourier_relabel


@pytest.mark.parametrize("d", [2, 3, 5])
def test_weyl_relations(d: int) -> None:
    assert max(weyl_relation_deviations(d)) < 1e-10
    assert weyl_family_deviation(d) < 1e-10


def test_pauli_channel_round_trip() -> None:
    dist = np.array([[0.7, 0.1, 0.05], [0.05, 0.0, 0.0], [0.0, 0.05, 0.05]])
    assert channel_to_dist(KrausChannel.pauli(dist)) == pytest.approx(dist, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_fourier_conjugate_relabels_distribution(d: int, rng) -> None:
    for _ in range(20):
        ch = random_kraus_channel(d, 2, rng)
        assert switch3_deviation(ch) < 1e-10
        expected = fourier_relabel(channel_to_dist(ch))
        assert channel_to_dist(fourier_conjugate(ch)) == pytest.approx(expected, abs=1e-10)


def test_distribution_independent_of_kraus_representation(rng) -> None:
    ch = random_kraus_channel(3, 3, rng)
    assert channel_to_dist(mix_kraus(ch, rng)) == pytest.approx(channel_to_dist(ch), abs=1e-10)


def test_non_trace_preserving_rejected() -> None:
    with pytest.raises(UsageError):
        KrausChannel(d=2, kraus_ops=(np.eye(2) * 0.9,))


def test_spmixed_identity() -> None:
    code = LinearCode.from_rows(["1111"], 2)
    zero = np.zeros(4, dtype=np.int64)
    assert spmixed_check(code, zero, zero) <= 1e-10
    assert spmixed_check(code, np.array([1, 0, 0, 0]), np.array([0, 1, 1, 0])) <= 1e-10
