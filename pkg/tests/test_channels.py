from __future__ import annotations

import numpy as np
import pytest

from app.core.errors import UsageError
from app.core.typesys import marginals
from app.domain.channels import identity_dist, preset_attack, resolve_attack


@pytest.mark.parametrize("name", ["identity", "dephasing", "flip", "depolarizing", "symmetric"])
@pytest.mark.parametrize("d", [2, 3])
def test_presets_are_distributions(name: str, d: int) -> None:
    attack = preset_attack(name, d, 0.1)
    assert attack.d == d
    assert attack.dist.sum() == pytest.approx(1.0)
    assert attack.channel is not None


def test_depolarizing_marginals() -> None:
    q = 0.12
    pbar, pdbar = marginals(preset_attack("depolarizing", 2, q).dist)
    assert pbar[1] == pytest.approx(2 * q / 3)
    assert pdbar[1] == pytest.approx(2 * q / 3)


def test_dephasing_only_moves_x_basis() -> None:
    dist = resolve_attack("dephasing:0.05", 2).dist
    pbar, pdbar = marginals(dist)
    assert pbar[1] == pytest.approx(0.0, abs=1e-12)
    assert pdbar[1] == pytest.approx(0.05)


def test_symmetric_is_product() -> None:
    dist = resolve_attack("symmetric:0.1", 3).dist
    pbar, pdbar = marginals(dist)
    assert dist == pytest.approx(np.outer(pbar, pdbar))


def test_dist_file(tmp_path) -> None:
    path = tmp_path / "p.txt"
    path.write_text("# P_A\n0.9 0.05\n0.05 0.0\n")
    attack = resolve_attack(f"dist:{path}", 2)
    assert attack.channel is None
    assert attack.dist.tolist() == pytest.approx([[0.9, 0.05], [0.05, 0.0]])


def test_kraus_file_both_layouts(tmp_path) -> None:
    pairs = tmp_path / "pairs.txt"
    pairs.write_text("2 1\n1 0 0 0\n0 0 1 0\n")
    literals = tmp_path / "literals.txt"
    literals.write_text("2 1\n1+0j 0j\n0j 1+0j\n")
    for path in (pairs, literals):
        attack = resolve_attack(f"kraus:{path}", 2)
        assert attack.dist[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "text",
    ["dephasing", "dephasing:abc", "dephasing:1.5", "teleport:0.1", "dist:/nao/existe.txt"],
)
def test_resolve_attack_errors(text: str) -> None:
    with pytest.raises(UsageError):
        resolve_attack(text, 2)


def test_kraus_dimension_mismatch(tmp_path) -> None:
    path = tmp_path / "k.txt"
    path.write_text("2 1\n1 0 0 0\n0 0 1 0\n")
    with pytest.raises(UsageError):
        resolve_attack(f"kraus:{path}", 3)


def test_identity_ignores_parameter() -> None:
    expected = np.zeros((3, 3))
    expected[0, 0] = 1.0
    assert np.array_equal(identity_dist(3, 0.4), expected)
    assert preset_attack("identity", 3, 0.4).label == "identity"
