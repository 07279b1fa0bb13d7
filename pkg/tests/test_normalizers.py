from __future__ import annotations

import pytest

from app.core.errors import UsageError
from app.core.normalizers import parse_bits, parse_config_lines, parse_dist, parse_grid, split_attack_spec


def test_parse_grid_range_includes_endpoints() -> None:
    grid = parse_grid("0..1:0.01")
    assert len(grid) == 101
    assert grid[0] == 0.0
    assert grid[-1] == 1.0


def test_parse_grid_list() -> None:
    assert parse_grid("0.1, 0.2,0.4").tolist() == [0.1, 0.2, 0.4]


@pytest.mark.parametrize("raw", ["", "1..0:0.1", "0..1:0", "0..1:0.3", "a,b"])
def test_parse_grid_rejects(raw: str) -> None:
    with pytest.raises(UsageError):
        parse_grid(raw)


def test_parse_dist() -> None:
    assert parse_dist("0.95,0.05", 2).tolist() == pytest.approx([0.95, 0.05])
    with pytest.raises(UsageError):
        parse_dist("0.5,0.4")
    with pytest.raises(UsageError):
        parse_dist("0.5,0.5", 3)


def test_parse_bits() -> None:
    assert parse_bits("0011 01") == [0, 0, 1, 1, 0, 1]
    with pytest.raises(UsageError):
        parse_bits("01x")


def test_split_attack_spec() -> None:
    assert split_attack_spec("Dephasing:0.03") == ("dephasing", "0.03")
    assert split_attack_spec("identity") == ("identity", "")
    with pytest.raises(UsageError):
        split_attack_spec("  ")


def test_parse_config_lines() -> None:
    lines = ["# comentário", "mode = bb84", "", "rate-step=0.01  # passo", "Seed = 7"]
    assert parse_config_lines(lines) == {"mode": "bb84", "rate_step": "0.01", "seed": "7"}
    with pytest.raises(UsageError):
        parse_config_lines(["sem igual"])
