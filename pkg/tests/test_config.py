from __future__ import annotations

import pytest

from app.config import AppConfig

ENV_KEYS = [
    "ENV",
    "CSSQKD_CODEBANK",
    "CSSQKD_ENUM_CAP",
    "CSSQKD_GRID_D2",
    "CSSQKD_GRID_D3",
    "CSSQKD_REFINE_PASSES",
    "CSSQKD_BLOCK_MULTIPLE",
    "CSSQKD_LOG_DIR",
    "CSSQKD_LOG_LEVEL",
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


def test_defaults() -> None:
    config = AppConfig.load_from_env()
    assert config.codebank_path == "codebank.txt"
    assert config.enum_cap == 1 << 24
    assert config.grid_for(2) == 512
    assert config.grid_for(3) == 64
    assert config.block_multiple == 4
    assert config.env == "dev"


def test_reads_environment(monkeypatch) -> None:
    monkeypatch.setenv("CSSQKD_CODEBANK", "/tmp/bank.txt")
    monkeypatch.setenv("CSSQKD_GRID_D2", "256")
    monkeypatch.setenv("CSSQKD_LOG_LEVEL", "debug")
    monkeypatch.setenv("ENV", "prod")
    config = AppConfig.load_from_env()
    assert config.codebank_path == "/tmp/bank.txt"
    assert config.grid_d2 == 256
    assert config.log_level == "DEBUG"
    assert config.env == "prod"


def test_invalid_env_falls_back_to_dev(monkeypatch) -> None:
    monkeypatch.setenv("ENV", "staging")
    assert AppConfig.load_from_env().env == "dev"


@pytest.mark.parametrize("name,value", [("CSSQKD_ENUM_CAP", "muito"), ("CSSQKD_GRID_D2", "1"), ("CSSQKD_BLOCK_MULTIPLE", "0")])
def test_invalid_numbers_fail_loudly(monkeypatch, name: str, value: str) -> None:
    monkeypatch.setenv(name, value)
    with pytest.raises(RuntimeError, match=name):
        AppConfig.load_from_env()


def test_invalid_log_level(monkeypatch) -> None:
    monkeypatch.setenv("CSSQKD_LOG_LEVEL", "verbose")
    with pytest.raises(RuntimeError):
        AppConfig.load_from_env()


def test_grid_scales_with_alphabet() -> None:
    config = AppConfig(grid_d2=512, grid_d3=64)
    assert [config.grid_for(s) for s in (2, 3, 4, 5, 7, 14)] == [512, 64, 64, 16, 16, 16]
    assert config.pair_grid_for(2) == 256
    assert config.pair_grid_for(3) == 32
    assert config.pair_grid_for(5) == 8
    assert AppConfig(grid_d3=8).grid_for(5) == 2


def test_default_grid_follows_environment(monkeypatch) -> None:
    from app.core import exponents

    monkeypatch.setenv("CSSQKD_GRID_D2", "64")
    monkeypatch.setenv("CSSQKD_GRID_D3", "24")
    exponents._env_config.cache_clear()
    try:
        assert exponents.default_grid(2) == 64
        assert exponents.default_grid(3) == 24
        assert exponents.default_pair_grid(2) == 32
    finally:
        exponents._env_config.cache_clear()
